#pragma once

#include "series.hpp"

namespace vitalemb {

// 16 features per channel: mean, median, std, p2.5, p97.5, 95-percentile
// range, and 10 binned maxima of the power spectrum.
constexpr std::size_t kFeaturesPerChannel = 16;
constexpr std::size_t kPowerBins = 10;

// Power spectrum of a mean-removed real signal via the direct discrete
// Fourier transform, frequencies 0..floor(T/2) inclusive.
inline std::vector<double> power_spectrum(const std::vector<double>& x) {
    const std::size_t n = x.size();
    double m = mean_of(x);
    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[i] = x[i] - m;
    std::size_t half = n / 2;
    std::vector<double> power(half + 1, 0.0);
    for (std::size_t f = 0; f <= half; ++f) {
        double re = 0.0, im = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            double ang = -2.0 * M_PI * static_cast<double>(f) * static_cast<double>(t) /
                         static_cast<double>(n);
            re += centered[t] * std::cos(ang);
            im += centered[t] * std::sin(ang);
        }
        power[f] = re * re + im * im;
    }
    return power;
}

// Maximum power within each of 10 equal-width frequency bins over [0, Nyquist].
inline std::vector<double> binned_max_power(const std::vector<double>& power) {
    std::vector<double> bins(kPowerBins, 0.0);
    const std::size_t nf = power.size();
    for (std::size_t f = 0; f < nf; ++f) {
        std::size_t bin = std::min(kPowerBins - 1, f * kPowerBins / nf);
        bins[bin] = std::max(bins[bin], power[f]);
    }
    return bins;
}

inline std::vector<double> extract_features(const Window& window) {
    if (window.length < 2) throw std::invalid_argument("extract_features: window length < 2");
    std::vector<double> features;
    features.reserve(window.values.rows * kFeaturesPerChannel);
    for (std::size_t c = 0; c < window.values.rows; ++c) {
        std::vector<double> x(window.length);
        for (std::size_t t = 0; t < window.length; ++t) x[t] = window.values(c, t);
        double p_lo = percentile(x, 2.5);
        double p_hi = percentile(x, 97.5);
        features.push_back(mean_of(x));
        features.push_back(percentile(x, 50.0));
        features.push_back(std_of(x));
        features.push_back(p_lo);
        features.push_back(p_hi);
        features.push_back(p_hi - p_lo);
        std::vector<double> bins = binned_max_power(power_spectrum(x));
        features.insert(features.end(), bins.begin(), bins.end());
    }
    for (double f : features) check_finite(f, "extract_features");
    return features;
}

inline std::vector<std::string> feature_names(const std::vector<std::string>& channels) {
    static const char* stats[6] = {"mean", "median", "std", "p2.5", "p97.5", "range95"};
    std::vector<std::string> names;
    for (const auto& ch : channels) {
        for (const char* s : stats) names.push_back(ch + "_" + s);
        for (std::size_t b = 0; b < kPowerBins; ++b)
            names.push_back(ch + "_powerbin" + std::to_string(b));
    }
    return names;
}

}  // namespace vitalemb
