#pragma once

#include "common.hpp"
#include "series.hpp"

namespace vitalemb {

// Oscillator parameters for one synthetic channel. Per regime the offset
// drifts linearly while amplitude and frequency are rescaled, so each regime
// has a distinct statistical and spectral signature.
struct ChannelConfig {
    std::string name;
    double base_frequency_hz = 1.0;
    double base_amplitude = 1.0;
    double base_offset = 0.0;
    std::vector<double> offset_slope_per_regime;  // units per minute; index 0 = baseline
    std::vector<double> amp_scale_per_regime;     // index 0 = baseline
    std::vector<double> freq_scale_per_regime;    // index 0 = baseline
};

struct SyntheticConfig {
    std::size_t num_subjects = 8;
    double sample_rate_hz = 50.0;
    double baseline_minutes = 1.0;
    double bleed_minutes = 6.0;
    std::size_t num_regimes = 3;                   // bleed regimes; label 0 is baseline
    std::vector<double> regime_boundaries;         // num_regimes-1 fractions of bleed duration
    double draw_interval_minutes = 2.0;
    double draw_artifact_magnitude = 8.0;
    double draw_artifact_seconds = 1.0;
    double noise_std = 0.1;
    std::vector<ChannelConfig> channels;
    std::uint64_t seed = 1;

    void validate() const {
        if (num_subjects < 1) throw std::invalid_argument("SyntheticConfig: num_subjects < 1");
        if (baseline_minutes <= 0 || bleed_minutes <= 0 || draw_interval_minutes <= 0 ||
            sample_rate_hz <= 0 || draw_artifact_seconds <= 0)
            throw std::invalid_argument("SyntheticConfig: durations must be positive");
        if (num_regimes < 2) throw std::invalid_argument("SyntheticConfig: num_regimes < 2");
        if (regime_boundaries.size() != num_regimes - 1)
            throw std::invalid_argument("SyntheticConfig: need num_regimes-1 boundaries");
        double prev = 0.0;
        for (double b : regime_boundaries) {
            if (b <= prev || b >= 1.0)
                throw std::invalid_argument(
                    "SyntheticConfig: boundaries must be strictly increasing in (0,1)");
            prev = b;
        }
        if (channels.empty()) throw std::invalid_argument("SyntheticConfig: no channels");
        for (const auto& ch : channels) {
            if (ch.offset_slope_per_regime.size() != num_regimes + 1 ||
                ch.amp_scale_per_regime.size() != num_regimes + 1 ||
                ch.freq_scale_per_regime.size() != num_regimes + 1)
                throw std::invalid_argument(
                    "SyntheticConfig: per-regime channel arrays must have num_regimes+1 entries");
        }
    }
};

// Six channels named after the protocol's sensors, with regime shifts strong
// enough for short windows to be statistically distinguishable.
inline SyntheticConfig default_synthetic_config(std::size_t num_regimes = 3) {
    SyntheticConfig cfg;
    cfg.num_regimes = num_regimes;
    cfg.regime_boundaries.clear();
    for (std::size_t r = 1; r < num_regimes; ++r)
        cfg.regime_boundaries.push_back(static_cast<double>(r) / static_cast<double>(num_regimes));
    const char* names[6] = {"ART", "PAP", "CVP", "ECG", "pleth", "airway"};
    double freqs[6] = {1.2, 1.2, 0.3, 1.2, 1.2, 0.25};
    double amps[6] = {1.0, 0.6, 0.3, 0.8, 0.7, 0.5};
    double offsets[6] = {90.0, 25.0, 8.0, 0.0, 50.0, 10.0};
    for (int c = 0; c < 6; ++c) {
        ChannelConfig ch;
        ch.name = names[c];
        ch.base_frequency_hz = freqs[c];
        ch.base_amplitude = amps[c];
        ch.base_offset = offsets[c];
        for (std::size_t r = 0; r <= num_regimes; ++r) {
            double g = static_cast<double>(r);  // 0 = baseline
            ch.offset_slope_per_regime.push_back((c % 2 == 0 ? -1.0 : 1.0) * 0.6 * g);
            ch.amp_scale_per_regime.push_back(1.0 + 0.9 * g);
            ch.freq_scale_per_regime.push_back(1.0 + 0.5 * g);
        }
        cfg.channels.push_back(std::move(ch));
    }
    return cfg;
}

// Deterministic generator standing in for the bleed protocol: a baseline rest
// segment, then num_regimes regimes whose boundaries are fractions of the
// bleed duration, plus additive square-pulse draw artifacts on a fixed clock.
inline std::vector<SubjectSeries> generate_synthetic(const SyntheticConfig& cfg) {
    cfg.validate();
    std::vector<SubjectSeries> out;
    const std::size_t fs = static_cast<std::size_t>(cfg.sample_rate_hz);
    const std::size_t baseline_steps =
        static_cast<std::size_t>(cfg.baseline_minutes * 60.0 * cfg.sample_rate_hz);
    const std::size_t bleed_steps =
        static_cast<std::size_t>(cfg.bleed_minutes * 60.0 * cfg.sample_rate_hz);
    const std::size_t total = baseline_steps + bleed_steps;
    (void)fs;

    for (std::size_t s = 0; s < cfg.num_subjects; ++s) {
        Rng rng(Rng(cfg.seed).derive(s + 1));
        SubjectSeries series;
        series.subject_id = "subject" + std::to_string(s + 1);
        series.sample_rate_hz = cfg.sample_rate_hz;
        series.bleed_start_idx = baseline_steps;
        series.values = Matrix(cfg.channels.size(), total);
        series.regime_labels.assign(total, 0);

        // Per-timestep regime: 0 before bleed, then 1..num_regimes.
        for (std::size_t t = baseline_steps; t < total; ++t) {
            double frac = static_cast<double>(t - baseline_steps) / static_cast<double>(bleed_steps);
            int regime = 1;
            for (double b : cfg.regime_boundaries)
                if (frac >= b) ++regime;
            series.regime_labels[t] = regime;
        }

        // Draw events every draw_interval_minutes from record start (k >= 1),
        // clamped into range at the record end.
        std::size_t interval_steps =
            static_cast<std::size_t>(cfg.draw_interval_minutes * 60.0 * cfg.sample_rate_hz);
        for (std::size_t idx = interval_steps; idx <= total; idx += interval_steps)
            series.draw_events.push_back(std::min(idx, total - 1));
        // Clamping can duplicate the final index.
        series.draw_events.erase(
            std::unique(series.draw_events.begin(), series.draw_events.end()),
            series.draw_events.end());

        for (std::size_t c = 0; c < cfg.channels.size(); ++c) {
            const ChannelConfig& ch = cfg.channels[c];
            series.channels.push_back(ch.name);
            double phase = rng.next_double() * 2.0 * M_PI;
            double offset = ch.base_offset;
            double osc_phase = phase;
            int prev_regime = 0;
            for (std::size_t t = 0; t < total; ++t) {
                int regime = series.regime_labels[t];
                if (regime != prev_regime) prev_regime = regime;
                double dt_min = 1.0 / (cfg.sample_rate_hz * 60.0);
                offset += ch.offset_slope_per_regime[regime] * dt_min;
                double amp = ch.base_amplitude * ch.amp_scale_per_regime[regime];
                double freq = ch.base_frequency_hz * ch.freq_scale_per_regime[regime];
                osc_phase += 2.0 * M_PI * freq / cfg.sample_rate_hz;
                double v = offset + amp * std::sin(osc_phase) + cfg.noise_std * rng.next_normal();
                series.values(c, t) = v;
            }
        }

        // Additive square pulses at each draw event.
        std::size_t pulse = static_cast<std::size_t>(cfg.draw_artifact_seconds * cfg.sample_rate_hz);
        for (std::size_t d : series.draw_events)
            for (std::size_t t = d; t < std::min(d + pulse, total); ++t)
                for (std::size_t c = 0; c < cfg.channels.size(); ++c)
                    series.values(c, t) += cfg.draw_artifact_magnitude;

        series.validate();
        out.push_back(std::move(series));
    }
    return out;
}

}  // namespace vitalemb
