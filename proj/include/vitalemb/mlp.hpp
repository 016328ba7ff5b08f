#pragma once

#include "common.hpp"

namespace vitalemb {

struct MlpConfig {
    std::size_t hidden_units = 64;
    double learning_rate = 0.05;
    std::size_t epochs = 500;
    std::uint64_t seed = 1;
};

// One hidden rectifier layer and a softmax output, trained with full-batch
// gradient descent on cross-entropy. Features are standardized with the
// statistics of the training set only.
class MlpClassifier {
public:
    void fit(const std::vector<std::vector<double>>& features, const std::vector<int>& labels,
             const MlpConfig& cfg) {
        if (features.size() != labels.size() || features.empty())
            throw std::invalid_argument("MlpClassifier::fit: bad inputs");
        cfg_ = cfg;
        in_dim_ = features[0].size();
        num_classes_ = static_cast<std::size_t>(
            *std::max_element(labels.begin(), labels.end()) + 1);

        feat_mean_.assign(in_dim_, 0.0);
        feat_std_.assign(in_dim_, 1.0);
        for (const auto& x : features)
            for (std::size_t d = 0; d < in_dim_; ++d) feat_mean_[d] += x[d];
        for (double& m : feat_mean_) m /= static_cast<double>(features.size());
        std::vector<double> var(in_dim_, 0.0);
        for (const auto& x : features)
            for (std::size_t d = 0; d < in_dim_; ++d) {
                double diff = x[d] - feat_mean_[d];
                var[d] += diff * diff;
            }
        for (std::size_t d = 0; d < in_dim_; ++d) {
            feat_std_[d] = std::sqrt(var[d] / static_cast<double>(features.size()));
            if (feat_std_[d] == 0.0) feat_std_[d] = 1.0;
        }

        Rng rng(cfg.seed);
        double half1 = std::sqrt(1.0 / static_cast<double>(in_dim_));
        w1_.assign(cfg.hidden_units * in_dim_, 0.0);
        b1_.assign(cfg.hidden_units, 0.0);
        for (auto& w : w1_) w = (2.0 * rng.next_double() - 1.0) * half1;
        double half2 = std::sqrt(1.0 / static_cast<double>(cfg.hidden_units));
        w2_.assign(num_classes_ * cfg.hidden_units, 0.0);
        b2_.assign(num_classes_, 0.0);
        for (auto& w : w2_) w = (2.0 * rng.next_double() - 1.0) * half2;

        const std::size_t n = features.size();
        std::vector<std::vector<double>> x_std(n);
        for (std::size_t i = 0; i < n; ++i) x_std[i] = standardize(features[i]);

        std::vector<double> gw1(w1_.size()), gb1(b1_.size()), gw2(w2_.size()), gb2(b2_.size());
        for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
            std::fill(gw1.begin(), gw1.end(), 0.0);
            std::fill(gb1.begin(), gb1.end(), 0.0);
            std::fill(gw2.begin(), gw2.end(), 0.0);
            std::fill(gb2.begin(), gb2.end(), 0.0);
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<double> hidden, probs;
                forward_one(x_std[i], hidden, probs);
                loss -= std::log(std::max(probs[labels[i]], 1e-300));
                // Softmax + cross-entropy gradient.
                std::vector<double> d_out = probs;
                d_out[labels[i]] -= 1.0;
                for (std::size_t c = 0; c < num_classes_; ++c) {
                    gb2[c] += d_out[c];
                    for (std::size_t h = 0; h < cfg.hidden_units; ++h)
                        gw2[c * cfg.hidden_units + h] += d_out[c] * hidden[h];
                }
                for (std::size_t h = 0; h < cfg.hidden_units; ++h) {
                    if (hidden[h] <= 0.0) continue;  // rectifier gate
                    double dh = 0.0;
                    for (std::size_t c = 0; c < num_classes_; ++c)
                        dh += d_out[c] * w2_[c * cfg.hidden_units + h];
                    gb1[h] += dh;
                    for (std::size_t d = 0; d < in_dim_; ++d)
                        gw1[h * in_dim_ + d] += dh * x_std[i][d];
                }
            }
            if (!std::isfinite(loss))
                throw std::runtime_error("MlpClassifier::fit: non-finite loss at epoch " +
                                         std::to_string(epoch));
            double scale = cfg.learning_rate / static_cast<double>(n);
            for (std::size_t j = 0; j < w1_.size(); ++j) w1_[j] -= scale * gw1[j];
            for (std::size_t j = 0; j < b1_.size(); ++j) b1_[j] -= scale * gb1[j];
            for (std::size_t j = 0; j < w2_.size(); ++j) w2_[j] -= scale * gw2[j];
            for (std::size_t j = 0; j < b2_.size(); ++j) b2_[j] -= scale * gb2[j];
        }
    }

    int predict(const std::vector<double>& x) const {
        std::vector<double> hidden, probs;
        forward_one(standardize(x), hidden, probs);
        return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    }

    std::vector<double> predict_proba(const std::vector<double>& x) const {
        std::vector<double> hidden, probs;
        forward_one(standardize(x), hidden, probs);
        return probs;
    }

    // Central finite differences over every weight against the analytic
    // batch gradient at the initial point. Returns the max relative error.
    double grad_check(const std::vector<std::vector<double>>& features,
                      const std::vector<int>& labels, const MlpConfig& cfg, double step = 1e-5) {
        MlpConfig probe = cfg;
        probe.epochs = 0;
        fit(features, labels, probe);
        std::vector<std::vector<double>> x_std(features.size());
        for (std::size_t i = 0; i < features.size(); ++i) x_std[i] = standardize(features[i]);

        std::vector<double> gw1(w1_.size(), 0.0), gb1(b1_.size(), 0.0), gw2(w2_.size(), 0.0),
            gb2(b2_.size(), 0.0);
        for (std::size_t i = 0; i < x_std.size(); ++i) {
            std::vector<double> hidden, probs;
            forward_one(x_std[i], hidden, probs);
            std::vector<double> d_out = probs;
            d_out[labels[i]] -= 1.0;
            for (std::size_t c = 0; c < num_classes_; ++c) {
                gb2[c] += d_out[c];
                for (std::size_t h = 0; h < cfg_.hidden_units; ++h)
                    gw2[c * cfg_.hidden_units + h] += d_out[c] * hidden[h];
            }
            for (std::size_t h = 0; h < cfg_.hidden_units; ++h) {
                if (hidden[h] <= 0.0) continue;
                double dh = 0.0;
                for (std::size_t c = 0; c < num_classes_; ++c)
                    dh += d_out[c] * w2_[c * cfg_.hidden_units + h];
                gb1[h] += dh;
                for (std::size_t d = 0; d < in_dim_; ++d)
                    gw1[h * in_dim_ + d] += dh * x_std[i][d];
            }
        }

        auto batch_loss = [&]() {
            double loss = 0.0;
            for (std::size_t i = 0; i < x_std.size(); ++i) {
                std::vector<double> hidden, probs;
                forward_one(x_std[i], hidden, probs);
                loss -= std::log(std::max(probs[labels[i]], 1e-300));
            }
            return loss;
        };
        double max_rel = 0.0;
        auto probe_vec = [&](std::vector<double>& w, const std::vector<double>& g) {
            for (std::size_t j = 0; j < w.size(); ++j) {
                double saved = w[j];
                w[j] = saved + step;
                double lp = batch_loss();
                w[j] = saved - step;
                double lm = batch_loss();
                w[j] = saved;
                double numeric = (lp - lm) / (2.0 * step);
                double denom = std::max({std::fabs(numeric), std::fabs(g[j]), 1e-8});
                max_rel = std::max(max_rel, std::fabs(numeric - g[j]) / denom);
            }
        };
        probe_vec(w1_, gw1);
        probe_vec(b1_, gb1);
        probe_vec(w2_, gw2);
        probe_vec(b2_, gb2);
        return max_rel;
    }

    void zero_output_layer() {
        std::fill(w2_.begin(), w2_.end(), 0.0);
        std::fill(b2_.begin(), b2_.end(), 0.0);
    }

private:
    std::vector<double> standardize(const std::vector<double>& x) const {
        std::vector<double> out(in_dim_);
        for (std::size_t d = 0; d < in_dim_; ++d) out[d] = (x[d] - feat_mean_[d]) / feat_std_[d];
        return out;
    }

    void forward_one(const std::vector<double>& x, std::vector<double>& hidden,
                     std::vector<double>& probs) const {
        hidden.assign(cfg_.hidden_units, 0.0);
        for (std::size_t h = 0; h < cfg_.hidden_units; ++h) {
            double acc = b1_[h];
            for (std::size_t d = 0; d < in_dim_; ++d) acc += w1_[h * in_dim_ + d] * x[d];
            hidden[h] = acc > 0.0 ? acc : 0.0;
        }
        std::vector<double> logits(num_classes_, 0.0);
        double max_logit = -1e300;
        for (std::size_t c = 0; c < num_classes_; ++c) {
            double acc = b2_[c];
            for (std::size_t h = 0; h < cfg_.hidden_units; ++h)
                acc += w2_[c * cfg_.hidden_units + h] * hidden[h];
            logits[c] = acc;
            max_logit = std::max(max_logit, acc);
        }
        probs.assign(num_classes_, 0.0);
        double denom = 0.0;
        for (std::size_t c = 0; c < num_classes_; ++c) {
            probs[c] = std::exp(logits[c] - max_logit);
            denom += probs[c];
        }
        for (double& p : probs) p /= denom;
    }

    MlpConfig cfg_;
    std::size_t in_dim_ = 0;
    std::size_t num_classes_ = 0;
    std::vector<double> feat_mean_, feat_std_;
    std::vector<double> w1_, b1_, w2_, b2_;
};

}  // namespace vitalemb
