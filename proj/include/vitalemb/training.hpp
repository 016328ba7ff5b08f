#pragma once

#include <filesystem>
#include <functional>

#include "encoder.hpp"
#include "sampling.hpp"
#include "series.hpp"

namespace vitalemb {

// softplus(x) = log(1 + exp(x)), stable for large |x|.
inline double softplus(double x) {
    double ax = std::fabs(x);
    return std::max(x, 0.0) + std::log1p(std::exp(-ax));
}

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

struct LossValue {
    double total = 0.0;
    double positive_term = 0.0;
    std::vector<double> negative_terms;
};

// L = -log sigma(ref.pos) - sum_k log sigma(-ref.neg_k), each term evaluated
// as a softplus so large dot products cannot overflow.
inline LossValue triplet_loss(const std::vector<double>& e_ref, const std::vector<double>& e_pos,
                              const std::vector<std::vector<double>>& e_negs) {
    if (e_negs.empty()) throw std::invalid_argument("triplet_loss: need at least one negative");
    if (e_pos.size() != e_ref.size())
        throw std::invalid_argument("triplet_loss: embedding dimension mismatch");
    LossValue lv;
    double dot_pos = std::inner_product(e_ref.begin(), e_ref.end(), e_pos.begin(), 0.0);
    lv.positive_term = softplus(-dot_pos);  // -log sigma(z) = softplus(-z)
    lv.total = lv.positive_term;
    for (const auto& e_neg : e_negs) {
        if (e_neg.size() != e_ref.size())
            throw std::invalid_argument("triplet_loss: embedding dimension mismatch");
        double dot_neg = std::inner_product(e_ref.begin(), e_ref.end(), e_neg.begin(), 0.0);
        double term = softplus(dot_neg);
        lv.negative_terms.push_back(term);
        lv.total += term;
    }
    check_finite(lv.total, "triplet_loss");
    return lv;
}

enum class OptimizerKind { SGD, Adam };

struct TrainConfig {
    std::size_t iterations = 1500;
    std::size_t negatives_per_item = 2;  // K
    double learning_rate = 1e-3;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    SamplerScheme scheme = SamplerScheme::CrossSubject;
    std::size_t min_length = 16;
    std::size_t max_length = 256;  // sampling cap; 0 = full sequences
    std::uint64_t seed = 1;
    std::size_t checkpoint_every = 0;  // 0 = only final
};

struct TraceEntry {
    std::size_t iteration;
    double loss;
    double pos_term;
    double neg_term_mean;
};

struct TrainResult {
    EncoderParams params;
    std::vector<TraceEntry> trace;
};

namespace detail {

struct BatchLoss {
    double total = 0.0;
    double pos_term_mean = 0.0;
    double neg_term_mean = 0.0;
};

// Batch-mean loss over one TripletBatch and its gradient w.r.t. all encoder
// parameters, composing the loss derivative with encoder backward passes.
inline BatchLoss batch_loss_and_grad(const EncoderParams& params,
                                     const std::vector<Matrix>& sources,
                                     const TripletBatch& batch, std::vector<double>& grad) {
    const std::size_t n = batch.items.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    BatchLoss out;
    std::size_t neg_count = 0;
    std::fill(grad.begin(), grad.end(), 0.0);

    for (const TripletItem& item : batch.items) {
        Matrix ref_win = slice_span(sources[item.source], item.reference);
        Matrix pos_win = slice_span(sources[item.source], item.positive);
        ForwardCache ref_cache = forward_cached(params, ref_win);
        ForwardCache pos_cache = forward_cached(params, pos_win);

        auto embed_of = [&](const ForwardCache& cache) {
            std::vector<double> e(params.config.embedding_dim, 0.0);
            for (std::size_t d = 0; d < e.size(); ++d) {
                double acc = params.flat[params.final_b(d)];
                for (std::size_t h = 0; h < params.config.hidden_channels; ++h)
                    acc += params.flat[params.final_w(d, h)] * cache.pooled[h];
                e[d] = acc;
            }
            return e;
        };
        std::vector<double> e_ref = embed_of(ref_cache);
        std::vector<double> e_pos = embed_of(pos_cache);

        std::vector<Matrix> neg_wins;
        std::vector<ForwardCache> neg_caches;
        std::vector<std::vector<double>> e_negs;
        for (const NegativeSample& neg : item.negatives) {
            neg_wins.push_back(slice_span(sources[neg.source], neg.span));
            neg_caches.push_back(forward_cached(params, neg_wins.back()));
            e_negs.push_back(embed_of(neg_caches.back()));
        }

        LossValue lv = triplet_loss(e_ref, e_pos, e_negs);
        out.total += lv.total * inv_n;
        out.pos_term_mean += lv.positive_term * inv_n;
        for (double t : lv.negative_terms) {
            out.neg_term_mean += t;
            ++neg_count;
        }

        double dot_pos = std::inner_product(e_ref.begin(), e_ref.end(), e_pos.begin(), 0.0);
        double d_dot_pos = -sigmoid(-dot_pos) * inv_n;

        std::vector<double> d_ref(e_ref.size(), 0.0), d_pos(e_ref.size(), 0.0);
        for (std::size_t d = 0; d < e_ref.size(); ++d) {
            d_ref[d] += d_dot_pos * e_pos[d];
            d_pos[d] += d_dot_pos * e_ref[d];
        }
        for (std::size_t k = 0; k < e_negs.size(); ++k) {
            double dot_neg =
                std::inner_product(e_ref.begin(), e_ref.end(), e_negs[k].begin(), 0.0);
            double d_dot_neg = sigmoid(dot_neg) * inv_n;
            std::vector<double> d_neg(e_ref.size(), 0.0);
            for (std::size_t d = 0; d < e_ref.size(); ++d) {
                d_ref[d] += d_dot_neg * e_negs[k][d];
                d_neg[d] = d_dot_neg * e_ref[d];
            }
            backward(params, neg_wins[k], neg_caches[k], d_neg, grad);
        }
        backward(params, ref_win, ref_cache, d_ref, grad);
        backward(params, pos_win, pos_cache, d_pos, grad);
    }
    if (neg_count > 0) out.neg_term_mean /= static_cast<double>(neg_count);
    return out;
}

}  // namespace detail

struct AdamState {
    std::vector<double> m, v;
    std::size_t step = 0;
};

inline void optimizer_step(EncoderParams& params, const std::vector<double>& grad,
                           const TrainConfig& cfg, AdamState& state) {
    if (cfg.optimizer == OptimizerKind::SGD) {
        for (std::size_t i = 0; i < params.flat.size(); ++i)
            params.flat[i] -= cfg.learning_rate * grad[i];
        return;
    }
    if (state.m.empty()) {
        state.m.assign(params.flat.size(), 0.0);
        state.v.assign(params.flat.size(), 0.0);
    }
    ++state.step;
    double b1t = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(state.step));
    double b2t = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.flat.size(); ++i) {
        state.m[i] = cfg.adam_beta1 * state.m[i] + (1.0 - cfg.adam_beta1) * grad[i];
        state.v[i] = cfg.adam_beta2 * state.v[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
        double mhat = state.m[i] / b1t;
        double vhat = state.v[i] / b2t;
        params.flat[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    }
}

// Stochastic triplet training over the given source sequences. Deterministic
// given the seed. checkpoint_dir may be empty to skip checkpoints.
inline TrainResult train(const std::vector<Matrix>& sources, const EncoderConfig& enc_cfg,
                         const TrainConfig& cfg, const std::string& checkpoint_dir = "") {
    if (sources.empty()) throw std::invalid_argument("train: no sources");
    std::vector<std::size_t> lengths;
    for (const auto& s : sources) {
        if (s.rows != enc_cfg.in_channels)
            throw std::invalid_argument("train: source channel count mismatch");
        lengths.push_back(s.cols);
    }

    TrainResult result;
    result.params = init_params(enc_cfg, cfg.seed);
    AdamState opt_state;
    std::vector<double> grad(result.params.count(), 0.0);
    SamplerConfig sampler{cfg.negatives_per_item, cfg.scheme, cfg.min_length, cfg.max_length};
    Rng seed_stream(cfg.seed);

    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        TripletBatch batch = sample_triplets(lengths, sampler, seed_stream.derive(it + 1));
        detail::BatchLoss loss = detail::batch_loss_and_grad(result.params, sources, batch, grad);
        if (!std::isfinite(loss.total))
            throw std::runtime_error("train: non-finite loss at iteration " + std::to_string(it) +
                                     " (pos_term=" + std::to_string(loss.pos_term_mean) +
                                     ", neg_term_mean=" + std::to_string(loss.neg_term_mean) + ")");
        optimizer_step(result.params, grad, cfg, opt_state);

        result.trace.push_back({it, loss.total, loss.pos_term_mean, loss.neg_term_mean});

        if (!checkpoint_dir.empty() && cfg.checkpoint_every > 0 &&
            (it + 1) % cfg.checkpoint_every == 0)
            save_checkpoint(result.params, checkpoint_dir + "/ckpt_" + std::to_string(it + 1),
                            cfg.seed);
    }
    if (!checkpoint_dir.empty())
        save_checkpoint(result.params, checkpoint_dir + "/ckpt_final", cfg.seed);
    return result;
}

inline void write_loss_trace(const std::vector<TraceEntry>& trace, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_loss_trace: cannot open " + path);
    f << "iteration,loss,pos_term,neg_term_mean\n";
    for (const auto& e : trace)
        f << e.iteration << ',' << detail::fmt_double(e.loss) << ','
          << detail::fmt_double(e.pos_term) << ',' << detail::fmt_double(e.neg_term_mean) << '\n';
}

struct GradCheckReport {
    double max_relative_error = 0.0;
    std::size_t param_count = 0;
    std::size_t params_checked = 0;
};

// Central finite differences on the batch loss, compared against the analytic
// gradient. checked_params = 0 means every parameter.
inline GradCheckReport grad_check(const EncoderConfig& enc_cfg, std::uint64_t seed,
                                  std::size_t checked_params = 0, double step = 1e-5) {
    EncoderParams params = init_params(enc_cfg, seed);
    Rng rng(Rng(seed).derive(77));

    std::vector<Matrix> sources;
    std::size_t source_len = std::max<std::size_t>(16, 2 * receptive_field(enc_cfg));
    Matrix src(enc_cfg.in_channels, source_len);
    for (auto& v : src.data) v = rng.next_normal();
    sources.push_back(std::move(src));

    SamplerConfig sampler{2, SamplerScheme::CrossSubject, std::max<std::size_t>(2, source_len / 4),
                          0};
    TripletBatch batch =
        sample_triplets(std::vector<std::size_t>{source_len}, sampler, rng.next_u64());

    std::vector<double> analytic(params.count(), 0.0);
    detail::batch_loss_and_grad(params, sources, batch, analytic);

    GradCheckReport report;
    report.param_count = params.count();
    std::vector<std::size_t> indices;
    if (checked_params == 0 || checked_params >= params.count()) {
        for (std::size_t i = 0; i < params.count(); ++i) indices.push_back(i);
    } else {
        for (std::size_t i = 0; i < checked_params; ++i)
            indices.push_back(static_cast<std::size_t>(
                rng.next_int(0, static_cast<std::int64_t>(params.count()) - 1)));
    }
    report.params_checked = indices.size();

    std::vector<double> scratch(params.count(), 0.0);
    for (std::size_t idx : indices) {
        double saved = params.flat[idx];
        params.flat[idx] = saved + step;
        double lp = detail::batch_loss_and_grad(params, sources, batch, scratch).total;
        params.flat[idx] = saved - step;
        double lm = detail::batch_loss_and_grad(params, sources, batch, scratch).total;
        params.flat[idx] = saved;
        double numeric = (lp - lm) / (2.0 * step);
        double denom = std::max({std::fabs(numeric), std::fabs(analytic[idx]), 1e-8});
        double rel = std::fabs(numeric - analytic[idx]) / denom;
        report.max_relative_error = std::max(report.max_relative_error, rel);
    }
    return report;
}

}  // namespace vitalemb
