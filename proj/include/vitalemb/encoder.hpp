#pragma once

#include <fstream>

#include "common.hpp"
#include "json.hpp"

namespace vitalemb {

struct EncoderConfig {
    std::size_t in_channels = 6;
    std::size_t hidden_channels = 32;
    std::size_t num_layers = 5;
    std::size_t kernel_size = 3;
    std::size_t dilation_base = 2;
    std::size_t embedding_dim = 128;
    double leaky_slope = 0.01;
    bool residual = true;

    void validate() const {
        if (in_channels < 1 || hidden_channels < 1 || num_layers < 1 || kernel_size < 1 ||
            dilation_base < 1 || embedding_dim < 1)
            throw std::invalid_argument("EncoderConfig: all sizes must be >= 1");
    }

    std::size_t layer_in(std::size_t layer) const {
        return layer == 0 ? in_channels : hidden_channels;
    }
    std::size_t dilation(std::size_t layer) const {
        std::size_t d = 1;
        for (std::size_t i = 0; i < layer; ++i) d *= dilation_base;
        return d;
    }
};

// Timesteps of input influencing one output of the last conv layer:
// 1 + (kernel-1) * sum of dilations.
inline std::size_t receptive_field(const EncoderConfig& cfg) {
    cfg.validate();
    std::size_t sum = 0;
    for (std::size_t l = 0; l < cfg.num_layers; ++l) sum += cfg.dilation(l);
    return 1 + (cfg.kernel_size - 1) * sum;
}

// All encoder weights in one flat vector, addressed through offset helpers.
// Layout per layer: conv kernel [out*in*k], conv bias [out], then the 1x1
// residual projection [out*in] when in != out; finally the linear map
// [embedding_dim*hidden] and its bias [embedding_dim].
struct EncoderParams {
    EncoderConfig config;
    std::vector<double> flat;

    bool layer_has_proj(std::size_t layer) const {
        return config.residual && config.layer_in(layer) != config.hidden_channels;
    }
    std::size_t layer_offset(std::size_t layer) const {
        std::size_t off = 0;
        for (std::size_t l = 0; l < layer; ++l) off += layer_size(l);
        return off;
    }
    std::size_t layer_size(std::size_t layer) const {
        std::size_t in = config.layer_in(layer);
        std::size_t out = config.hidden_channels;
        std::size_t n = out * in * config.kernel_size + out;
        if (layer_has_proj(layer)) n += out * in;
        return n;
    }
    std::size_t conv_w(std::size_t layer, std::size_t o, std::size_t i, std::size_t j) const {
        return layer_offset(layer) + (o * config.layer_in(layer) + i) * config.kernel_size + j;
    }
    std::size_t conv_b(std::size_t layer, std::size_t o) const {
        return layer_offset(layer) +
               config.hidden_channels * config.layer_in(layer) * config.kernel_size + o;
    }
    std::size_t proj_w(std::size_t layer, std::size_t o, std::size_t i) const {
        return layer_offset(layer) +
               config.hidden_channels * config.layer_in(layer) * config.kernel_size +
               config.hidden_channels + o * config.layer_in(layer) + i;
    }
    std::size_t final_offset() const { return layer_offset(config.num_layers); }
    std::size_t final_w(std::size_t e, std::size_t h) const {
        return final_offset() + e * config.hidden_channels + h;
    }
    std::size_t final_b(std::size_t e) const {
        return final_offset() + config.embedding_dim * config.hidden_channels + e;
    }
    std::size_t count() const {
        return final_offset() + config.embedding_dim * config.hidden_channels +
               config.embedding_dim;
    }
};

// Kernels uniform in +-sqrt(1/(fan_in)), biases zero.
inline EncoderParams init_params(const EncoderConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    EncoderParams p;
    p.config = cfg;
    p.flat.assign(EncoderParams{cfg, {}}.count(), 0.0);
    Rng rng(seed);
    for (std::size_t l = 0; l < cfg.num_layers; ++l) {
        double half = std::sqrt(1.0 / (static_cast<double>(cfg.layer_in(l)) *
                                       static_cast<double>(cfg.kernel_size)));
        for (std::size_t o = 0; o < cfg.hidden_channels; ++o)
            for (std::size_t i = 0; i < cfg.layer_in(l); ++i)
                for (std::size_t j = 0; j < cfg.kernel_size; ++j)
                    p.flat[p.conv_w(l, o, i, j)] = (2.0 * rng.next_double() - 1.0) * half;
        if (p.layer_has_proj(l)) {
            double phalf = std::sqrt(1.0 / static_cast<double>(cfg.layer_in(l)));
            for (std::size_t o = 0; o < cfg.hidden_channels; ++o)
                for (std::size_t i = 0; i < cfg.layer_in(l); ++i)
                    p.flat[p.proj_w(l, o, i)] = (2.0 * rng.next_double() - 1.0) * phalf;
        }
    }
    double fhalf = std::sqrt(1.0 / static_cast<double>(cfg.hidden_channels));
    for (std::size_t e = 0; e < cfg.embedding_dim; ++e)
        for (std::size_t h = 0; h < cfg.hidden_channels; ++h)
            p.flat[p.final_w(e, h)] = (2.0 * rng.next_double() - 1.0) * fhalf;
    return p;
}

struct Embedding {
    std::vector<double> values;
    std::string subject_id;
    std::size_t window_start = 0;
};

// Intermediates kept from a forward pass so backward() is exact.
struct ForwardCache {
    std::vector<Matrix> inputs;      // per layer, [in x T]
    std::vector<Matrix> preact;      // per layer, conv output before activation
    Matrix features;                 // last layer output [hidden x T] (pre-pooling)
    std::vector<double> pooled;      // [hidden]
    std::vector<std::size_t> argmax; // earliest maximal time index per channel
};

namespace detail {

// Causal dilated convolution: output[t] reads input at t, t-d, ..., t-(k-1)d
// with implicit zero left-padding, so output length equals input length.
inline Matrix causal_conv(const EncoderParams& p, std::size_t layer, const Matrix& x) {
    const auto& cfg = p.config;
    std::size_t in = cfg.layer_in(layer), out = cfg.hidden_channels, k = cfg.kernel_size;
    std::size_t d = cfg.dilation(layer), T = x.cols;
    Matrix y(out, T);
    for (std::size_t o = 0; o < out; ++o) {
        double b = p.flat[p.conv_b(layer, o)];
        for (std::size_t t = 0; t < T; ++t) {
            double acc = b;
            for (std::size_t j = 0; j < k; ++j) {
                std::size_t back = (k - 1 - j) * d;
                if (back > t) continue;
                std::size_t src = t - back;
                for (std::size_t i = 0; i < in; ++i)
                    acc += p.flat[p.conv_w(layer, o, i, j)] * x(i, src);
            }
            y(o, t) = acc;
        }
    }
    return y;
}

inline double leaky(double x, double slope) { return x > 0.0 ? x : slope * x; }
// Derivative at exactly zero is defined as the leaky slope.
inline double leaky_grad(double x, double slope) { return x > 0.0 ? 1.0 : slope; }

}  // namespace detail

inline ForwardCache forward_cached(const EncoderParams& p, const Matrix& window) {
    const auto& cfg = p.config;
    if (window.rows != cfg.in_channels)
        throw std::invalid_argument("forward: channel count mismatch");
    if (window.cols < 1) throw std::invalid_argument("forward: empty window");

    ForwardCache cache;
    Matrix x = window;
    for (std::size_t l = 0; l < cfg.num_layers; ++l) {
        cache.inputs.push_back(x);
        Matrix pre = detail::causal_conv(p, l, x);
        cache.preact.push_back(pre);
        Matrix post(cfg.hidden_channels, x.cols);
        for (std::size_t o = 0; o < cfg.hidden_channels; ++o)
            for (std::size_t t = 0; t < x.cols; ++t)
                post(o, t) = detail::leaky(pre(o, t), cfg.leaky_slope);
        if (cfg.residual) {
            if (p.layer_has_proj(l)) {
                for (std::size_t o = 0; o < cfg.hidden_channels; ++o)
                    for (std::size_t t = 0; t < x.cols; ++t) {
                        double acc = 0.0;
                        for (std::size_t i = 0; i < cfg.layer_in(l); ++i)
                            acc += p.flat[p.proj_w(l, o, i)] * x(i, t);
                        post(o, t) += acc;
                    }
            } else {
                for (std::size_t o = 0; o < cfg.hidden_channels; ++o)
                    for (std::size_t t = 0; t < x.cols; ++t) post(o, t) += x(o, t);
            }
        }
        x = std::move(post);
    }
    cache.features = x;

    cache.pooled.assign(cfg.hidden_channels, 0.0);
    cache.argmax.assign(cfg.hidden_channels, 0);
    for (std::size_t o = 0; o < cfg.hidden_channels; ++o) {
        double best = cache.features(o, 0);
        std::size_t best_t = 0;
        for (std::size_t t = 1; t < cache.features.cols; ++t)
            if (cache.features(o, t) > best) {  // strict: ties go to the earliest index
                best = cache.features(o, t);
                best_t = t;
            }
        cache.pooled[o] = best;
        cache.argmax[o] = best_t;
    }
    return cache;
}

inline Embedding forward(const EncoderParams& p, const Matrix& window) {
    ForwardCache cache = forward_cached(p, window);
    const auto& cfg = p.config;
    Embedding e;
    e.values.assign(cfg.embedding_dim, 0.0);
    for (std::size_t d = 0; d < cfg.embedding_dim; ++d) {
        double acc = p.flat[p.final_b(d)];
        for (std::size_t h = 0; h < cfg.hidden_channels; ++h)
            acc += p.flat[p.final_w(d, h)] * cache.pooled[h];
        e.values[d] = acc;
    }
    return e;
}

// Accumulates d(embedding . upstream)/dparams into grad (same flat layout as
// params). Returns the gradient w.r.t. the input window.
inline Matrix backward(const EncoderParams& p, const Matrix& window, const ForwardCache& cache,
                       const std::vector<double>& upstream, std::vector<double>& grad) {
    const auto& cfg = p.config;
    if (upstream.size() != cfg.embedding_dim)
        throw std::invalid_argument("backward: upstream gradient dimension mismatch");
    if (grad.size() != p.count()) throw std::invalid_argument("backward: gradient buffer size");
    const std::size_t T = window.cols;

    // Linear layer.
    std::vector<double> d_pooled(cfg.hidden_channels, 0.0);
    for (std::size_t d = 0; d < cfg.embedding_dim; ++d) {
        grad[p.final_b(d)] += upstream[d];
        for (std::size_t h = 0; h < cfg.hidden_channels; ++h) {
            grad[p.final_w(d, h)] += upstream[d] * cache.pooled[h];
            d_pooled[h] += upstream[d] * p.flat[p.final_w(d, h)];
        }
    }

    // Max pool routes to the recorded argmax.
    Matrix d_post(cfg.hidden_channels, T);
    for (std::size_t h = 0; h < cfg.hidden_channels; ++h)
        d_post(h, cache.argmax[h]) += d_pooled[h];

    for (std::size_t li = cfg.num_layers; li-- > 0;) {
        const Matrix& x = cache.inputs[li];
        const Matrix& pre = cache.preact[li];
        std::size_t in = cfg.layer_in(li), k = cfg.kernel_size, dil = cfg.dilation(li);
        Matrix d_x(in, T);

        if (cfg.residual) {
            if (p.layer_has_proj(li)) {
                for (std::size_t o = 0; o < cfg.hidden_channels; ++o)
                    for (std::size_t t = 0; t < T; ++t) {
                        double g = d_post(o, t);
                        if (g == 0.0) continue;
                        for (std::size_t i = 0; i < in; ++i) {
                            grad[p.proj_w(li, o, i)] += g * x(i, t);
                            d_x(i, t) += g * p.flat[p.proj_w(li, o, i)];
                        }
                    }
            } else {
                for (std::size_t o = 0; o < cfg.hidden_channels; ++o)
                    for (std::size_t t = 0; t < T; ++t) d_x(o, t) += d_post(o, t);
            }
        }

        // Through the activation, then the convolution.
        for (std::size_t o = 0; o < cfg.hidden_channels; ++o)
            for (std::size_t t = 0; t < T; ++t) {
                double g = d_post(o, t) * detail::leaky_grad(pre(o, t), cfg.leaky_slope);
                if (g == 0.0) continue;
                grad[p.conv_b(li, o)] += g;
                for (std::size_t j = 0; j < k; ++j) {
                    std::size_t back = (k - 1 - j) * dil;
                    if (back > t) continue;
                    std::size_t src = t - back;
                    for (std::size_t i = 0; i < in; ++i) {
                        grad[p.conv_w(li, o, i, j)] += g * x(i, src);
                        d_x(i, src) += g * p.flat[p.conv_w(li, o, i, j)];
                    }
                }
            }
        d_post = std::move(d_x);
    }
    return d_post;
}

// Checkpoint = JSON manifest + little-endian float64 blob; round-trip is
// bit-exact.
inline void save_checkpoint(const EncoderParams& p, const std::string& prefix,
                            std::uint64_t seed = 0) {
    nlohmann::json manifest;
    manifest["format"] = "vitalemb-checkpoint-v1";
    manifest["seed"] = seed;
    manifest["config"] = {{"in_channels", p.config.in_channels},
                          {"hidden_channels", p.config.hidden_channels},
                          {"num_layers", p.config.num_layers},
                          {"kernel_size", p.config.kernel_size},
                          {"dilation_base", p.config.dilation_base},
                          {"embedding_dim", p.config.embedding_dim},
                          {"leaky_slope", p.config.leaky_slope},
                          {"residual", p.config.residual}};
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < p.config.num_layers; ++l)
        layers.push_back({{"in", p.config.layer_in(l)},
                          {"out", p.config.hidden_channels},
                          {"kernel", p.config.kernel_size},
                          {"dilation", p.config.dilation(l)},
                          {"has_projection", p.layer_has_proj(l)},
                          {"byte_offset", p.layer_offset(l) * sizeof(double)}});
    manifest["layers"] = layers;
    manifest["final_byte_offset"] = p.final_offset() * sizeof(double);
    manifest["param_count"] = p.count();

    std::ofstream jf(prefix + ".json");
    if (!jf) throw std::runtime_error("save_checkpoint: cannot open " + prefix + ".json");
    jf << manifest.dump(2) << '\n';

    std::ofstream bf(prefix + ".bin", std::ios::binary);
    if (!bf) throw std::runtime_error("save_checkpoint: cannot open " + prefix + ".bin");
    bf.write(reinterpret_cast<const char*>(p.flat.data()),
             static_cast<std::streamsize>(p.flat.size() * sizeof(double)));
}

inline EncoderParams load_checkpoint(const std::string& prefix) {
    std::ifstream jf(prefix + ".json");
    if (!jf) throw std::runtime_error("load_checkpoint: cannot open " + prefix + ".json");
    nlohmann::json manifest = nlohmann::json::parse(jf);
    if (manifest.value("format", "") != "vitalemb-checkpoint-v1")
        throw std::runtime_error("load_checkpoint: unknown checkpoint format");
    EncoderConfig cfg;
    const auto& c = manifest.at("config");
    cfg.in_channels = c.at("in_channels");
    cfg.hidden_channels = c.at("hidden_channels");
    cfg.num_layers = c.at("num_layers");
    cfg.kernel_size = c.at("kernel_size");
    cfg.dilation_base = c.at("dilation_base");
    cfg.embedding_dim = c.at("embedding_dim");
    cfg.leaky_slope = c.at("leaky_slope");
    cfg.residual = c.at("residual");
    cfg.validate();

    EncoderParams p;
    p.config = cfg;
    p.flat.assign(p.count(), 0.0);
    if (manifest.at("param_count").get<std::size_t>() != p.count())
        throw std::runtime_error("load_checkpoint: parameter count mismatch");
    std::ifstream bf(prefix + ".bin", std::ios::binary);
    if (!bf) throw std::runtime_error("load_checkpoint: cannot open " + prefix + ".bin");
    bf.read(reinterpret_cast<char*>(p.flat.data()),
            static_cast<std::streamsize>(p.flat.size() * sizeof(double)));
    if (static_cast<std::size_t>(bf.gcount()) != p.flat.size() * sizeof(double))
        throw std::runtime_error("load_checkpoint: truncated parameter blob");
    return p;
}

}  // namespace vitalemb
