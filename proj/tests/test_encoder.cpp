#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <unistd.h>

#include "vitalemb/encoder.hpp"

using namespace vitalemb;

namespace {

EncoderConfig tiny_config() {
    EncoderConfig cfg;
    cfg.in_channels = 2;
    cfg.hidden_channels = 3;
    cfg.num_layers = 2;
    cfg.kernel_size = 3;
    cfg.dilation_base = 2;
    cfg.embedding_dim = 4;
    return cfg;
}

Matrix random_window(std::size_t channels, std::size_t length, std::uint64_t seed) {
    Matrix m(channels, length);
    Rng rng(seed);
    for (auto& v : m.data) v = rng.next_normal();
    return m;
}

// Impulse-propagation oracle: perturb one input timestep and count affected
// outputs of the final conv layer.
std::size_t impulse_receptive_field(const EncoderConfig& cfg) {
    std::size_t length = 4 * receptive_field(cfg);
    EncoderParams p = init_params(cfg, 5);
    // Make all kernel taps nonzero so the impulse cannot cancel.
    for (auto& v : p.flat) v = std::fabs(v) + 0.05;
    Matrix base = random_window(cfg.in_channels, length, 9);
    ForwardCache ref = forward_cached(p, base);
    Matrix bumped = base;
    std::size_t probe = length / 2;
    bumped(0, probe) += 1.0;
    ForwardCache got = forward_cached(p, bumped);
    std::size_t affected = 0;
    for (std::size_t t = 0; t < length; ++t) {
        bool diff = false;
        for (std::size_t c = 0; c < cfg.hidden_channels; ++c)
            if (got.features(c, t) != ref.features(c, t)) diff = true;
        if (diff) ++affected;
    }
    return affected;
}

}  // namespace

TEST_CASE("init_params is deterministic with zero biases and bounded kernels") {
    EncoderConfig cfg = tiny_config();
    EncoderParams a = init_params(cfg, 7);
    EncoderParams b = init_params(cfg, 7);
    CHECK(a.flat == b.flat);
    for (std::size_t l = 0; l < cfg.num_layers; ++l) {
        double bound = std::sqrt(1.0 / (static_cast<double>(cfg.layer_in(l)) *
                                        static_cast<double>(cfg.kernel_size)));
        for (std::size_t o = 0; o < cfg.hidden_channels; ++o) {
            CHECK(a.flat[a.conv_b(l, o)] == 0.0);
            for (std::size_t i = 0; i < cfg.layer_in(l); ++i)
                for (std::size_t j = 0; j < cfg.kernel_size; ++j)
                    CHECK(std::fabs(a.flat[a.conv_w(l, o, i, j)]) <= bound);
        }
    }
}

TEST_CASE("embedding dimension is independent of input length") {
    EncoderConfig cfg = tiny_config();
    EncoderParams p = init_params(cfg, 11);
    for (std::size_t length : {1u, 8u, 120u, 600u}) {
        Embedding e = forward(p, random_window(cfg.in_channels, length, length));
        CHECK(e.values.size() == cfg.embedding_dim);
        for (double v : e.values) CHECK(std::isfinite(v));
    }
}

TEST_CASE("forward is a pure function") {
    EncoderConfig cfg = tiny_config();
    EncoderParams p = init_params(cfg, 11);
    Matrix w = random_window(cfg.in_channels, 64, 13);
    Embedding a = forward(p, w);
    Embedding b = forward(p, w);
    CHECK(a.values == b.values);
}

TEST_CASE("causality: future perturbations leave past features bit-identical") {
    EncoderConfig cfg = tiny_config();
    EncoderParams p = init_params(cfg, 21);
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t length = 32 + static_cast<std::size_t>(rng.next_int(0, 32));
        Matrix base = random_window(cfg.in_channels, length, 1000 + trial);
        std::size_t cut = static_cast<std::size_t>(rng.next_int(1, length - 1));
        Matrix bumped = base;
        for (std::size_t c = 0; c < cfg.in_channels; ++c)
            for (std::size_t t = cut; t < length; ++t) bumped(c, t) += rng.next_normal();
        ForwardCache fa = forward_cached(p, base);
        ForwardCache fb = forward_cached(p, bumped);
        for (std::size_t c = 0; c < cfg.hidden_channels; ++c)
            for (std::size_t t = 0; t < cut; ++t)
                REQUIRE(fa.features(c, t) == fb.features(c, t));
    }
}

TEST_CASE("perturbing only the final timestep changes no earlier feature") {
    EncoderConfig cfg = tiny_config();
    EncoderParams p = init_params(cfg, 3);
    Matrix base = random_window(cfg.in_channels, 40, 5);
    Matrix bumped = base;
    bumped(1, 39) += 2.0;
    ForwardCache fa = forward_cached(p, base);
    ForwardCache fb = forward_cached(p, bumped);
    for (std::size_t c = 0; c < cfg.hidden_channels; ++c)
        for (std::size_t t = 0; t < 39; ++t) REQUIRE(fa.features(c, t) == fb.features(c, t));
}

TEST_CASE("identity 1x1 conv pools the channel maximum") {
    EncoderConfig cfg;
    cfg.in_channels = 1;
    cfg.hidden_channels = 1;
    cfg.num_layers = 1;
    cfg.kernel_size = 1;
    cfg.embedding_dim = 1;
    cfg.residual = false;
    EncoderParams p = init_params(cfg, 1);
    p.flat[p.conv_w(0, 0, 0, 0)] = 1.0;
    p.flat[p.conv_b(0, 0)] = 0.0;
    p.flat[p.final_w(0, 0)] = 1.0;
    p.flat[p.final_b(0)] = 0.0;
    Matrix w(1, 3);
    w(0, 0) = 1.0;
    w(0, 1) = 5.0;
    w(0, 2) = 3.0;
    Embedding e = forward(p, w);
    CHECK(e.values[0] == 5.0);
    CHECK(forward_cached(p, w).argmax[0] == 1);
}

TEST_CASE("max-pool ties break to the earliest index") {
    EncoderConfig cfg;
    cfg.in_channels = 1;
    cfg.hidden_channels = 1;
    cfg.num_layers = 1;
    cfg.kernel_size = 1;
    cfg.embedding_dim = 1;
    cfg.residual = false;
    EncoderParams p = init_params(cfg, 1);
    p.flat[p.conv_w(0, 0, 0, 0)] = 1.0;
    Matrix w(1, 4);
    w(0, 0) = 2.0;
    w(0, 1) = 7.0;
    w(0, 2) = 7.0;
    w(0, 3) = 1.0;
    CHECK(forward_cached(p, w).argmax[0] == 1);
}

TEST_CASE("receptive field formula matches the impulse oracle") {
    EncoderConfig cfg = tiny_config();
    cfg.num_layers = 3;
    CHECK(receptive_field(cfg) == 15);  // 1 + 2*(1+2+4)
    CHECK(impulse_receptive_field(cfg) == 15);

    cfg.kernel_size = 2;
    cfg.num_layers = 2;
    CHECK(receptive_field(cfg) == 4);  // 1 + 1*(1+2)
    CHECK(impulse_receptive_field(cfg) == 4);

    cfg.kernel_size = 1;
    cfg.num_layers = 1;
    CHECK(receptive_field(cfg) == 1);
}

TEST_CASE("zero upstream gradient gives zero parameter gradients") {
    EncoderConfig cfg = tiny_config();
    EncoderParams p = init_params(cfg, 31);
    Matrix w = random_window(cfg.in_channels, 16, 2);
    ForwardCache cache = forward_cached(p, w);
    std::vector<double> grad(p.count(), 0.0);
    backward(p, w, cache, std::vector<double>(cfg.embedding_dim, 0.0), grad);
    for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("gradient accumulation is additive over duplicated windows") {
    EncoderConfig cfg = tiny_config();
    EncoderParams p = init_params(cfg, 31);
    Matrix w = random_window(cfg.in_channels, 16, 2);
    ForwardCache cache = forward_cached(p, w);
    std::vector<double> upstream(cfg.embedding_dim);
    Rng rng(4);
    for (auto& u : upstream) u = rng.next_normal();
    std::vector<double> once(p.count(), 0.0), twice(p.count(), 0.0);
    backward(p, w, cache, upstream, once);
    backward(p, w, cache, upstream, twice);
    backward(p, w, cache, upstream, twice);
    for (std::size_t i = 0; i < once.size(); ++i)
        CHECK(twice[i] == Catch::Approx(2.0 * once[i]).margin(1e-12));
}

TEST_CASE("parameter gradients match central finite differences") {
    EncoderConfig cfg = tiny_config();
    cfg.num_layers = 1;
    EncoderParams p = init_params(cfg, 17);
    Matrix w = random_window(cfg.in_channels, 8, 23);
    std::vector<double> upstream(cfg.embedding_dim);
    Rng rng(6);
    for (auto& u : upstream) u = rng.next_normal();

    ForwardCache cache = forward_cached(p, w);
    std::vector<double> analytic(p.count(), 0.0);
    backward(p, w, cache, upstream, analytic);

    auto scalar = [&](const EncoderParams& params) {
        Embedding e = forward(params, w);
        return std::inner_product(e.values.begin(), e.values.end(), upstream.begin(), 0.0);
    };
    const double step = 1e-5;
    for (std::size_t i = 0; i < p.count(); ++i) {
        EncoderParams plus = p, minus = p;
        plus.flat[i] += step;
        minus.flat[i] -= step;
        double numeric = (scalar(plus) - scalar(minus)) / (2.0 * step);
        double denom = std::max({std::fabs(numeric), std::fabs(analytic[i]), 1e-8});
        REQUIRE(std::fabs(numeric - analytic[i]) / denom < 1e-4);
    }
}

TEST_CASE("checkpoint round-trip is bit-exact") {
    namespace fs = std::filesystem;
    EncoderConfig cfg = tiny_config();
    EncoderParams p = init_params(cfg, 99);
    fs::path dir = fs::temp_directory_path() / ("vitalemb_ckpt_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::string prefix = (dir / "ckpt").string();
    save_checkpoint(p, prefix, 99);
    EncoderParams loaded = load_checkpoint(prefix);
    CHECK(loaded.flat == p.flat);
    CHECK(loaded.config.embedding_dim == cfg.embedding_dim);
    Matrix w = random_window(cfg.in_channels, 32, 8);
    CHECK(forward(p, w).values == forward(loaded, w).values);
    fs::remove_all(dir);
}

TEST_CASE("channel mismatch raises a shape error") {
    EncoderConfig cfg = tiny_config();
    EncoderParams p = init_params(cfg, 1);
    CHECK_THROWS(forward(p, Matrix(cfg.in_channels + 1, 10)));
}
