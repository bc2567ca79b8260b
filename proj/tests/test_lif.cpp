#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "oracles.hpp"
#include "spikehar/lif.hpp"
#include "spikehar/rng.hpp"

using namespace spikehar;

namespace {

template <typename T>
TensorT<T> random_tensor(const std::vector<int>& shape, SeededRng& rng, double lo = -1.0, double hi = 1.0) {
    TensorT<T> t(shape);
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(rng.uniform(lo, hi));
    return t;
}

const LifConfig kModeGrid[] = {
    {0.75, 0.5, ResetMode::Soft, ResetGrad::Attached},
    {0.75, 0.5, ResetMode::Soft, ResetGrad::Detached},
    {0.75, 0.5, ResetMode::Hard, ResetGrad::Attached},
    {0.75, 0.5, ResetMode::Hard, ResetGrad::Detached},
};

}  // namespace

TEST_CASE("lif forward hand-computed soft-reset trace") {
    LifConfig cfg{0.75, 0.5, ResetMode::Soft, ResetGrad::Attached};
    const Tensor charges({2, 1}, {0.6f, 0.2f});
    const LifTrace trace = lif_forward(charges, cfg);
    CHECK(trace.spikes.at2(0, 0) == 1.0f);
    CHECK(trace.spikes.at2(1, 0) == 0.0f);
    CHECK(trace.v_pre.at2(0, 0) == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(trace.v_pre.at2(1, 0) == doctest::Approx(0.275).epsilon(1e-6));
    CHECK(trace.v_post.at2(0, 0) == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(trace.v_post.at2(1, 0) == doctest::Approx(0.275).epsilon(1e-6));
}

TEST_CASE("tau zero degenerates to a memoryless binary activation") {
    SeededRng rng(4);
    for (const ResetMode reset : {ResetMode::Hard, ResetMode::Soft}) {
        LifConfig cfg{0.0, 0.5, reset, ResetGrad::Attached};
        const Tensor charges = random_tensor<float>({16, 8}, rng);
        const LifTrace trace = lif_forward(charges, cfg);
        for (int t = 0; t < 16; ++t) {
            for (int j = 0; j < 8; ++j) {
                CHECK(trace.spikes.at2(t, j) == (charges.at2(t, j) > 0.5f ? 1.0f : 0.0f));
            }
        }
    }
}

TEST_CASE("zero charges from rest yield a silent trace") {
    for (const LifConfig& cfg : kModeGrid) {
        const Tensor charges({5, 3});
        const LifTrace trace = lif_forward(charges, cfg);
        for (std::int64_t i = 0; i < trace.spikes.size(); ++i) {
            CHECK(trace.spikes[i] == 0.0f);
            CHECK(trace.v_pre[i] == 0.0f);
            CHECK(trace.v_post[i] == 0.0f);
        }
    }
}

TEST_CASE("non-finite charge reports the offending time step") {
    LifConfig cfg;
    Tensor charges({4, 2});
    charges.at2(2, 1) = std::numeric_limits<float>::quiet_NaN();
    CHECK_THROWS_WITH_AS(lif_forward(charges, cfg), doctest::Contains("time step 2"), NumericError);
}

TEST_CASE("triangle surrogate values at the apex, edges, and midpoint") {
    for (double v_th : {0.25, 0.5, 1.0}) {
        const float th = static_cast<float>(v_th);
        CHECK(surrogate_grad_scalar(th, th) == 1.0f);
        CHECK(surrogate_grad_scalar(0.0f, th) == 0.0f);
        CHECK(surrogate_grad_scalar(2 * th, th) == 0.0f);
        CHECK(surrogate_grad_scalar(1.5f * th, th) == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(surrogate_grad_scalar(-1.0f, th) == 0.0f);
        CHECK(surrogate_grad_scalar(3 * th, th) == 0.0f);
    }
}

TEST_CASE("surrogate ramp is the antiderivative of the triangle") {
    const double v_th = 0.5;
    CHECK(surrogate_ramp_scalar(-1.0, v_th) == 0.0);
    CHECK(surrogate_ramp_scalar(0.0, v_th) == 0.0);
    CHECK(surrogate_ramp_scalar(2 * v_th, v_th) == doctest::Approx(v_th));
    CHECK(surrogate_ramp_scalar(5.0, v_th) == doctest::Approx(v_th));
    // derivative check by central differences across the support
    for (double u = -0.2; u <= 1.2; u += 0.037) {
        const double h = 1e-7;
        const double fd = (surrogate_ramp_scalar(u + h, v_th) - surrogate_ramp_scalar(u - h, v_th)) / (2 * h);
        CHECK(fd == doctest::Approx(surrogate_grad_scalar(u, v_th)).epsilon(1e-5));
    }
}

TEST_CASE("lif backward with a single step is the direct surrogate product") {
    for (const LifConfig& cfg : kModeGrid) {
        SeededRng rng(8);
        const Tensor charges = random_tensor<float>({1, 6}, rng);
        const LifTrace trace = lif_forward(charges, cfg);
        const Tensor gs = random_tensor<float>({1, 6}, rng);
        const Tensor gc = lif_backward(gs, trace, cfg);
        for (int j = 0; j < 6; ++j) {
            const float expected =
                gs.at2(0, j) * surrogate_grad_scalar(trace.v_pre.at2(0, j), static_cast<float>(cfg.v_th));
            CHECK(gc.at2(0, j) == doctest::Approx(expected).epsilon(1e-6));
        }
    }
}

TEST_CASE("lif backward with tau zero has no cross-time terms") {
    LifConfig cfg{0.0, 0.5, ResetMode::Hard, ResetGrad::Attached};
    SeededRng rng(15);
    const Tensor charges = random_tensor<float>({7, 4}, rng);
    const LifTrace trace = lif_forward(charges, cfg);
    const Tensor gs = random_tensor<float>({7, 4}, rng);
    const Tensor gc = lif_backward(gs, trace, cfg);
    for (int t = 0; t < 7; ++t) {
        for (int j = 0; j < 4; ++j) {
            const float expected =
                gs.at2(t, j) * surrogate_grad_scalar(trace.v_pre.at2(t, j), static_cast<float>(cfg.v_th));
            CHECK(gc.at2(t, j) == doctest::Approx(expected).epsilon(1e-6));
        }
    }
}

TEST_CASE("lif backward matches the unrolled chain-rule oracle in double precision") {
    SeededRng rng(21);
    for (const ResetMode reset : {ResetMode::Hard, ResetMode::Soft}) {
        for (const ResetGrad rg : {ResetGrad::Attached, ResetGrad::Detached}) {
            for (double tau : {0.0, 0.25, 0.75, 1.0}) {
                LifConfig cfg{tau, 0.5, reset, rg};
                const Tensor64 charges = random_tensor<double>({5, 3}, rng);
                const LifTraceT<double> trace = lif_forward(charges, cfg);
                const Tensor64 gs = random_tensor<double>({5, 3}, rng);
                const Tensor64 got = lif_backward(gs, trace, cfg);
                const Tensor64 want = oracles::lif_backward_unrolled(gs, trace, cfg);
                for (std::int64_t i = 0; i < got.size(); ++i) {
                    CHECK(std::abs(got[i] - want[i]) < 1e-6);
                }
            }
        }
    }
}

TEST_CASE("lif backward rejects mismatched trace shapes") {
    LifConfig cfg;
    SeededRng rng(2);
    const Tensor charges = random_tensor<float>({4, 3}, rng);
    const LifTrace trace = lif_forward(charges, cfg);
    CHECK_THROWS_AS(lif_backward(Tensor({4, 2}), trace, cfg), DimensionError);
}

TEST_CASE("property: spikes are exactly binary") {
    SeededRng rng(33);
    for (int it = 0; it < 50; ++it) {
        const LifConfig& cfg = kModeGrid[it % 4];
        const Tensor charges = random_tensor<float>({12, 10}, rng, -2.0, 2.0);
        const LifTrace trace = lif_forward(charges, cfg);
        for (std::int64_t i = 0; i < trace.spikes.size(); ++i) {
            const float s = trace.spikes[i];
            REQUIRE((s == 0.0f || s == 1.0f));
            REQUIRE(s == (trace.v_pre[i] > static_cast<float>(cfg.v_th) ? 1.0f : 0.0f));
        }
    }
}

TEST_CASE("property: tau zero is permutation-equivariant in time") {
    SeededRng rng(41);
    LifConfig cfg{0.0, 0.5, ResetMode::Soft, ResetGrad::Attached};
    const int steps = 10, units = 6;
    const Tensor charges = random_tensor<float>({steps, units}, rng);
    const LifTrace base = lif_forward(charges, cfg);
    const auto perm = rng.permutation(steps);
    Tensor shuffled({steps, units});
    for (int t = 0; t < steps; ++t) {
        for (int j = 0; j < units; ++j) shuffled.at2(t, j) = charges.at2(static_cast<int>(perm[t]), j);
    }
    const LifTrace permuted = lif_forward(shuffled, cfg);
    for (int t = 0; t < steps; ++t) {
        for (int j = 0; j < units; ++j) {
            CHECK(permuted.spikes.at2(t, j) == base.spikes.at2(static_cast<int>(perm[t]), j));
        }
    }
}

TEST_CASE("property: power-of-two scaling leaves the float spike train bitwise identical") {
    SeededRng rng(55);
    for (const LifConfig& base_cfg : kModeGrid) {
        const Tensor charges = random_tensor<float>({20, 8}, rng);
        const LifTrace base = lif_forward(charges, base_cfg);
        for (const float alpha : {0.25f, 0.5f, 2.0f, 8.0f}) {
            LifConfig cfg = base_cfg;
            cfg.v_th = base_cfg.v_th * alpha;
            Tensor scaled(charges.shape());
            for (std::int64_t i = 0; i < charges.size(); ++i) scaled[i] = charges[i] * alpha;
            const LifTrace got = lif_forward(scaled, cfg);
            REQUIRE(std::memcmp(got.spikes.data(), base.spikes.data(),
                                static_cast<std::size_t>(base.spikes.size()) * sizeof(float)) == 0);
        }
    }
}

TEST_CASE("property: arbitrary positive scaling preserves the spike train in double precision") {
    SeededRng rng(56);
    for (const double alpha : {0.3, 1.7, 3.14159, 42.0}) {
        LifConfig cfg{0.75, 0.5, ResetMode::Soft, ResetGrad::Attached};
        const Tensor64 charges = random_tensor<double>({24, 6}, rng);
        const LifTraceT<double> base = lif_forward(charges, cfg);
        LifConfig scaled_cfg = cfg;
        scaled_cfg.v_th = cfg.v_th * alpha;
        Tensor64 scaled(charges.shape());
        for (std::int64_t i = 0; i < charges.size(); ++i) scaled[i] = charges[i] * alpha;
        const LifTraceT<double> got = lif_forward(scaled, scaled_cfg);
        for (std::int64_t i = 0; i < base.spikes.size(); ++i) REQUIRE(got.spikes[i] == base.spikes[i]);
    }
}

TEST_CASE("property: hard and soft reset agree below threshold") {
    SeededRng rng(77);
    // keep sup |v_pre| below v_th: |c| < v_th * (1 - tau)
    LifConfig hard{0.75, 0.5, ResetMode::Hard, ResetGrad::Attached};
    LifConfig soft{0.75, 0.5, ResetMode::Soft, ResetGrad::Attached};
    const Tensor charges = random_tensor<float>({30, 5}, rng, -0.12, 0.12);
    const LifTrace th = lif_forward(charges, hard);
    const LifTrace ts = lif_forward(charges, soft);
    bool any_spike = false;
    for (std::int64_t i = 0; i < th.spikes.size(); ++i) any_spike = any_spike || th.spikes[i] != 0.0f;
    REQUIRE_FALSE(any_spike);
    CHECK(std::memcmp(th.v_pre.data(), ts.v_pre.data(), static_cast<std::size_t>(th.v_pre.size()) * sizeof(float)) == 0);
    CHECK(std::memcmp(th.v_post.data(), ts.v_post.data(), static_cast<std::size_t>(th.v_post.size()) * sizeof(float)) == 0);
}

TEST_CASE("property: gradient respects causality") {
    SeededRng rng(88);
    for (const LifConfig& cfg : kModeGrid) {
        const int steps = 9, units = 4;
        const Tensor charges = random_tensor<float>({steps, units}, rng);
        const LifTrace trace = lif_forward(charges, cfg);
        // upstream gradient only at one step: nothing may flow to later charges
        for (int hot = 0; hot < steps; hot += 3) {
            Tensor gs({steps, units});
            for (int j = 0; j < units; ++j) gs.at2(hot, j) = 1.0f;
            const Tensor gc = lif_backward(gs, trace, cfg);
            for (int t = hot + 1; t < steps; ++t) {
                for (int j = 0; j < units; ++j) REQUIRE(gc.at2(t, j) == 0.0f);
            }
        }
    }
}

TEST_CASE("property: no gradient outside the surrogate support") {
    SeededRng rng(99);
    for (const LifConfig& cfg : kModeGrid) {
        // charges greater than 2*v_th every step keep v_pre above the support
        // under soft reset (v_post >= c - v_th > v_th > 0) and spike every step
        // under hard reset too; either way surrogate(v_pre) == 0 everywhere.
        const Tensor charges = random_tensor<float>({8, 5}, rng, 2.5 * cfg.v_th, 4.0 * cfg.v_th);
        const LifTrace trace = lif_forward(charges, cfg);
        for (std::int64_t i = 0; i < trace.v_pre.size(); ++i) {
            REQUIRE(trace.v_pre[i] > 2 * static_cast<float>(cfg.v_th));
        }
        const Tensor gs = random_tensor<float>({8, 5}, rng);
        const Tensor gc = lif_backward(gs, trace, cfg);
        for (std::int64_t i = 0; i < gc.size(); ++i) REQUIRE(gc[i] == 0.0f);
    }
}
