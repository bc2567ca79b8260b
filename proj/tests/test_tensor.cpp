#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spikehar/rng.hpp"
#include "spikehar/tensor.hpp"

using namespace spikehar;

TEST_CASE("tensor shape and storage agree") {
    Tensor t({2, 3, 4});
    CHECK(t.size() == 24);
    CHECK(t.rank() == 3);
    CHECK(t.all_finite());

    CHECK_THROWS_AS(Tensor({2, 2}, {1.0f, 2.0f, 3.0f}), DimensionError);

    Tensor m({2, 2}, {1.0f, 2.0f, 3.0f, 4.0f});
    CHECK(m.at2(0, 1) == 2.0f);
    CHECK(m.at2(1, 0) == 3.0f);
    CHECK(m.shape_str() == "[2, 2]");
}

TEST_CASE("tensor detects non-finite values") {
    Tensor t({3});
    CHECK(t.all_finite());
    t[1] = std::numeric_limits<float>::infinity();
    CHECK_FALSE(t.all_finite());
    t[1] = std::numeric_limits<float>::quiet_NaN();
    CHECK_FALSE(t.all_finite());
}

TEST_CASE("seeded rng reproduces its stream exactly") {
    SeededRng a(1000), b(1000), c(1001);
    bool all_equal = true;
    bool any_diff = false;
    for (int i = 0; i < 1000; ++i) {
        const auto va = a.next_u64();
        all_equal = all_equal && (va == b.next_u64());
        any_diff = any_diff || (va != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("mt19937_64 reference value pins the cross-platform stream") {
    // The standard fixes the 10000th output of a default-seeded mt19937_64.
    std::mt19937_64 engine(5489u);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i) v = engine();
    CHECK(v == 9981545732273789042ull);
}

TEST_CASE("rng uniform stays in range and permutations are valid") {
    SeededRng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform(-2.0, 3.0);
        CHECK(u >= -2.0);
        CHECK(u < 3.0);
    }
    auto perm = rng.permutation(100);
    std::vector<bool> seen(100, false);
    for (auto v : perm) {
        CHECK(v >= 0);
        CHECK(v < 100);
        CHECK_FALSE(seen[static_cast<std::size_t>(v)]);
        seen[static_cast<std::size_t>(v)] = true;
    }
}

TEST_CASE("rng normal has roughly standard moments") {
    SeededRng rng(11);
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal();
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
}
