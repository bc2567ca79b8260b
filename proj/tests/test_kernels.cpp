#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spikehar/kernels.hpp"
#include "spikehar/reference.hpp"
#include "spikehar/rng.hpp"

using namespace spikehar;

namespace {

Tensor random_tensor(const std::vector<int>& shape, SeededRng& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t(shape);
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(rng.uniform(lo, hi));
    return t;
}

bool bitwise_equal(const Tensor& a, const Tensor& b) {
    return a.shape() == b.shape() &&
           std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(float)) == 0;
}

}  // namespace

TEST_CASE("matmul identity and projector") {
    const Tensor eye({2, 2}, {1, 0, 0, 1});
    const Tensor m({2, 2}, {1, 2, 3, 4});
    CHECK(bitwise_equal(matmul(eye, m), m));

    const Tensor proj({2, 2}, {1, 0, 0, 0});
    const Tensor b({2, 2}, {5, 6, 7, 8});
    const Tensor expected({2, 2}, {5, 6, 0, 0});
    CHECK(bitwise_equal(matmul(proj, b), expected));
}

TEST_CASE("matmul random case matches the naive oracle exactly") {
    SeededRng rng(3);
    const Tensor a = random_tensor({3, 4}, rng);
    const Tensor b = random_tensor({4, 2}, rng);
    CHECK(bitwise_equal(matmul(a, b), ref::matmul(a, b)));
}

TEST_CASE("matmul rejects mismatched shapes naming both") {
    const Tensor a({2, 3});
    const Tensor b({4, 2});
    CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("[2, 3]"), DimensionError);
    try {
        matmul(a, b);
    } catch (const DimensionError& e) {
        CHECK(std::string(e.what()).find("[4, 2]") != std::string::npos);
    }
}

TEST_CASE("conv1d identity kernel and box sum") {
    const Tensor x({1, 1, 3}, {1, 2, 3});
    const Tensor ident({1, 1, 1}, {1});
    CHECK(bitwise_equal(conv1d(x, ident, 1, 0), Tensor({1, 1, 3}, {1, 2, 3})));

    const Tensor box({1, 1, 3}, {1, 1, 1});
    CHECK(bitwise_equal(conv1d(x, box, 1, 0), Tensor({1, 1, 1}, {6})));
}

TEST_CASE("conv1d strided padded case matches the sliding-window oracle") {
    SeededRng rng(5);
    const Tensor x = random_tensor({2, 3, 16}, rng);
    const Tensor w = random_tensor({4, 3, 5}, rng);
    const Tensor out = conv1d(x, w, 2, 2);
    CHECK(out.shape() == std::vector<int>{2, 4, 8});
    CHECK(bitwise_equal(out, ref::conv1d(x, w, 2, 2)));
}

TEST_CASE("conv1d rejects kernels larger than the padded input") {
    const Tensor x({1, 1, 3});
    const Tensor w({1, 1, 6});
    CHECK_THROWS_AS(conv1d(x, w, 1, 1), DimensionError);
    CHECK_NOTHROW(conv1d(x, Tensor({1, 1, 5}), 1, 1));
}

TEST_CASE("maxpool1d values, indices, and tie-breaking") {
    const Tensor x({1, 1, 4}, {1, 3, 2, 4});
    const auto res = maxpool1d(x, 2, 2);
    CHECK(res.values.values() == std::vector<float>{3, 4});
    CHECK(res.argmax == std::vector<int>{1, 3});

    // Constant input: every window reports its first position.
    const Tensor c = Tensor::full({1, 2, 6}, 7.0f);
    const auto tied = maxpool1d(c, 3, 3);
    CHECK(tied.argmax == std::vector<int>{0, 3, 0, 3});
    CHECK(tied.values.values() == std::vector<float>(4, 7.0f));
}

TEST_CASE("maxpool1d random vector matches brute force") {
    SeededRng rng(9);
    const Tensor x = random_tensor({1, 1, 20}, rng);
    for (int window : {2, 3, 5}) {
        for (int stride : {1, 2, 3}) {
            const auto got = maxpool1d(x, window, stride);
            const auto want = ref::maxpool1d(x, window, stride);
            CHECK(bitwise_equal(got.values, want.values));
            CHECK(got.argmax == want.argmax);
        }
    }
    CHECK_THROWS_AS(maxpool1d(x, 21, 1), DimensionError);
}

TEST_CASE("kernels agree bitwise with the naive oracles on 100 random instances") {
    SeededRng rng(17);
    for (int it = 0; it < 100; ++it) {
        const int m = 1 + static_cast<int>(rng.uniform_int(6));
        const int k = 1 + static_cast<int>(rng.uniform_int(6));
        const int n = 1 + static_cast<int>(rng.uniform_int(6));
        const Tensor a = random_tensor({m, k}, rng);
        const Tensor b = random_tensor({k, n}, rng);
        REQUIRE(bitwise_equal(matmul(a, b), ref::matmul(a, b)));

        const int c_in = 1 + static_cast<int>(rng.uniform_int(3));
        const int c_out = 1 + static_cast<int>(rng.uniform_int(4));
        const int length = 4 + static_cast<int>(rng.uniform_int(12));
        const int kernel = 1 + static_cast<int>(rng.uniform_int(4));
        const int stride = 1 + static_cast<int>(rng.uniform_int(2));
        const int padding = static_cast<int>(rng.uniform_int(3));
        const Tensor x = random_tensor({2, c_in, length}, rng);
        const Tensor w = random_tensor({c_out, c_in, kernel}, rng);
        REQUIRE(bitwise_equal(conv1d(x, w, stride, padding), ref::conv1d(x, w, stride, padding)));

        const int win = 1 + static_cast<int>(rng.uniform_int(3));
        const auto got = maxpool1d(x, win, win);
        const auto want = ref::maxpool1d(x, win, win);
        REQUIRE(bitwise_equal(got.values, want.values));
        REQUIRE(got.argmax == want.argmax);
    }
}

#ifdef _OPENMP
TEST_CASE("kernel outputs are independent of the thread count") {
    SeededRng rng(23);
    const Tensor a = random_tensor({37, 29}, rng);
    const Tensor b = random_tensor({29, 41}, rng);
    const Tensor x = random_tensor({5, 4, 33}, rng);
    const Tensor w = random_tensor({6, 4, 5}, rng);

    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const Tensor mm1 = matmul(a, b);
    const Tensor cv1 = conv1d(x, w, 1, 2);
    omp_set_num_threads(saved > 1 ? saved : 4);
    const Tensor mm2 = matmul(a, b);
    const Tensor cv2 = conv1d(x, w, 1, 2);
    omp_set_num_threads(saved);

    CHECK(bitwise_equal(mm1, mm2));
    CHECK(bitwise_equal(cv1, cv2));
}
#endif

TEST_CASE("softmax symmetry and overflow safety") {
    const Tensor flat({1, 3}, {0, 0, 0});
    const Tensor s = softmax_rows(flat);
    for (int j = 0; j < 3; ++j) CHECK(s.at2(0, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));

    const Tensor spike({1, 3}, {1000, 0, 0});
    const Tensor sp = softmax_rows(spike);
    CHECK(sp.all_finite());
    CHECK(sp.at2(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sp.at2(0, 1) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("softmax matches the extended-precision oracle and rows sum to one") {
    SeededRng rng(31);
    for (double magnitude : {1.0, 100.0, 1e4}) {
        const Tensor x = random_tensor({8, 6}, rng, -magnitude, magnitude);
        const Tensor got = softmax_rows(x);
        const Tensor want = ref::softmax_rows(x);
        for (std::int64_t i = 0; i < got.size(); ++i) {
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-6));
        }
        for (int i = 0; i < 8; ++i) {
            double sum = 0.0;
            for (int j = 0; j < 6; ++j) sum += got.at2(i, j);
            CHECK(std::abs(sum - 1.0) < 1e-6);
        }
    }
}

TEST_CASE("kaiming init bounds, determinism, and mean") {
    SeededRng rng_a(1000), rng_b(1000);
    const Tensor a = init_kaiming<float>({10, 10}, 6, rng_a);
    const Tensor b = init_kaiming<float>({10, 10}, 6, rng_b);
    CHECK(bitwise_equal(a, b));
    for (std::int64_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] >= -1.0f);
        CHECK(a[i] <= 1.0f);
    }

    SeededRng rng(2);
    const Tensor big = init_kaiming<float>({100000}, 24, rng);
    double mean = 0.0;
    const double bound = std::sqrt(6.0 / 24.0);
    for (std::int64_t i = 0; i < big.size(); ++i) {
        CHECK(std::abs(big[i]) <= bound);
        mean += big[i];
    }
    mean /= static_cast<double>(big.size());
    CHECK(std::abs(mean) < 0.01);

    CHECK_THROWS_AS(init_kaiming<float>({4}, 0, rng), ArgumentError);
}
