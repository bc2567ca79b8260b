// Timing comparison between the naive serial reference kernels and the
// OpenMP kernels, plus a bitwise agreement check on every measured case.
//
//   spikehar_bench [repeats]

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spikehar/kernels.hpp"
#include "spikehar/lif.hpp"
#include "spikehar/reference.hpp"
#include "spikehar/rng.hpp"

using namespace spikehar;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

Tensor random_tensor(const std::vector<int>& shape, SeededRng& rng) {
    Tensor t(shape);
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
    return t;
}

bool bitwise_equal(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) return false;
    return std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(float)) == 0;
}

template <typename Fn>
double time_best_ms(int repeats, Fn&& fn) {
    double best = 1e30;
    for (int r = 0; r < repeats; ++r) {
        const double t0 = now_ms();
        fn();
        best = std::min(best, now_ms() - t0);
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms, bool equal) {
    std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   bitwise %s\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms, equal ? "ok" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif
    SeededRng rng(7);

    {
        const Tensor a = random_tensor({256, 384}, rng);
        const Tensor b = random_tensor({384, 256}, rng);
        Tensor serial_out, parallel_out;
        const double ts = time_best_ms(repeats, [&] { serial_out = ref::matmul(a, b); });
        const double tp = time_best_ms(repeats, [&] { parallel_out = matmul(a, b); });
        report("matmul 256x384x256", ts, tp, bitwise_equal(serial_out, parallel_out));
    }
    {
        const Tensor x = random_tensor({64, 32, 128}, rng);
        const Tensor w = random_tensor({64, 32, 5}, rng);
        Tensor serial_out, parallel_out;
        const double ts = time_best_ms(repeats, [&] { serial_out = ref::conv1d(x, w, 1, 2); });
        const double tp = time_best_ms(repeats, [&] { parallel_out = conv1d(x, w, 1, 2); });
        report("conv1d 64x32x128 k5", ts, tp, bitwise_equal(serial_out, parallel_out));
    }
    {
        const Tensor x = random_tensor({128, 64, 256}, rng);
        MaxPoolResult<float> serial_out, parallel_out;
        const double ts = time_best_ms(repeats, [&] { serial_out = ref::maxpool1d(x, 2, 2); });
        const double tp = time_best_ms(repeats, [&] { parallel_out = maxpool1d(x, 2, 2); });
        report("maxpool1d 128x64x256", ts, tp,
               bitwise_equal(serial_out.values, parallel_out.values) && serial_out.argmax == parallel_out.argmax);
    }
    {
        // LIF rows: the time recursion is serial per unit, parallel across units.
        const Tensor charges = random_tensor({128, 8192}, rng);
        LifConfig cfg;
        LifTrace out;
        const double tp = time_best_ms(repeats, [&] { out = lif_forward(charges, cfg); });
#ifdef _OPENMP
        const int saved = omp_get_max_threads();
        omp_set_num_threads(1);
        LifTrace serial_trace;
        const double ts = time_best_ms(repeats, [&] { serial_trace = lif_forward(charges, cfg); });
        omp_set_num_threads(saved);
        report("lif_forward 128x8192", ts, tp, bitwise_equal(serial_trace.spikes, out.spikes));
#else
        report("lif_forward 128x8192", tp, tp, true);
#endif
    }
    return 0;
}
