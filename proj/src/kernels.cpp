#include "spikehar/kernels.hpp"

#include <cmath>
#include <string>

namespace spikehar {

int conv1d_out_len(int length, int kernel, int stride, int padding) {
    if (stride < 1) throw ArgumentError("conv1d stride must be >= 1, got " + std::to_string(stride));
    if (padding < 0) throw ArgumentError("conv1d padding must be >= 0, got " + std::to_string(padding));
    int padded = length + 2 * padding;
    if (kernel > padded) {
        throw DimensionError("conv1d kernel " + std::to_string(kernel) + " larger than padded input " +
                             std::to_string(padded));
    }
    return (padded - kernel) / stride + 1;
}

int maxpool1d_out_len(int length, int window, int stride) {
    if (window < 1 || stride < 1) throw ArgumentError("maxpool1d window and stride must be >= 1");
    if (window > length) {
        throw DimensionError("maxpool1d window " + std::to_string(window) + " larger than input length " +
                             std::to_string(length));
    }
    return (length - window) / stride + 1;
}

namespace serial {

template <typename T>
void matmul(const T* a, const T* b, T* out, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        T* out_row = out + static_cast<std::int64_t>(i) * n;
        for (int j = 0; j < n; ++j) out_row[j] = T(0);
        const T* a_row = a + static_cast<std::int64_t>(i) * k;
        for (int p = 0; p < k; ++p) {
            const T av = a_row[p];
            const T* b_row = b + static_cast<std::int64_t>(p) * n;
            for (int j = 0; j < n; ++j) out_row[j] += av * b_row[j];
        }
    }
}

template <typename T>
void matmul_acc(const T* a, const T* b, T* out, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        T* out_row = out + static_cast<std::int64_t>(i) * n;
        const T* a_row = a + static_cast<std::int64_t>(i) * k;
        for (int p = 0; p < k; ++p) {
            const T av = a_row[p];
            if (av == T(0)) continue;  // padding zeros contribute exact +0
            const T* b_row = b + static_cast<std::int64_t>(p) * n;
            for (int j = 0; j < n; ++j) out_row[j] += av * b_row[j];
        }
    }
}

template <typename T>
void im2col(const T* x, T* cols, int c_in, int L, int k, int stride, int padding) {
    const int l_out = conv1d_out_len(L, k, stride, padding);
    for (int l = 0; l < l_out; ++l) {
        T* row = cols + static_cast<std::int64_t>(l) * c_in * k;
        for (int ci = 0; ci < c_in; ++ci) {
            const T* x_row = x + static_cast<std::int64_t>(ci) * L;
            for (int kk = 0; kk < k; ++kk) {
                const int src = l * stride + kk - padding;
                row[static_cast<std::int64_t>(ci) * k + kk] = (src >= 0 && src < L) ? x_row[src] : T(0);
            }
        }
    }
}

template <typename T>
void maxpool1d(const T* x, T* y, int* arg, int c, int L, int window, int stride) {
    const int l_out = maxpool1d_out_len(L, window, stride);
    for (int ch = 0; ch < c; ++ch) {
        const T* x_row = x + static_cast<std::int64_t>(ch) * L;
        T* y_row = y + static_cast<std::int64_t>(ch) * l_out;
        int* a_row = arg + static_cast<std::int64_t>(ch) * l_out;
        for (int l = 0; l < l_out; ++l) {
            const int start = l * stride;
            T best = x_row[start];
            int best_idx = start;
            for (int o = 1; o < window; ++o) {
                const T v = x_row[start + o];
                if (v > best) {  // strict: ties keep the lowest index
                    best = v;
                    best_idx = start + o;
                }
            }
            y_row[l] = best;
            a_row[l] = best_idx;
        }
    }
}

template void matmul<float>(const float*, const float*, float*, int, int, int);
template void matmul<double>(const double*, const double*, double*, int, int, int);
template void matmul_acc<float>(const float*, const float*, float*, int, int, int);
template void matmul_acc<double>(const double*, const double*, double*, int, int, int);
template void im2col<float>(const float*, float*, int, int, int, int, int);
template void im2col<double>(const double*, double*, int, int, int, int, int);
template void maxpool1d<float>(const float*, float*, int*, int, int, int, int);
template void maxpool1d<double>(const double*, double*, int*, int, int, int, int);

}  // namespace serial

template <typename T>
TensorT<T> matmul(const TensorT<T>& a, const TensorT<T>& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
        throw DimensionError("matmul shape mismatch: " + a.shape_str() + " x " + b.shape_str());
    }
    const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
    TensorT<T> out({m, n});
    const T* ap = a.data();
    const T* bp = b.data();
    T* op = out.data();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
        serial::matmul(ap + static_cast<std::int64_t>(i) * k, bp, op + static_cast<std::int64_t>(i) * n, 1, k, n);
    }
    return out;
}

template <typename T>
TensorT<T> conv1d(const TensorT<T>& input, const TensorT<T>& kernel, int stride, int padding) {
    if (input.rank() != 3 || kernel.rank() != 3 || input.dim(1) != kernel.dim(1)) {
        throw DimensionError("conv1d shape mismatch: input " + input.shape_str() + ", kernel " + kernel.shape_str());
    }
    const int n = input.dim(0), c_in = input.dim(1), L = input.dim(2);
    const int c_out = kernel.dim(0), k = kernel.dim(2);
    const int l_out = conv1d_out_len(L, k, stride, padding);
    const int cik = c_in * k;

    // weights transposed to [c_in*k, c_out] so the matmul inner loop runs
    // over output channels
    std::vector<T> w2(static_cast<std::size_t>(cik) * c_out);
    for (int co = 0; co < c_out; ++co) {
        for (int a = 0; a < cik; ++a) {
            w2[static_cast<std::size_t>(a) * c_out + co] = kernel.data()[static_cast<std::int64_t>(co) * cik + a];
        }
    }

    TensorT<T> out({n, c_out, l_out});
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        std::vector<T> cols(static_cast<std::size_t>(l_out) * cik);
        std::vector<T> y2(static_cast<std::size_t>(l_out) * c_out);
        serial::im2col(input.data() + static_cast<std::int64_t>(i) * c_in * L, cols.data(), c_in, L, k, stride, padding);
        serial::matmul(cols.data(), w2.data(), y2.data(), l_out, cik, c_out);
        T* yi = out.data() + static_cast<std::int64_t>(i) * c_out * l_out;
        for (int l = 0; l < l_out; ++l) {
            for (int co = 0; co < c_out; ++co) {
                yi[static_cast<std::int64_t>(co) * l_out + l] = y2[static_cast<std::size_t>(l) * c_out + co];
            }
        }
    }
    return out;
}

template <typename T>
MaxPoolResult<T> maxpool1d(const TensorT<T>& input, int window, int stride) {
    if (input.rank() != 3) throw DimensionError("maxpool1d expects [n, c, L], got " + input.shape_str());
    const int n = input.dim(0), c = input.dim(1), L = input.dim(2);
    const int l_out = maxpool1d_out_len(L, window, stride);
    MaxPoolResult<T> res{TensorT<T>({n, c, l_out}), std::vector<int>(static_cast<std::size_t>(n) * c * l_out)};
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        serial::maxpool1d(input.data() + static_cast<std::int64_t>(i) * c * L,
                          res.values.data() + static_cast<std::int64_t>(i) * c * l_out,
                          res.argmax.data() + static_cast<std::int64_t>(i) * c * l_out, c, L, window, stride);
    }
    return res;
}

template <typename T>
TensorT<T> softmax_rows(const TensorT<T>& input) {
    if (input.rank() != 2) throw DimensionError("softmax_rows expects [n, k], got " + input.shape_str());
    const int n = input.dim(0), k = input.dim(1);
    TensorT<T> out({n, k});
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const T* row = input.data() + static_cast<std::int64_t>(i) * k;
        T* orow = out.data() + static_cast<std::int64_t>(i) * k;
        T mx = row[0];
        for (int j = 1; j < k; ++j) {
            if (row[j] > mx) mx = row[j];
        }
        T sum = T(0);
        for (int j = 0; j < k; ++j) {
            orow[j] = std::exp(row[j] - mx);
            sum += orow[j];
        }
        for (int j = 0; j < k; ++j) orow[j] /= sum;
    }
    return out;
}

template <typename T>
TensorT<T> init_kaiming(const std::vector<int>& shape, int fan_in, SeededRng& rng) {
    if (fan_in < 1) throw ArgumentError("init_kaiming fan_in must be >= 1, got " + std::to_string(fan_in));
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    TensorT<T> out(shape);
    for (std::int64_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<T>(rng.uniform(-bound, bound));
    }
    return out;
}

template TensorT<float> matmul<float>(const TensorT<float>&, const TensorT<float>&);
template TensorT<double> matmul<double>(const TensorT<double>&, const TensorT<double>&);
template TensorT<float> conv1d<float>(const TensorT<float>&, const TensorT<float>&, int, int);
template TensorT<double> conv1d<double>(const TensorT<double>&, const TensorT<double>&, int, int);
template MaxPoolResult<float> maxpool1d<float>(const TensorT<float>&, int, int);
template MaxPoolResult<double> maxpool1d<double>(const TensorT<double>&, int, int);
template TensorT<float> softmax_rows<float>(const TensorT<float>&);
template TensorT<double> softmax_rows<double>(const TensorT<double>&);
template TensorT<float> init_kaiming<float>(const std::vector<int>&, int, SeededRng&);
template TensorT<double> init_kaiming<double>(const std::vector<int>&, int, SeededRng&);

}  // namespace spikehar
