#include "spikehar/reference.hpp"

#include <cmath>

namespace spikehar::ref {

template <typename T>
TensorT<T> matmul(const TensorT<T>& a, const TensorT<T>& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
        throw DimensionError("matmul shape mismatch: " + a.shape_str() + " x " + b.shape_str());
    }
    const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
    TensorT<T> out({m, n});
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            T acc = T(0);
            for (int p = 0; p < k; ++p) acc += a.at2(i, p) * b.at2(p, j);
            out.at2(i, j) = acc;
        }
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
    TensorT<T> out({n, c_out, l_out});
    // explicit zero-padded copy of each sample; padded taps are summed as
    // real +0 terms
    const int padded_len = L + 2 * padding;
    std::vector<T> padded(static_cast<std::size_t>(c_in) * padded_len);
    for (int i = 0; i < n; ++i) {
        for (auto& v : padded) v = T(0);
        for (int ci = 0; ci < c_in; ++ci) {
            for (int s = 0; s < L; ++s) {
                padded[static_cast<std::size_t>(ci) * padded_len + s + padding] = input.at3(i, ci, s);
            }
        }
        for (int co = 0; co < c_out; ++co) {
            for (int l = 0; l < l_out; ++l) {
                T acc = T(0);
                for (int ci = 0; ci < c_in; ++ci) {
                    for (int kk = 0; kk < k; ++kk) {
                        acc += kernel.at3(co, ci, kk) * padded[static_cast<std::size_t>(ci) * padded_len + l * stride + kk];
                    }
                }
                out.at3(i, co, l) = acc;
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
    std::int64_t pos = 0;
    for (int i = 0; i < n; ++i) {
        for (int ch = 0; ch < c; ++ch) {
            for (int l = 0; l < l_out; ++l, ++pos) {
                int best = l * stride;
                for (int o = l * stride + 1; o < l * stride + window; ++o) {
                    if (input.at3(i, ch, o) > input.at3(i, ch, best)) best = o;
                }
                res.values.at3(i, ch, l) = input.at3(i, ch, best);
                res.argmax[static_cast<std::size_t>(pos)] = best;
            }
        }
    }
    return res;
}

template <typename T>
TensorT<T> softmax_rows(const TensorT<T>& input) {
    if (input.rank() != 2) throw DimensionError("softmax_rows expects [n, k], got " + input.shape_str());
    const int n = input.dim(0), k = input.dim(1);
    TensorT<T> out({n, k});
    for (int i = 0; i < n; ++i) {
        double mx = static_cast<double>(input.at2(i, 0));
        for (int j = 1; j < k; ++j) mx = std::max(mx, static_cast<double>(input.at2(i, j)));
        double sum = 0.0;
        for (int j = 0; j < k; ++j) sum += std::exp(static_cast<double>(input.at2(i, j)) - mx);
        for (int j = 0; j < k; ++j) {
            out.at2(i, j) = static_cast<T>(std::exp(static_cast<double>(input.at2(i, j)) - mx) / sum);
        }
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

}  // namespace spikehar::ref
