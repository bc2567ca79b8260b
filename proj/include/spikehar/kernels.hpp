#pragma once

#include <cstdint>
#include <vector>

#include "spikehar/rng.hpp"
#include "spikehar/tensor.hpp"

namespace spikehar {

// Numeric kernels. Parallelism is only ever across independent output
// elements; every per-element reduction runs left to right in a fixed order,
// so results are bitwise identical for any thread count.

// a: [m, k], b: [k, n] -> [m, n]. Reduction order: ascending k.
template <typename T>
TensorT<T> matmul(const TensorT<T>& a, const TensorT<T>& b);

// input: [n, c_in, L], kernel: [c_out, c_in, k] -> [n, c_out, L_out] with
// L_out = floor((L + 2*padding - k) / stride) + 1, zero padding.
// Reduction order per output: ascending (c_in, k), out-of-range taps skipped.
template <typename T>
TensorT<T> conv1d(const TensorT<T>& input, const TensorT<T>& kernel, int stride, int padding);

int conv1d_out_len(int length, int kernel, int stride, int padding);
int maxpool1d_out_len(int length, int window, int stride);

template <typename T>
struct MaxPoolResult {
    TensorT<T> values;             // [n, c, L_out]
    std::vector<int> argmax;       // source position on the L axis, same layout
};

// Ties resolve to the lowest index so the backward routing is deterministic.
template <typename T>
MaxPoolResult<T> maxpool1d(const TensorT<T>& input, int window, int stride);

// input: [n, k]; rows sum to 1; computed with max subtraction.
template <typename T>
TensorT<T> softmax_rows(const TensorT<T>& input);

// Uniform in [-sqrt(6/fan_in), +sqrt(6/fan_in)], drawn in row-major order.
template <typename T>
TensorT<T> init_kaiming(const std::vector<int>& shape, int fan_in, SeededRng& rng);

// Single-threaded cores operating on raw buffers. The layer graph calls these
// from inside its own slice-parallel loops; the tensor-level kernels above
// wrap the same arithmetic with element-parallel scheduling, so either entry
// point produces identical bits. The inner loop always runs over the
// contiguous output axis: the per-element reduction order stays fixed
// (ascending k) while accumulation chains for different outputs overlap.
namespace serial {

// out[m, n] = a[m, k] * b[k, n]; out must not alias the inputs.
template <typename T>
void matmul(const T* a, const T* b, T* out, int m, int k, int n);

// out[m, n] += a[m, k] * b[k, n].
template <typename T>
void matmul_acc(const T* a, const T* b, T* out, int m, int k, int n);

// Patch matrix for one sample: x[c_in, L] -> cols[L_out, c_in*k], reading
// padding positions as explicit zeros, so downstream sums carry the same +0
// terms as the padded naive formulation.
template <typename T>
void im2col(const T* x, T* cols, int c_in, int L, int k, int stride, int padding);

// Single sample: x[c, L] -> y[c, L_out], arg[c, L_out] holding L-axis indices.
template <typename T>
void maxpool1d(const T* x, T* y, int* arg, int c, int L, int window, int stride);

}  // namespace serial

}  // namespace spikehar
