#pragma once

#include "spikehar/kernels.hpp"
#include "spikehar/tensor.hpp"

namespace spikehar::ref {

// Naive single-threaded implementations, written independently of the
// kernels in spikehar::. They are the comparison baseline for the unit
// tests and the benchmark. Per-element reduction order matches the main
// kernels (ascending k; ascending (c_in, k)), so agreement is bitwise.

template <typename T>
TensorT<T> matmul(const TensorT<T>& a, const TensorT<T>& b);

template <typename T>
TensorT<T> conv1d(const TensorT<T>& input, const TensorT<T>& kernel, int stride, int padding);

template <typename T>
MaxPoolResult<T> maxpool1d(const TensorT<T>& input, int window, int stride);

// Softmax evaluated with double-width accumulation; tests compare the main
// kernel against this within tolerance rather than bitwise.
template <typename T>
TensorT<T> softmax_rows(const TensorT<T>& input);

}  // namespace spikehar::ref
