#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spikehar/errors.hpp"

namespace spikehar {

std::string shape_to_string(const std::vector<int>& shape);
std::int64_t shape_product(const std::vector<int>& shape);

// Dense row-major n-d array of a single scalar type. Owns its storage.
// float is the working precision; double instantiations back the
// high-precision oracle checks.
template <typename T>
class TensorT {
public:
    TensorT() = default;

    // Zero-initialised tensor of the given shape.
    explicit TensorT(std::vector<int> shape);

    TensorT(std::vector<int> shape, std::vector<T> values);

    static TensorT full(std::vector<int> shape, T value);

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& values() { return data_; }
    const std::vector<T>& values() const { return data_; }

    T& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    const T& operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

    // Rank-checked 2-d / 3-d element access used by tests and small code paths;
    // hot loops index the flat buffer directly.
    T& at2(int i, int j);
    const T& at2(int i, int j) const;
    T& at3(int i, int j, int k);
    const T& at3(int i, int j, int k) const;

    bool all_finite() const;
    std::string shape_str() const { return shape_to_string(shape_); }

    // Converts element-wise (float <-> double shadow precision).
    template <typename U>
    TensorT<U> cast() const {
        TensorT<U> out(shape_);
        for (std::int64_t i = 0; i < size(); ++i) {
            out[i] = static_cast<U>(data_[static_cast<std::size_t>(i)]);
        }
        return out;
    }

private:
    std::vector<int> shape_;
    std::vector<T> data_;
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

extern template class TensorT<float>;
extern template class TensorT<double>;

}  // namespace spikehar
