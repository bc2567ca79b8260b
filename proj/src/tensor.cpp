#include "spikehar/tensor.hpp"

#include <cmath>
#include <sstream>

namespace spikehar {

std::string shape_to_string(const std::vector<int>& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ", ";
        os << shape[i];
    }
    os << ']';
    return os.str();
}

std::int64_t shape_product(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int d : shape) {
        if (d < 0) throw DimensionError("negative dimension in shape " + shape_to_string(shape));
        n *= d;
    }
    return n;
}

template <typename T>
TensorT<T>::TensorT(std::vector<int> shape)
    : shape_(std::move(shape)), data_(static_cast<std::size_t>(shape_product(shape_)), T(0)) {}

template <typename T>
TensorT<T>::TensorT(std::vector<int> shape, std::vector<T> values) : shape_(std::move(shape)), data_(std::move(values)) {
    if (shape_product(shape_) != static_cast<std::int64_t>(data_.size())) {
        throw DimensionError("value count " + std::to_string(data_.size()) + " does not match shape " +
                             shape_to_string(shape_));
    }
}

template <typename T>
TensorT<T> TensorT<T>::full(std::vector<int> shape, T value) {
    TensorT out(std::move(shape));
    for (auto& v : out.data_) v = value;
    return out;
}

template <typename T>
T& TensorT<T>::at2(int i, int j) {
    return const_cast<T&>(static_cast<const TensorT&>(*this).at2(i, j));
}

template <typename T>
const T& TensorT<T>::at2(int i, int j) const {
    if (rank() != 2) throw DimensionError("at2 on tensor of shape " + shape_str());
    return data_[static_cast<std::size_t>(static_cast<std::int64_t>(i) * dim(1) + j)];
}

template <typename T>
T& TensorT<T>::at3(int i, int j, int k) {
    return const_cast<T&>(static_cast<const TensorT&>(*this).at3(i, j, k));
}

template <typename T>
const T& TensorT<T>::at3(int i, int j, int k) const {
    if (rank() != 3) throw DimensionError("at3 on tensor of shape " + shape_str());
    return data_[static_cast<std::size_t>((static_cast<std::int64_t>(i) * dim(1) + j) * dim(2) + k)];
}

template <typename T>
bool TensorT<T>::all_finite() const {
    for (const T& v : data_) {
        if (!std::isfinite(static_cast<double>(v))) return false;
    }
    return true;
}

template class TensorT<float>;
template class TensorT<double>;

}  // namespace spikehar
