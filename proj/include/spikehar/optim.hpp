#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "spikehar/tensor.hpp"

namespace spikehar {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected Adam. Moment buffers are created from the parameter list at
// construction and owned here; step() rejects non-finite gradients before
// touching any parameter.
template <typename T>
class AdamT {
public:
    AdamT(const std::vector<TensorT<T>*>& params, AdamConfig config = {});

    void step(const std::vector<TensorT<T>*>& params, const std::vector<TensorT<T>*>& grads, double lr);

    std::int64_t step_count() const { return step_; }
    const TensorT<T>& first_moment(std::size_t i) const { return m_[i]; }
    const TensorT<T>& second_moment(std::size_t i) const { return v_[i]; }

private:
    AdamConfig config_;
    std::int64_t step_ = 0;
    std::vector<TensorT<T>> m_, v_;
};

using Adam = AdamT<float>;

struct LrSchedule {
    double base_lr = 1e-3;
    int total_epochs = 60;
    double eta_min = 0.0;
};

// Cosine annealing: eta_min + (base - eta_min) * (1 + cos(pi * e / total)) / 2.
// Valid for 0 <= epoch <= total_epochs.
double cosine_lr(int epoch, const LrSchedule& schedule);

// Mean over the batch of -log softmax[label]; gradient is
// (softmax - onehot) / n. Labels must lie in [0, class_count).
template <typename T>
std::pair<double, TensorT<T>> cross_entropy(const TensorT<T>& logits, const std::vector<int>& labels);

extern template class AdamT<float>;
extern template class AdamT<double>;

}  // namespace spikehar
