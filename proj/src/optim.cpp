#include "spikehar/optim.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spikehar/errors.hpp"

namespace spikehar {

template <typename T>
AdamT<T>::AdamT(const std::vector<TensorT<T>*>& params, AdamConfig config) : config_(config) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const TensorT<T>* p : params) {
        m_.emplace_back(p->shape());
        v_.emplace_back(p->shape());
    }
}

template <typename T>
void AdamT<T>::step(const std::vector<TensorT<T>*>& params, const std::vector<TensorT<T>*>& grads, double lr) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw DimensionError("adam step called with a different parameter list than it was built for");
    }
    if (!(lr > 0.0)) throw ArgumentError("adam step needs lr > 0, got " + std::to_string(lr));
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!grads[i]->all_finite()) {
            throw NumericError("non-finite gradient in parameter tensor " + std::to_string(i) + "; step aborted");
        }
        if (grads[i]->shape() != params[i]->shape()) {
            throw DimensionError("adam gradient shape " + grads[i]->shape_str() + " does not match parameter " +
                                 params[i]->shape_str());
        }
    }
    ++step_;
    const T beta1 = static_cast<T>(config_.beta1);
    const T beta2 = static_cast<T>(config_.beta2);
    const T eps = static_cast<T>(config_.eps);
    const T correction1 = static_cast<T>(1.0 - std::pow(config_.beta1, static_cast<double>(step_)));
    const T correction2 = static_cast<T>(1.0 - std::pow(config_.beta2, static_cast<double>(step_)));
    const T alpha = static_cast<T>(lr);
    for (std::size_t i = 0; i < params.size(); ++i) {
        T* w = params[i]->data();
        const T* g = grads[i]->data();
        T* m = m_[i].data();
        T* v = v_[i].data();
        const std::int64_t size = params[i]->size();
#pragma omp parallel for schedule(static)
        for (std::int64_t j = 0; j < size; ++j) {
            m[j] = beta1 * m[j] + (T(1) - beta1) * g[j];
            v[j] = beta2 * v[j] + (T(1) - beta2) * g[j] * g[j];
            const T m_hat = m[j] / correction1;
            const T v_hat = v[j] / correction2;
            w[j] -= alpha * m_hat / (std::sqrt(v_hat) + eps);
        }
    }
}

double cosine_lr(int epoch, const LrSchedule& schedule) {
    if (epoch < 0 || epoch > schedule.total_epochs) {
        throw ArgumentError("epoch " + std::to_string(epoch) + " outside schedule [0, " +
                            std::to_string(schedule.total_epochs) + "]");
    }
    const double frac = static_cast<double>(epoch) / static_cast<double>(schedule.total_epochs);
    return schedule.eta_min + (schedule.base_lr - schedule.eta_min) * (1.0 + std::cos(std::numbers::pi * frac)) / 2.0;
}

template <typename T>
std::pair<double, TensorT<T>> cross_entropy(const TensorT<T>& logits, const std::vector<int>& labels) {
    if (logits.rank() != 2) throw DimensionError("cross_entropy expects [n, k] logits, got " + logits.shape_str());
    const int n = logits.dim(0), k = logits.dim(1);
    if (static_cast<int>(labels.size()) != n) {
        throw DimensionError("cross_entropy got " + std::to_string(labels.size()) + " labels for " + std::to_string(n) +
                             " rows");
    }
    for (int i = 0; i < n; ++i) {
        if (labels[static_cast<std::size_t>(i)] < 0 || labels[static_cast<std::size_t>(i)] >= k) {
            throw ArgumentError("label " + std::to_string(labels[static_cast<std::size_t>(i)]) + " outside [0, " +
                                std::to_string(k) + ") at row " + std::to_string(i));
        }
    }
    TensorT<T> grad({n, k});
    double loss = 0.0;
    const T inv_n = T(1) / static_cast<T>(n);
    for (int i = 0; i < n; ++i) {
        const T* row = logits.data() + static_cast<std::int64_t>(i) * k;
        T* grow = grad.data() + static_cast<std::int64_t>(i) * k;
        T mx = row[0];
        for (int j = 1; j < k; ++j) {
            if (row[j] > mx) mx = row[j];
        }
        double sum = 0.0;
        for (int j = 0; j < k; ++j) sum += std::exp(static_cast<double>(row[j] - mx));
        const int y = labels[static_cast<std::size_t>(i)];
        loss += -(static_cast<double>(row[y] - mx) - std::log(sum));
        for (int j = 0; j < k; ++j) {
            const T p = static_cast<T>(std::exp(static_cast<double>(row[j] - mx)) / sum);
            grow[j] = (p - (j == y ? T(1) : T(0))) * inv_n;
        }
    }
    return {loss / n, std::move(grad)};
}

template class AdamT<float>;
template class AdamT<double>;
template std::pair<double, TensorT<float>> cross_entropy<float>(const TensorT<float>&, const std::vector<int>&);
template std::pair<double, TensorT<double>> cross_entropy<double>(const TensorT<double>&, const std::vector<int>&);

}  // namespace spikehar
