#include "spikehar/lif.hpp"

#include <cmath>
#include <string>

namespace spikehar {

void LifConfig::validate() const {
    if (!(tau >= 0.0 && tau <= 1.0)) throw ArgumentError("LIF tau must be in [0, 1], got " + std::to_string(tau));
    if (!(v_th > 0.0)) throw ArgumentError("LIF v_th must be > 0, got " + std::to_string(v_th));
}

template <typename T>
T surrogate_grad_scalar(T v_pre, T v_th) {
    const T x = v_pre / v_th - T(1);
    const T g = T(1) - (x < T(0) ? -x : x);
    return g > T(0) ? g : T(0);
}

template <typename T>
T surrogate_ramp_scalar(T v_pre, T v_th) {
    if (v_pre <= T(0)) return T(0);
    if (v_pre >= T(2) * v_th) return v_th;
    if (v_pre <= v_th) return v_pre * v_pre / (T(2) * v_th);
    // falling side: integral of 2 - v/v_th
    return T(2) * v_pre - v_pre * v_pre / (T(2) * v_th) - v_th;
}

namespace detail {

template <typename T>
void lif_forward_row(const T* charges, std::int64_t stride, int steps, const LifConfig& config, T v0, bool relaxed,
                     T* v_pre, T* v_post, T* spikes) {
    const T tau = static_cast<T>(config.tau);
    const T v_th = static_cast<T>(config.v_th);
    T v = v0;
    for (int t = 0; t < steps; ++t) {
        const std::int64_t idx = static_cast<std::int64_t>(t) * stride;
        const T u = tau * v + charges[idx];
        T s;
        if (relaxed) {
            s = surrogate_ramp_scalar(u, v_th);
        } else {
            s = u > v_th ? T(1) : T(0);
        }
        T p;
        if (config.reset == ResetMode::Hard) {
            p = u * (T(1) - s);
        } else {
            p = u - s * v_th;
        }
        v_pre[idx] = u;
        if (v_post != nullptr) v_post[idx] = p;
        spikes[idx] = s;
        v = p;
    }
}

template <typename T>
void lif_backward_row(const T* grad_spikes, const T* v_pre, const T* spikes, std::int64_t stride, int steps,
                      const LifConfig& config, T* grad_charges) {
    const T tau = static_cast<T>(config.tau);
    const T v_th = static_cast<T>(config.v_th);
    const bool attached = config.reset_grad == ResetGrad::Attached;
    T grad_post = T(0);  // d(loss)/d(v_post[t]) flowing back from step t+1
    for (int t = steps - 1; t >= 0; --t) {
        const std::int64_t idx = static_cast<std::int64_t>(t) * stride;
        const T u = v_pre[idx];
        const T s = spikes[idx];
        const T sg = surrogate_grad_scalar(u, v_th);
        T dpost_du;
        if (config.reset == ResetMode::Hard) {
            dpost_du = (T(1) - s) - (attached ? u * sg : T(0));
        } else {
            dpost_du = T(1) - (attached ? v_th * sg : T(0));
        }
        const T grad_u = grad_spikes[idx] * sg + grad_post * dpost_du;
        grad_charges[idx] = grad_u;
        grad_post = tau * grad_u;
    }
}

template void lif_forward_row<float>(const float*, std::int64_t, int, const LifConfig&, float, bool, float*, float*,
                                     float*);
template void lif_forward_row<double>(const double*, std::int64_t, int, const LifConfig&, double, bool, double*,
                                      double*, double*);
template void lif_backward_row<float>(const float*, const float*, const float*, std::int64_t, int, const LifConfig&,
                                      float*);
template void lif_backward_row<double>(const double*, const double*, const double*, std::int64_t, int,
                                       const LifConfig&, double*);

}  // namespace detail

template <typename T>
LifTraceT<T> lif_forward(const TensorT<T>& charges, const LifConfig& config, const TensorT<T>& v0) {
    config.validate();
    if (charges.rank() != 2) throw DimensionError("lif_forward expects charges [steps, units], got " + charges.shape_str());
    const int steps = charges.dim(0), units = charges.dim(1);
    if (v0.rank() != 1 || v0.dim(0) != units) {
        throw DimensionError("lif_forward v0 shape " + v0.shape_str() + " does not match units " + std::to_string(units));
    }
    for (int t = 0; t < steps; ++t) {
        for (int j = 0; j < units; ++j) {
            if (!std::isfinite(static_cast<double>(charges.at2(t, j)))) {
                throw NumericError("non-finite charge at time step " + std::to_string(t));
            }
        }
    }
    LifTraceT<T> trace{TensorT<T>({steps, units}), TensorT<T>({steps, units}), TensorT<T>({steps, units})};
#pragma omp parallel for schedule(static)
    for (int j = 0; j < units; ++j) {
        detail::lif_forward_row(charges.data() + j, units, steps, config, v0[j], /*relaxed=*/false,
                                trace.v_pre.data() + j, trace.v_post.data() + j, trace.spikes.data() + j);
    }
    return trace;
}

template <typename T>
LifTraceT<T> lif_forward(const TensorT<T>& charges, const LifConfig& config) {
    if (charges.rank() != 2) throw DimensionError("lif_forward expects charges [steps, units], got " + charges.shape_str());
    return lif_forward(charges, config, TensorT<T>({charges.dim(1)}));
}

template <typename T>
TensorT<T> surrogate_grad(const TensorT<T>& v_pre, T v_th) {
    if (!(v_th > T(0))) throw ArgumentError("surrogate_grad v_th must be > 0");
    TensorT<T> out(v_pre.shape());
    const T* in = v_pre.data();
    T* op = out.data();
    const std::int64_t n = v_pre.size();
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) op[i] = surrogate_grad_scalar(in[i], v_th);
    return out;
}

template <typename T>
TensorT<T> lif_backward(const TensorT<T>& grad_spikes, const LifTraceT<T>& trace, const LifConfig& config) {
    config.validate();
    if (grad_spikes.shape() != trace.spikes.shape() || grad_spikes.shape() != trace.v_pre.shape()) {
        throw DimensionError("lif_backward shape mismatch: grad " + grad_spikes.shape_str() + ", trace " +
                             trace.spikes.shape_str());
    }
    if (grad_spikes.rank() != 2) throw DimensionError("lif_backward expects [steps, units], got " + grad_spikes.shape_str());
    const int steps = grad_spikes.dim(0), units = grad_spikes.dim(1);
    TensorT<T> grad_charges({steps, units});
#pragma omp parallel for schedule(static)
    for (int j = 0; j < units; ++j) {
        detail::lif_backward_row(grad_spikes.data() + j, trace.v_pre.data() + j, trace.spikes.data() + j, units, steps,
                                 config, grad_charges.data() + j);
    }
    return grad_charges;
}

template float surrogate_grad_scalar<float>(float, float);
template double surrogate_grad_scalar<double>(double, double);
template float surrogate_ramp_scalar<float>(float, float);
template double surrogate_ramp_scalar<double>(double, double);
template LifTraceT<float> lif_forward<float>(const TensorT<float>&, const LifConfig&, const TensorT<float>&);
template LifTraceT<double> lif_forward<double>(const TensorT<double>&, const LifConfig&, const TensorT<double>&);
template LifTraceT<float> lif_forward<float>(const TensorT<float>&, const LifConfig&);
template LifTraceT<double> lif_forward<double>(const TensorT<double>&, const LifConfig&);
template TensorT<float> surrogate_grad<float>(const TensorT<float>&, float);
template TensorT<double> surrogate_grad<double>(const TensorT<double>&, double);
template TensorT<float> lif_backward<float>(const TensorT<float>&, const LifTraceT<float>&, const LifConfig&);
template TensorT<double> lif_backward<double>(const TensorT<double>&, const LifTraceT<double>&, const LifConfig&);

}  // namespace spikehar
