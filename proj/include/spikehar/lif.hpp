#pragma once

#include <cstdint>

#include "spikehar/tensor.hpp"

namespace spikehar {

enum class ResetMode { Hard, Soft };

// Whether the spike inside the reset update is differentiated through the
// surrogate (Attached) or treated as a constant (Detached) on the backward
// pass.
enum class ResetGrad { Attached, Detached };

struct LifConfig {
    double tau = 0.75;       // membrane decay factor, in [0, 1]
    double v_th = 0.5;       // firing threshold, > 0
    ResetMode reset = ResetMode::Soft;
    ResetGrad reset_grad = ResetGrad::Attached;

    void validate() const;
};

// Full record of one forward pass: pre-reset potentials, post-reset
// potentials, and the emitted spike train. All tensors are [steps, units].
template <typename T>
struct LifTraceT {
    TensorT<T> v_pre;
    TensorT<T> v_post;
    TensorT<T> spikes;
};

using LifTrace = LifTraceT<float>;

// Leaky integrate-and-fire dynamics over charges [steps, units]:
//   v_pre[t]  = tau * v_post[t-1] + charges[t]      (v_post[0] = v0)
//   spike[t]  = 1 if v_pre[t] > v_th else 0
//   v_post[t] = v_pre[t] * (1 - spike[t])           (hard reset)
//             = v_pre[t] - spike[t] * v_th          (soft reset)
// Throws NumericError naming the time step on non-finite charge.
template <typename T>
LifTraceT<T> lif_forward(const TensorT<T>& charges, const LifConfig& config, const TensorT<T>& v0);

template <typename T>
LifTraceT<T> lif_forward(const TensorT<T>& charges, const LifConfig& config);  // v0 = 0

// Triangle surrogate derivative of the fire step:
//   max(0, 1 - |v_pre / v_th - 1|)
// Unit peak at v_pre == v_th, support (0, 2*v_th).
template <typename T>
TensorT<T> surrogate_grad(const TensorT<T>& v_pre, T v_th);

template <typename T>
T surrogate_grad_scalar(T v_pre, T v_th);

// Antiderivative of the surrogate: a ramp from 0 at v_pre <= 0 to v_th at
// v_pre >= 2*v_th. Substituting it for the fire step yields the smooth
// relaxation used by the finite-difference gradient checks.
template <typename T>
T surrogate_ramp_scalar(T v_pre, T v_th);

// Exact backward pass through the unrolled time recursion. grad_spikes is
// d(loss)/d(spikes); returns d(loss)/d(charges). Gradient reaches charges[t]
// directly through the fire step at t and recurrently through the membrane
// chain v_pre -> v_post -> v_pre with factor tau per step; the reset's
// dependence on the spike is included through the surrogate when
// reset_grad == Attached.
template <typename T>
TensorT<T> lif_backward(const TensorT<T>& grad_spikes, const LifTraceT<T>& trace, const LifConfig& config);

namespace detail {

// Row cores over strided buffers; stride is the distance between consecutive
// time steps. The graph layers run these over contiguous rows, the
// tensor-level entry points above run them over [steps, units] columns.
template <typename T>
void lif_forward_row(const T* charges, std::int64_t stride, int steps, const LifConfig& config, T v0, bool relaxed,
                     T* v_pre, T* v_post, T* spikes);

template <typename T>
void lif_backward_row(const T* grad_spikes, const T* v_pre, const T* spikes, std::int64_t stride, int steps,
                      const LifConfig& config, T* grad_charges);

}  // namespace detail

}  // namespace spikehar
