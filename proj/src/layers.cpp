#include "spikehar/layers.hpp"

#include <cmath>
#include <cstring>

#include "spikehar/errors.hpp"

namespace spikehar {

const char* layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::Dense: return "dense";
        case LayerKind::Conv1d: return "conv1d";
        case LayerKind::MaxPool1d: return "maxpool1d";
        case LayerKind::Lif: return "lif";
        case LayerKind::Relu: return "relu";
        case LayerKind::Flatten: return "flatten";
        case LayerKind::TemporalReadout: return "temporal_readout";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// TimeBatch

template <typename T>
TimeBatchT<T>::TimeBatchT(TensorT<T> d, int ch, int len) : data(std::move(d)), channels(ch), length(len) {
    if (data.rank() != 3) throw DimensionError("TimeBatch expects [n, features, steps], got " + data.shape_str());
    if (static_cast<std::int64_t>(ch) * len != data.dim(1)) {
        throw DimensionError("TimeBatch feature split " + std::to_string(ch) + "x" + std::to_string(len) +
                             " does not match feature axis " + std::to_string(data.dim(1)));
    }
}

template <typename T>
void TimeBatchT<T>::gather_slice(int t, T* out) const {
    const std::int64_t rows = static_cast<std::int64_t>(batch()) * features();
    const std::int64_t steps_n = steps();
    const T* src = data.data();
    for (std::int64_t r = 0; r < rows; ++r) out[r] = src[r * steps_n + t];
}

template <typename T>
void TimeBatchT<T>::scatter_slice(int t, const T* in) {
    const std::int64_t rows = static_cast<std::int64_t>(batch()) * features();
    const std::int64_t steps_n = steps();
    T* dst = data.data();
    for (std::int64_t r = 0; r < rows; ++r) dst[r * steps_n + t] = in[r];
}

template <typename T>
TensorT<T> TimeBatchT<T>::slice(int t) const {
    TensorT<T> out({batch(), features()});
    gather_slice(t, out.data());
    return out;
}

// ---------------------------------------------------------------------------
// LayerT base

template <typename T>
void LayerT<T>::consume_cache(const char* what) {
    if (!has_cache_) {
        throw StateError(std::string(what) + " called on layer '" + name_ + "' without a preceding forward");
    }
    has_cache_ = false;
}

template <typename T>
void LayerT<T>::record_zeros(const TensorT<T>& activations) {
    const T* p = activations.data();
    const std::int64_t n = activations.size();
    std::int64_t zeros = 0;
#pragma omp parallel for schedule(static) reduction(+ : zeros)
    for (std::int64_t i = 0; i < n; ++i) {
        if (p[i] == T(0)) ++zeros;
    }
    last_zero_count_ = zeros;
    last_activation_count_ = n;
}

template <typename T>
void LayerT<T>::zero_grads() {
    for (TensorT<T>* g : grads()) {
        for (std::int64_t i = 0; i < g->size(); ++i) (*g)[i] = T(0);
    }
}

// ---------------------------------------------------------------------------
// Dense

template <typename T>
DenseLayerT<T>::DenseLayerT(int in_features, int out_features, SeededRng& rng)
    : in_features_(in_features),
      out_features_(out_features),
      weight_(init_kaiming<T>({in_features, out_features}, in_features, rng)),
      bias_(TensorT<T>({out_features})),
      grad_weight_(TensorT<T>({in_features, out_features})),
      grad_bias_(TensorT<T>({out_features})) {
    if (in_features < 1 || out_features < 1) throw ArgumentError("dense layer needs positive feature counts");
}

template <typename T>
TimeBatchT<T> DenseLayerT<T>::forward(const TimeBatchT<T>& input) {
    if (input.features() != in_features_) {
        throw DimensionError("dense layer expects " + std::to_string(in_features_) + " features, got " +
                             std::to_string(input.features()));
    }
    const int n = input.batch(), steps = input.steps();
    TimeBatchT<T> out(TensorT<T>({n, out_features_, steps}), out_features_, 1);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < steps; ++t) {
        std::vector<T> x(static_cast<std::size_t>(n) * in_features_);
        std::vector<T> y(static_cast<std::size_t>(n) * out_features_);
        input.gather_slice(t, x.data());
        serial::matmul(x.data(), weight_.data(), y.data(), n, in_features_, out_features_);
        for (int i = 0; i < n; ++i) {
            T* row = y.data() + static_cast<std::int64_t>(i) * out_features_;
            for (int j = 0; j < out_features_; ++j) row[j] += bias_[j];
        }
        out.scatter_slice(t, y.data());
    }
    cached_input_ = input.data;  // copy; consumed by backward
    this->mark_forward();
    return out;
}

template <typename T>
TimeBatchT<T> DenseLayerT<T>::backward(const TimeBatchT<T>& grad_output) {
    this->consume_cache("backward");
    const int n = grad_output.batch(), steps = grad_output.steps();
    if (grad_output.features() != out_features_ || cached_input_.dim(0) != n || cached_input_.dim(2) != steps) {
        throw DimensionError("dense backward shape mismatch: grad " + grad_output.data.shape_str() + ", cached input " +
                             cached_input_.shape_str());
    }
    TimeBatchT<T> grad_in(TensorT<T>({n, in_features_, steps}), in_features_, 1);

    // input gradient through the transposed weights
    std::vector<T> w_t(static_cast<std::size_t>(out_features_) * in_features_);
    for (int a = 0; a < in_features_; ++a) {
        for (int b = 0; b < out_features_; ++b) {
            w_t[static_cast<std::size_t>(b) * in_features_ + a] = weight_.data()[static_cast<std::int64_t>(a) * out_features_ + b];
        }
    }
#pragma omp parallel for schedule(static)
    for (int t = 0; t < steps; ++t) {
        std::vector<T> g(static_cast<std::size_t>(n) * out_features_);
        std::vector<T> gx(static_cast<std::size_t>(n) * in_features_);
        grad_output.gather_slice(t, g.data());
        serial::matmul(g.data(), w_t.data(), gx.data(), n, out_features_, in_features_);
        grad_in.scatter_slice(t, gx.data());
    }

    // Weight gradient summed slice by slice in fixed (step, sample) order;
    // one worker per weight row.
    const T* x = cached_input_.data();
    const T* gout = grad_output.data.data();
    T* gw = grad_weight_.data();
    {
        std::vector<T> x_t(static_cast<std::size_t>(n) * in_features_);
        std::vector<T> g_t(static_cast<std::size_t>(n) * out_features_);
        for (int t = 0; t < steps; ++t) {
            for (std::int64_t r = 0; r < static_cast<std::int64_t>(n) * in_features_; ++r) {
                x_t[static_cast<std::size_t>(r)] = x[r * steps + t];
            }
            grad_output.gather_slice(t, g_t.data());
#pragma omp parallel for schedule(static)
            for (int a = 0; a < in_features_; ++a) {
                T* gw_row = gw + static_cast<std::int64_t>(a) * out_features_;
                for (int i = 0; i < n; ++i) {
                    const T xv = x_t[static_cast<std::size_t>(i) * in_features_ + a];
                    if (xv == T(0)) continue;
                    const T* gr = g_t.data() + static_cast<std::size_t>(i) * out_features_;
                    for (int b = 0; b < out_features_; ++b) gw_row[b] += xv * gr[b];
                }
            }
        }
    }
#pragma omp parallel for schedule(static)
    for (int b = 0; b < out_features_; ++b) {
        T acc = T(0);
        for (int i = 0; i < n; ++i) {
            const T* gr = gout + (static_cast<std::int64_t>(i) * out_features_ + b) * steps;
            for (int t = 0; t < steps; ++t) acc += gr[t];
        }
        grad_bias_[b] += acc;
    }
    cached_input_ = TensorT<T>();
    return grad_in;
}

// ---------------------------------------------------------------------------
// Conv1d

template <typename T>
Conv1dLayerT<T>::Conv1dLayerT(int in_channels, int in_length, int out_channels, int kernel, int stride, int padding,
                              SeededRng& rng)
    : in_channels_(in_channels),
      in_length_(in_length),
      out_channels_(out_channels),
      kernel_(kernel),
      stride_(stride),
      padding_(padding),
      out_length_(conv1d_out_len(in_length, kernel, stride, padding)),
      weight_(init_kaiming<T>({out_channels, in_channels, kernel}, in_channels * kernel, rng)),
      bias_(TensorT<T>({out_channels})),
      grad_weight_(TensorT<T>({out_channels, in_channels, kernel})),
      grad_bias_(TensorT<T>({out_channels})) {}

template <typename T>
TimeBatchT<T> Conv1dLayerT<T>::forward(const TimeBatchT<T>& input) {
    if (input.channels != in_channels_ || input.length != in_length_) {
        throw DimensionError("conv1d layer expects " + std::to_string(in_channels_) + "x" + std::to_string(in_length_) +
                             " per slice, got " + std::to_string(input.channels) + "x" + std::to_string(input.length));
    }
    const int n = input.batch(), steps = input.steps();
    const int f_in = in_channels_ * in_length_;
    const int f_out = out_channels_ * out_length_;
    const int cik = in_channels_ * kernel_;

    // weights transposed to [c_in*k, c_out] for a channel-contiguous matmul
    std::vector<T> w2(static_cast<std::size_t>(cik) * out_channels_);
    for (int co = 0; co < out_channels_; ++co) {
        for (int a = 0; a < cik; ++a) {
            w2[static_cast<std::size_t>(a) * out_channels_ + co] = weight_.data()[static_cast<std::int64_t>(co) * cik + a];
        }
    }

    TimeBatchT<T> out(TensorT<T>({n, f_out, steps}), out_channels_, out_length_);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < steps; ++t) {
        std::vector<T> x(static_cast<std::size_t>(n) * f_in);
        std::vector<T> y(static_cast<std::size_t>(n) * f_out);
        std::vector<T> cols(static_cast<std::size_t>(out_length_) * cik);
        std::vector<T> y2(static_cast<std::size_t>(out_length_) * out_channels_);
        input.gather_slice(t, x.data());
        for (int i = 0; i < n; ++i) {
            serial::im2col(x.data() + static_cast<std::int64_t>(i) * f_in, cols.data(), in_channels_, in_length_, kernel_,
                           stride_, padding_);
            serial::matmul(cols.data(), w2.data(), y2.data(), out_length_, cik, out_channels_);
            T* yi = y.data() + static_cast<std::int64_t>(i) * f_out;
            for (int l = 0; l < out_length_; ++l) {
                for (int co = 0; co < out_channels_; ++co) {
                    yi[static_cast<std::int64_t>(co) * out_length_ + l] =
                        y2[static_cast<std::size_t>(l) * out_channels_ + co] + bias_[co];
                }
            }
        }
        out.scatter_slice(t, y.data());
    }
    cached_input_ = input.data;
    this->mark_forward();
    return out;
}

template <typename T>
TimeBatchT<T> Conv1dLayerT<T>::backward(const TimeBatchT<T>& grad_output) {
    this->consume_cache("backward");
    const int n = grad_output.batch(), steps = grad_output.steps();
    if (grad_output.channels != out_channels_ || grad_output.length != out_length_ || cached_input_.dim(0) != n ||
        cached_input_.dim(2) != steps) {
        throw DimensionError("conv1d backward shape mismatch: grad " + grad_output.data.shape_str());
    }
    const int f_in = in_channels_ * in_length_;
    const int f_out = out_channels_ * out_length_;
    TimeBatchT<T> grad_in(TensorT<T>({n, f_in, steps}), in_channels_, in_length_);

    const int cik = in_channels_ * kernel_;
    const int rows = n * out_length_;

    // input gradient; the weight tensor viewed as [c_out, c_in*k] already has
    // the layout the patch-gradient matmul needs
#pragma omp parallel for schedule(static)
    for (int t = 0; t < steps; ++t) {
        std::vector<T> g(static_cast<std::size_t>(n) * f_out);
        std::vector<T> g2(static_cast<std::size_t>(out_length_) * out_channels_);
        std::vector<T> dcols(static_cast<std::size_t>(out_length_) * cik);
        std::vector<T> gx(static_cast<std::size_t>(n) * f_in, T(0));
        grad_output.gather_slice(t, g.data());
        for (int i = 0; i < n; ++i) {
            const T* gi = g.data() + static_cast<std::int64_t>(i) * f_out;
            for (int l = 0; l < out_length_; ++l) {
                for (int co = 0; co < out_channels_; ++co) {
                    g2[static_cast<std::size_t>(l) * out_channels_ + co] = gi[static_cast<std::int64_t>(co) * out_length_ + l];
                }
            }
            serial::matmul(g2.data(), weight_.data(), dcols.data(), out_length_, out_channels_, cik);
            T* gxi = gx.data() + static_cast<std::int64_t>(i) * f_in;
            for (int l = 0; l < out_length_; ++l) {
                const T* drow = dcols.data() + static_cast<std::size_t>(l) * cik;
                for (int ci = 0; ci < in_channels_; ++ci) {
                    for (int kk = 0; kk < kernel_; ++kk) {
                        const int src = l * stride_ + kk - padding_;
                        if (src < 0 || src >= in_length_) continue;
                        gxi[static_cast<std::int64_t>(ci) * in_length_ + src] += drow[static_cast<std::int64_t>(ci) * kernel_ + kk];
                    }
                }
            }
        }
        grad_in.scatter_slice(t, gx.data());
    }

    // weight gradient: serial over slices, each slice reduced through patch
    // matrices with one worker per weight row
    std::vector<T> dw2(static_cast<std::size_t>(cik) * out_channels_, T(0));
    {
        std::vector<T> x_t(static_cast<std::size_t>(n) * f_in);
        std::vector<T> g_t(static_cast<std::size_t>(n) * f_out);
        std::vector<T> xT(static_cast<std::size_t>(cik) * rows);
        std::vector<T> g2(static_cast<std::size_t>(rows) * out_channels_);
        const T* xc = cached_input_.data();
        for (int t = 0; t < steps; ++t) {
            for (std::int64_t r = 0; r < static_cast<std::int64_t>(n) * f_in; ++r) x_t[static_cast<std::size_t>(r)] = xc[r * steps + t];
            grad_output.gather_slice(t, g_t.data());
            for (int i = 0; i < n; ++i) {
                const T* xi = x_t.data() + static_cast<std::int64_t>(i) * f_in;
                const T* gi = g_t.data() + static_cast<std::int64_t>(i) * f_out;
                for (int l = 0; l < out_length_; ++l) {
                    const int r = i * out_length_ + l;
                    for (int ci = 0; ci < in_channels_; ++ci) {
                        for (int kk = 0; kk < kernel_; ++kk) {
                            const int src = l * stride_ + kk - padding_;
                            xT[(static_cast<std::size_t>(ci) * kernel_ + kk) * rows + r] =
                                (src >= 0 && src < in_length_) ? xi[static_cast<std::int64_t>(ci) * in_length_ + src] : T(0);
                        }
                    }
                    for (int co = 0; co < out_channels_; ++co) {
                        g2[static_cast<std::size_t>(r) * out_channels_ + co] = gi[static_cast<std::int64_t>(co) * out_length_ + l];
                    }
                }
            }
#pragma omp parallel for schedule(static)
            for (int a = 0; a < cik; ++a) {
                serial::matmul_acc(xT.data() + static_cast<std::size_t>(a) * rows, g2.data(),
                                   dw2.data() + static_cast<std::size_t>(a) * out_channels_, 1, rows, out_channels_);
            }
        }
    }
    T* gw = grad_weight_.data();
    for (int co = 0; co < out_channels_; ++co) {
        for (int a = 0; a < cik; ++a) {
            gw[static_cast<std::int64_t>(co) * cik + a] += dw2[static_cast<std::size_t>(a) * out_channels_ + co];
        }
    }

    const T* gout = grad_output.data.data();
#pragma omp parallel for schedule(static)
    for (int co = 0; co < out_channels_; ++co) {
        T acc = T(0);
        for (int i = 0; i < n; ++i) {
            const T* gbase = gout + (static_cast<std::int64_t>(i) * f_out + static_cast<std::int64_t>(co) * out_length_) * steps;
            for (int l = 0; l < out_length_; ++l) {
                const T* gr = gbase + static_cast<std::int64_t>(l) * steps;
                for (int t = 0; t < steps; ++t) acc += gr[t];
            }
        }
        grad_bias_[co] += acc;
    }
    cached_input_ = TensorT<T>();
    return grad_in;
}

// ---------------------------------------------------------------------------
// MaxPool1d

template <typename T>
MaxPool1dLayerT<T>::MaxPool1dLayerT(int channels, int in_length, int window, int stride)
    : channels_(channels),
      in_length_(in_length),
      window_(window),
      stride_(stride),
      out_length_(maxpool1d_out_len(in_length, window, stride)) {}

template <typename T>
TimeBatchT<T> MaxPool1dLayerT<T>::forward(const TimeBatchT<T>& input) {
    if (input.channels != channels_ || input.length != in_length_) {
        throw DimensionError("maxpool1d layer expects " + std::to_string(channels_) + "x" + std::to_string(in_length_) +
                             " per slice, got " + std::to_string(input.channels) + "x" + std::to_string(input.length));
    }
    const int n = input.batch(), steps = input.steps();
    const int f_in = channels_ * in_length_;
    const int f_out = channels_ * out_length_;
    TimeBatchT<T> out(TensorT<T>({n, f_out, steps}), channels_, out_length_);
    cached_argmax_.assign(static_cast<std::size_t>(n) * f_out * steps, 0);
    cached_batch_ = n;
    cached_steps_ = steps;
#pragma omp parallel for schedule(static)
    for (int t = 0; t < steps; ++t) {
        std::vector<T> x(static_cast<std::size_t>(n) * f_in);
        std::vector<T> y(static_cast<std::size_t>(n) * f_out);
        std::vector<int> arg(static_cast<std::size_t>(n) * f_out);
        input.gather_slice(t, x.data());
        for (int i = 0; i < n; ++i) {
            serial::maxpool1d(x.data() + static_cast<std::int64_t>(i) * f_in, y.data() + static_cast<std::int64_t>(i) * f_out,
                              arg.data() + static_cast<std::int64_t>(i) * f_out, channels_, in_length_, window_, stride_);
        }
        out.scatter_slice(t, y.data());
        for (std::int64_t r = 0; r < static_cast<std::int64_t>(n) * f_out; ++r) {
            cached_argmax_[static_cast<std::size_t>(r * steps + t)] = arg[static_cast<std::size_t>(r)];
        }
    }
    this->mark_forward();
    return out;
}

template <typename T>
TimeBatchT<T> MaxPool1dLayerT<T>::backward(const TimeBatchT<T>& grad_output) {
    this->consume_cache("backward");
    const int n = grad_output.batch(), steps = grad_output.steps();
    if (grad_output.channels != channels_ || grad_output.length != out_length_ || n != cached_batch_ ||
        steps != cached_steps_) {
        throw DimensionError("maxpool1d backward shape mismatch: grad " + grad_output.data.shape_str());
    }
    const int f_in = channels_ * in_length_;
    const int f_out = channels_ * out_length_;
    TimeBatchT<T> grad_in(TensorT<T>({n, f_in, steps}), channels_, in_length_);
    const T* g = grad_output.data.data();
    T* gx = grad_in.data.data();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < channels_; ++c) {
            for (int l = 0; l < out_length_; ++l) {
                const std::int64_t out_row = (static_cast<std::int64_t>(i) * f_out + static_cast<std::int64_t>(c) * out_length_ + l) * steps;
                for (int t = 0; t < steps; ++t) {
                    const int src = cached_argmax_[static_cast<std::size_t>(out_row + t)];
                    gx[(static_cast<std::int64_t>(i) * f_in + static_cast<std::int64_t>(c) * in_length_ + src) * steps + t] +=
                        g[out_row + t];
                }
            }
        }
    }
    cached_argmax_.clear();
    return grad_in;
}

// ---------------------------------------------------------------------------
// Lif

template <typename T>
LifLayerT<T>::LifLayerT(LifConfig config, bool relaxed) : config_(config), relaxed_(relaxed) {
    config_.validate();
}

template <typename T>
TimeBatchT<T> LifLayerT<T>::forward(const TimeBatchT<T>& input) {
    const int n = input.batch(), features = input.features(), steps = input.steps();
    TimeBatchT<T> out(TensorT<T>({n, features, steps}), input.channels, input.length);
    cached_v_pre_ = TensorT<T>({n, features, steps});
    const T* charges = input.data.data();
    T* v_pre = cached_v_pre_.data();
    T* spikes = out.data.data();
    const std::int64_t rows = static_cast<std::int64_t>(n) * features;
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < rows; ++r) {
        const std::int64_t base = r * steps;
        detail::lif_forward_row(charges + base, 1, steps, config_, T(0), relaxed_, v_pre + base, static_cast<T*>(nullptr),
                                spikes + base);
    }
    cached_spikes_ = out.data;
    cached_channels_ = input.channels;
    cached_length_ = input.length;
    this->record_zeros(out.data);
    this->mark_forward();
    return out;
}

template <typename T>
TimeBatchT<T> LifLayerT<T>::backward(const TimeBatchT<T>& grad_output) {
    this->consume_cache("backward");
    if (grad_output.data.shape() != cached_v_pre_.shape()) {
        throw DimensionError("lif backward shape mismatch: grad " + grad_output.data.shape_str() + ", trace " +
                             cached_v_pre_.shape_str());
    }
    const int steps = grad_output.steps();
    TimeBatchT<T> grad_in(TensorT<T>(cached_v_pre_.shape()), cached_channels_, cached_length_);
    const T* g = grad_output.data.data();
    const T* v_pre = cached_v_pre_.data();
    const T* spikes = cached_spikes_.data();
    T* gc = grad_in.data.data();
    const std::int64_t rows = grad_output.data.size() / steps;
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < rows; ++r) {
        const std::int64_t base = r * steps;
        detail::lif_backward_row(g + base, v_pre + base, spikes + base, 1, steps, config_, gc + base);
    }
    cached_v_pre_ = TensorT<T>();
    cached_spikes_ = TensorT<T>();
    return grad_in;
}

// ---------------------------------------------------------------------------
// Relu

template <typename T>
TimeBatchT<T> ReluLayerT<T>::forward(const TimeBatchT<T>& input) {
    TimeBatchT<T> out(TensorT<T>(input.data.shape()), input.channels, input.length);
    const T* x = input.data.data();
    T* y = out.data.data();
    const std::int64_t size = input.data.size();
    cached_mask_.assign(static_cast<std::size_t>(size), 0);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < size; ++i) {
        const bool pos = x[i] > T(0);
        y[i] = pos ? x[i] : T(0);
        cached_mask_[static_cast<std::size_t>(i)] = pos ? 1 : 0;
    }
    cached_shape_ = input.data.shape();
    cached_channels_ = input.channels;
    cached_length_ = input.length;
    this->record_zeros(out.data);
    this->mark_forward();
    return out;
}

template <typename T>
TimeBatchT<T> ReluLayerT<T>::backward(const TimeBatchT<T>& grad_output) {
    this->consume_cache("backward");
    if (grad_output.data.shape() != cached_shape_) {
        throw DimensionError("relu backward shape mismatch: grad " + grad_output.data.shape_str());
    }
    TimeBatchT<T> grad_in(TensorT<T>(cached_shape_), cached_channels_, cached_length_);
    const T* g = grad_output.data.data();
    T* gx = grad_in.data.data();
    const std::int64_t size = grad_output.data.size();
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < size; ++i) gx[i] = cached_mask_[static_cast<std::size_t>(i)] ? g[i] : T(0);
    cached_mask_.clear();
    return grad_in;
}

// ---------------------------------------------------------------------------
// Flatten

template <typename T>
TimeBatchT<T> FlattenLayerT<T>::forward(const TimeBatchT<T>& input) {
    cached_channels_ = input.channels;
    cached_length_ = input.length;
    this->mark_forward();
    return TimeBatchT<T>(input.data, input.features(), 1);
}

template <typename T>
TimeBatchT<T> FlattenLayerT<T>::backward(const TimeBatchT<T>& grad_output) {
    this->consume_cache("backward");
    if (grad_output.features() != cached_channels_ * cached_length_) {
        throw DimensionError("flatten backward shape mismatch: grad " + grad_output.data.shape_str());
    }
    return TimeBatchT<T>(grad_output.data, cached_channels_, cached_length_);
}

// ---------------------------------------------------------------------------
// TemporalReadout

template <typename T>
TimeBatchT<T> TemporalReadoutLayerT<T>::forward(const TimeBatchT<T>& input) {
    const int n = input.batch(), features = input.features(), steps = input.steps();
    if (steps < 1) throw DimensionError("temporal readout needs at least one step");
    TimeBatchT<T> out(TensorT<T>({n, features, 1}), input.channels, input.length);
    const T* x = input.data.data();
    T* y = out.data.data();
    const std::int64_t rows = static_cast<std::int64_t>(n) * features;
    const T inv = T(1) / static_cast<T>(steps);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < rows; ++r) {
        const T* xr = x + r * steps;
        T acc = T(0);
        for (int t = 0; t < steps; ++t) acc += xr[t];
        y[r] = acc * inv;
    }
    cached_steps_ = steps;
    this->mark_forward();
    return out;
}

template <typename T>
TimeBatchT<T> TemporalReadoutLayerT<T>::backward(const TimeBatchT<T>& grad_output) {
    this->consume_cache("backward");
    if (grad_output.steps() != 1) {
        throw DimensionError("temporal readout backward expects a single step, got " + grad_output.data.shape_str());
    }
    const int n = grad_output.batch(), features = grad_output.features();
    TimeBatchT<T> grad_in(TensorT<T>({n, features, cached_steps_}), grad_output.channels, grad_output.length);
    const T* g = grad_output.data.data();
    T* gx = grad_in.data.data();
    const std::int64_t rows = static_cast<std::int64_t>(n) * features;
    const T inv = T(1) / static_cast<T>(cached_steps_);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < rows; ++r) {
        const T gv = g[r] * inv;
        T* row = gx + r * cached_steps_;
        for (int t = 0; t < cached_steps_; ++t) row[t] = gv;
    }
    return grad_in;
}

// ---------------------------------------------------------------------------
// Model

template <typename T>
TimeBatchT<T> ModelT<T>::forward(const TimeBatchT<T>& input) {
    TimeBatchT<T> x = input;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        try {
            x = layers[i]->forward(x);
        } catch (const DimensionError& e) {
            throw DimensionError("layer " + std::to_string(i) + " ('" + layers[i]->name() + "'): " + e.what());
        }
    }
    return x;
}

template <typename T>
TimeBatchT<T> ModelT<T>::backward(const TimeBatchT<T>& grad_output) {
    TimeBatchT<T> g = grad_output;
    for (std::size_t i = layers.size(); i > 0; --i) {
        try {
            g = layers[i - 1]->backward(g);
        } catch (const DimensionError& e) {
            throw DimensionError("layer " + std::to_string(i - 1) + " ('" + layers[i - 1]->name() + "'): " + e.what());
        }
    }
    return g;
}

template <typename T>
std::vector<TensorT<T>*> ModelT<T>::params() const {
    std::vector<TensorT<T>*> out;
    for (const auto& l : layers) {
        for (TensorT<T>* p : l->params()) out.push_back(p);
    }
    return out;
}

template <typename T>
std::vector<TensorT<T>*> ModelT<T>::grads() const {
    std::vector<TensorT<T>*> out;
    for (const auto& l : layers) {
        for (TensorT<T>* g : l->grads()) out.push_back(g);
    }
    return out;
}

template <typename T>
std::vector<std::string> ModelT<T>::param_names() const {
    std::vector<std::string> out;
    for (const auto& l : layers) {
        for (const std::string& n : l->param_names()) out.push_back(l->name() + "." + n);
    }
    return out;
}

template <typename T>
void ModelT<T>::zero_grads() {
    for (const auto& l : layers) l->zero_grads();
}

template <typename T>
std::int64_t ModelT<T>::param_count() const {
    std::int64_t n = 0;
    for (TensorT<T>* p : params()) n += p->size();
    return n;
}

template <typename T>
std::vector<TensorT<T>> snapshot_params(const ModelT<T>& model) {
    std::vector<TensorT<T>> out;
    for (TensorT<T>* p : model.params()) out.push_back(*p);
    return out;
}

template <typename T>
void restore_params(ModelT<T>& model, const std::vector<TensorT<T>>& snapshot) {
    auto ps = model.params();
    if (ps.size() != snapshot.size()) throw DimensionError("parameter snapshot does not match model");
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (ps[i]->shape() != snapshot[i].shape()) throw DimensionError("parameter snapshot shape mismatch");
        *ps[i] = snapshot[i];
    }
}

template struct TimeBatchT<float>;
template struct TimeBatchT<double>;
template class LayerT<float>;
template class LayerT<double>;
template class DenseLayerT<float>;
template class DenseLayerT<double>;
template class Conv1dLayerT<float>;
template class Conv1dLayerT<double>;
template class MaxPool1dLayerT<float>;
template class MaxPool1dLayerT<double>;
template class LifLayerT<float>;
template class LifLayerT<double>;
template class ReluLayerT<float>;
template class ReluLayerT<double>;
template class FlattenLayerT<float>;
template class FlattenLayerT<double>;
template class TemporalReadoutLayerT<float>;
template class TemporalReadoutLayerT<double>;
template class ModelT<float>;
template class ModelT<double>;

template std::vector<TensorT<float>> snapshot_params<float>(const ModelT<float>&);
template std::vector<TensorT<double>> snapshot_params<double>(const ModelT<double>&);
template void restore_params<float>(ModelT<float>&, const std::vector<TensorT<float>>&);
template void restore_params<double>(ModelT<double>&, const std::vector<TensorT<double>>&);

}  // namespace spikehar
