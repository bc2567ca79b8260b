#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "spikehar/kernels.hpp"
#include "spikehar/lif.hpp"
#include "spikehar/rng.hpp"
#include "spikehar/tensor.hpp"

namespace spikehar {

// Batched time series carried between layers: data is [batch, features, steps]
// with the feature axis factored as channels x length. Spatial layers see each
// time slice as a [batch, channels, length] signal and share parameters across
// slices; spiking layers integrate along the step axis, which is contiguous in
// memory.
template <typename T>
struct TimeBatchT {
    TensorT<T> data;  // [n, channels*length, steps]
    int channels = 0;
    int length = 1;

    TimeBatchT() = default;
    TimeBatchT(TensorT<T> d, int ch, int len);

    int batch() const { return data.rank() == 3 ? data.dim(0) : 0; }
    int features() const { return channels * length; }
    int steps() const { return data.rank() == 3 ? data.dim(2) : 0; }

    // Contiguous copy of time slice t, laid out [batch, features].
    void gather_slice(int t, T* out) const;
    void scatter_slice(int t, const T* in);
    TensorT<T> slice(int t) const;
};

using TimeBatch = TimeBatchT<float>;

enum class LayerKind { Dense, Conv1d, MaxPool1d, Lif, Relu, Flatten, TemporalReadout };

const char* layer_kind_name(LayerKind kind);

// A layer owns its parameters, their gradient accumulators, and a single
// forward cache. The cache is written by forward and consumed by backward;
// backward without a fresh forward is a StateError.
template <typename T>
class LayerT {
public:
    virtual ~LayerT() = default;

    virtual LayerKind kind() const = 0;
    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    virtual TimeBatchT<T> forward(const TimeBatchT<T>& input) = 0;
    virtual TimeBatchT<T> backward(const TimeBatchT<T>& grad_output) = 0;

    virtual std::vector<TensorT<T>*> params() { return {}; }
    virtual std::vector<TensorT<T>*> grads() { return {}; }
    virtual std::vector<std::string> param_names() const { return {}; }
    void zero_grads();

    // Dense MAC positions evaluated per sample per time step; zero for
    // non-synaptic layers.
    virtual std::int64_t macs_per_step() const { return 0; }

    // Nonlinearities report exact-zero output counts from their latest
    // forward for sparsity measurement.
    virtual bool is_nonlinearity() const { return false; }
    std::int64_t last_zero_count() const { return last_zero_count_; }
    std::int64_t last_activation_count() const { return last_activation_count_; }

protected:
    void mark_forward() { has_cache_ = true; }
    void consume_cache(const char* what);
    void record_zeros(const TensorT<T>& activations);

    std::string name_;
    bool has_cache_ = false;
    std::int64_t last_zero_count_ = 0;
    std::int64_t last_activation_count_ = 0;
};

// Fully connected map applied independently at every time slice; consumes the
// flattened feature axis. weight is [in_features, out_features].
template <typename T>
class DenseLayerT final : public LayerT<T> {
public:
    DenseLayerT(int in_features, int out_features, SeededRng& rng);

    LayerKind kind() const override { return LayerKind::Dense; }
    TimeBatchT<T> forward(const TimeBatchT<T>& input) override;
    TimeBatchT<T> backward(const TimeBatchT<T>& grad_output) override;
    std::vector<TensorT<T>*> params() override { return {&weight_, &bias_}; }
    std::vector<TensorT<T>*> grads() override { return {&grad_weight_, &grad_bias_}; }
    std::vector<std::string> param_names() const override { return {"weight", "bias"}; }
    std::int64_t macs_per_step() const override {
        return static_cast<std::int64_t>(in_features_) * out_features_;
    }

    int in_features() const { return in_features_; }
    int out_features() const { return out_features_; }
    TensorT<T>& weight() { return weight_; }
    TensorT<T>& bias() { return bias_; }

private:
    int in_features_, out_features_;
    TensorT<T> weight_, bias_;
    TensorT<T> grad_weight_, grad_bias_;
    TensorT<T> cached_input_;
};

// 1-d convolution over the per-slice spatial axis, shared across time slices.
// weight is [out_channels, in_channels, kernel].
template <typename T>
class Conv1dLayerT final : public LayerT<T> {
public:
    Conv1dLayerT(int in_channels, int in_length, int out_channels, int kernel, int stride, int padding,
                 SeededRng& rng);

    LayerKind kind() const override { return LayerKind::Conv1d; }
    TimeBatchT<T> forward(const TimeBatchT<T>& input) override;
    TimeBatchT<T> backward(const TimeBatchT<T>& grad_output) override;
    std::vector<TensorT<T>*> params() override { return {&weight_, &bias_}; }
    std::vector<TensorT<T>*> grads() override { return {&grad_weight_, &grad_bias_}; }
    std::vector<std::string> param_names() const override { return {"weight", "bias"}; }
    std::int64_t macs_per_step() const override {
        return static_cast<std::int64_t>(out_channels_) * out_length_ * in_channels_ * kernel_;
    }

    int out_channels() const { return out_channels_; }
    int out_length() const { return out_length_; }

private:
    int in_channels_, in_length_, out_channels_, kernel_, stride_, padding_, out_length_;
    TensorT<T> weight_, bias_;
    TensorT<T> grad_weight_, grad_bias_;
    TensorT<T> cached_input_;
};

template <typename T>
class MaxPool1dLayerT final : public LayerT<T> {
public:
    MaxPool1dLayerT(int channels, int in_length, int window, int stride);

    LayerKind kind() const override { return LayerKind::MaxPool1d; }
    TimeBatchT<T> forward(const TimeBatchT<T>& input) override;
    TimeBatchT<T> backward(const TimeBatchT<T>& grad_output) override;

    int out_length() const { return out_length_; }

private:
    int channels_, in_length_, window_, stride_, out_length_;
    std::vector<int> cached_argmax_;  // [n, channels, out_length, steps] flat
    int cached_batch_ = 0, cached_steps_ = 0;
};

// Spiking nonlinearity: treats the step axis as membrane time. In relaxed
// mode the fire step is replaced by the surrogate's antiderivative ramp,
// which makes the layer smooth while leaving backward untouched; used by the
// finite-difference gradient checks.
template <typename T>
class LifLayerT final : public LayerT<T> {
public:
    explicit LifLayerT(LifConfig config, bool relaxed = false);

    LayerKind kind() const override { return LayerKind::Lif; }
    TimeBatchT<T> forward(const TimeBatchT<T>& input) override;
    TimeBatchT<T> backward(const TimeBatchT<T>& grad_output) override;
    bool is_nonlinearity() const override { return true; }

    const LifConfig& config() const { return config_; }
    bool relaxed() const { return relaxed_; }

private:
    LifConfig config_;
    bool relaxed_;
    TensorT<T> cached_v_pre_, cached_spikes_;
    int cached_channels_ = 0, cached_length_ = 1;
};

template <typename T>
class ReluLayerT final : public LayerT<T> {
public:
    ReluLayerT() = default;

    LayerKind kind() const override { return LayerKind::Relu; }
    TimeBatchT<T> forward(const TimeBatchT<T>& input) override;
    TimeBatchT<T> backward(const TimeBatchT<T>& grad_output) override;
    bool is_nonlinearity() const override { return true; }

private:
    std::vector<unsigned char> cached_mask_;
    std::vector<int> cached_shape_;
    int cached_channels_ = 0, cached_length_ = 1;
};

// Collapses channels x length into a flat feature axis (metadata only; the
// buffer layout is already flat).
template <typename T>
class FlattenLayerT final : public LayerT<T> {
public:
    FlattenLayerT() = default;

    LayerKind kind() const override { return LayerKind::Flatten; }
    TimeBatchT<T> forward(const TimeBatchT<T>& input) override;
    TimeBatchT<T> backward(const TimeBatchT<T>& grad_output) override;

private:
    int cached_channels_ = 0, cached_length_ = 1;
};

// Mean over the step axis; emits a single-step batch.
template <typename T>
class TemporalReadoutLayerT final : public LayerT<T> {
public:
    TemporalReadoutLayerT() = default;

    LayerKind kind() const override { return LayerKind::TemporalReadout; }
    TimeBatchT<T> forward(const TimeBatchT<T>& input) override;
    TimeBatchT<T> backward(const TimeBatchT<T>& grad_output) override;

private:
    int cached_steps_ = 0;
};

// Left-to-right layer composition. forward/backward report the first
// incompatibility with the offending layer's index and name.
template <typename T>
class ModelT {
public:
    std::vector<std::unique_ptr<LayerT<T>>> layers;

    TimeBatchT<T> forward(const TimeBatchT<T>& input);
    TimeBatchT<T> backward(const TimeBatchT<T>& grad_output);

    std::vector<TensorT<T>*> params() const;
    std::vector<TensorT<T>*> grads() const;
    std::vector<std::string> param_names() const;  // "layername.weight" style
    void zero_grads();
    std::int64_t param_count() const;
};

using Model = ModelT<float>;

template <typename T>
std::vector<TensorT<T>> snapshot_params(const ModelT<T>& model);

template <typename T>
void restore_params(ModelT<T>& model, const std::vector<TensorT<T>>& snapshot);

extern template struct TimeBatchT<float>;
extern template struct TimeBatchT<double>;
extern template class LayerT<float>;
extern template class LayerT<double>;
extern template class DenseLayerT<float>;
extern template class DenseLayerT<double>;
extern template class Conv1dLayerT<float>;
extern template class Conv1dLayerT<double>;
extern template class MaxPool1dLayerT<float>;
extern template class MaxPool1dLayerT<double>;
extern template class LifLayerT<float>;
extern template class LifLayerT<double>;
extern template class ReluLayerT<float>;
extern template class ReluLayerT<double>;
extern template class FlattenLayerT<float>;
extern template class FlattenLayerT<double>;
extern template class TemporalReadoutLayerT<float>;
extern template class TemporalReadoutLayerT<double>;
extern template class ModelT<float>;
extern template class ModelT<double>;

}  // namespace spikehar
