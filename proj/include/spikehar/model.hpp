#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spikehar/layers.hpp"
#include "spikehar/lif.hpp"

namespace spikehar {

enum class NeuronKind { Lif, Relu };

const char* neuron_kind_name(NeuronKind kind);
NeuronKind neuron_kind_from_name(const std::string& name);

struct ConvBlockSpec {
    int channels = 0;
    int kernel = 5;
    int stride = 1;
    int padding = 2;
    int pool = 2;  // max-pool window (== stride); skipped when the running length is smaller
};

// Declarative architecture description. A (spec, seed) pair fully determines
// every parameter shape and initial value.
struct ModelSpec {
    int input_channels = 9;  // sensor dimensions per time step
    int time_steps = 128;
    int class_count = 6;
    std::vector<ConvBlockSpec> blocks = {{64, 5, 1, 2, 2}, {128, 5, 1, 2, 2}, {256, 5, 1, 2, 2}};
    int hidden = 512;
    NeuronKind neuron = NeuronKind::Lif;
    LifConfig lif;
    std::uint64_t seed = 1000;

    void validate() const;
};

// Three conv blocks (conv -> nonlinearity -> pool) over the per-step sensor
// axis, then flatten -> dense -> nonlinearity -> dense head -> temporal mean.
// The head dense feeds the readout directly; no spiking on the head.
ModelT<float> build_spike_cnn(const ModelSpec& spec);
ModelT<float> build_relu_cnn(const ModelSpec& spec);

// Precision-parameterised builder used by the double-precision gradient
// checks; `relaxed_lif` swaps the fire step for its smooth ramp.
template <typename T>
ModelT<T> build_model(const ModelSpec& spec, bool relaxed_lif = false);

// Mean over the step axis of the head output: [n, classes, T] -> [n, classes].
template <typename T>
TensorT<T> readout_logits(const TimeBatchT<T>& output);

// Argmax of readout logits; ties resolve to the lowest class index.
std::vector<int> predict(ModelT<float>& model, const TimeBatchT<float>& batch);

std::vector<int> argmax_rows(const Tensor& logits);

// ---------------------------------------------------------------------------
// Checkpoint container: binary file with a JSON header describing the model
// spec and a tensor table, followed by raw little-endian float32 payload.
// Layout is documented in docs/formats.md.

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const ModelT<float>& model, const ModelSpec& spec);

struct LoadedCheckpoint {
    ModelSpec spec;
    ModelT<float> model;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace spikehar
