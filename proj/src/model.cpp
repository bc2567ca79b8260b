#include "spikehar/model.hpp"

#include <string>

#include "spikehar/errors.hpp"

namespace spikehar {

const char* neuron_kind_name(NeuronKind kind) { return kind == NeuronKind::Lif ? "lif" : "relu"; }

NeuronKind neuron_kind_from_name(const std::string& name) {
    if (name == "lif") return NeuronKind::Lif;
    if (name == "relu") return NeuronKind::Relu;
    throw ArgumentError("unknown neuron kind '" + name + "'");
}

void ModelSpec::validate() const {
    if (class_count < 2) throw ArgumentError("model spec needs class_count >= 2, got " + std::to_string(class_count));
    if (time_steps < 1 || input_channels < 1) throw ArgumentError("model spec needs time_steps and input_channels >= 1");
    if (hidden < 1) throw ArgumentError("model spec needs hidden >= 1");
    if (blocks.empty()) throw ArgumentError("model spec needs at least one conv block");
    for (const auto& b : blocks) {
        if (b.channels < 1 || b.kernel < 1 || b.stride < 1 || b.padding < 0 || b.pool < 0) {
            throw ArgumentError("invalid conv block in model spec");
        }
    }
    if (neuron == NeuronKind::Lif) lif.validate();
}

template <typename T>
ModelT<T> build_model(const ModelSpec& spec, bool relaxed_lif) {
    spec.validate();
    SeededRng rng(spec.seed);
    ModelT<T> model;
    auto add = [&model](std::unique_ptr<LayerT<T>> layer, std::string name) {
        layer->set_name(std::move(name));
        model.layers.push_back(std::move(layer));
    };
    auto add_nonlinearity = [&](int index) {
        if (spec.neuron == NeuronKind::Lif) {
            add(std::make_unique<LifLayerT<T>>(spec.lif, relaxed_lif), "lif" + std::to_string(index));
        } else {
            add(std::make_unique<ReluLayerT<T>>(), "relu" + std::to_string(index));
        }
    };

    // The per-slice signal starts as one channel over the sensor axis.
    int channels = 1;
    int length = spec.input_channels;
    int block_index = 0;
    for (const auto& b : spec.blocks) {
        ++block_index;
        add(std::make_unique<Conv1dLayerT<T>>(channels, length, b.channels, b.kernel, b.stride, b.padding, rng),
            "conv" + std::to_string(block_index));
        channels = b.channels;
        length = conv1d_out_len(length, b.kernel, b.stride, b.padding);
        add_nonlinearity(block_index);
        if (b.pool > 1 && length >= b.pool) {
            add(std::make_unique<MaxPool1dLayerT<T>>(channels, length, b.pool, b.pool), "pool" + std::to_string(block_index));
            length = maxpool1d_out_len(length, b.pool, b.pool);
        }
    }
    add(std::make_unique<FlattenLayerT<T>>(), "flatten");
    add(std::make_unique<DenseLayerT<T>>(channels * length, spec.hidden, rng), "dense1");
    add_nonlinearity(block_index + 1);
    add(std::make_unique<DenseLayerT<T>>(spec.hidden, spec.class_count, rng), "head");
    add(std::make_unique<TemporalReadoutLayerT<T>>(), "readout");
    return model;
}

ModelT<float> build_spike_cnn(const ModelSpec& spec) {
    if (spec.neuron != NeuronKind::Lif) throw ArgumentError("build_spike_cnn requires a Lif neuron spec");
    return build_model<float>(spec);
}

ModelT<float> build_relu_cnn(const ModelSpec& spec) {
    if (spec.neuron != NeuronKind::Relu) throw ArgumentError("build_relu_cnn requires a Relu neuron spec");
    return build_model<float>(spec);
}

template <typename T>
TensorT<T> readout_logits(const TimeBatchT<T>& output) {
    const int n = output.batch(), features = output.features(), steps = output.steps();
    TensorT<T> logits({n, features});
    const T* x = output.data.data();
    const T inv = T(1) / static_cast<T>(steps);
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(n) * features; ++r) {
        const T* row = x + r * steps;
        T acc = T(0);
        for (int t = 0; t < steps; ++t) acc += row[t];
        logits[r] = acc * inv;
    }
    return logits;
}

std::vector<int> argmax_rows(const Tensor& logits) {
    const int n = logits.dim(0), k = logits.dim(1);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int best = 0;
        for (int j = 1; j < k; ++j) {
            if (logits.at2(i, j) > logits.at2(i, best)) best = j;  // strict: ties keep the lowest index
        }
        labels[static_cast<std::size_t>(i)] = best;
    }
    return labels;
}

std::vector<int> predict(ModelT<float>& model, const TimeBatchT<float>& batch) {
    TimeBatch out = model.forward(batch);
    return argmax_rows(readout_logits(out));
}

template ModelT<float> build_model<float>(const ModelSpec&, bool);
template ModelT<double> build_model<double>(const ModelSpec&, bool);
template TensorT<float> readout_logits<float>(const TimeBatchT<float>&);
template TensorT<double> readout_logits<double>(const TimeBatchT<double>&);

}  // namespace spikehar
