#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spikehar/data.hpp"
#include "spikehar/model.hpp"

namespace spikehar {

struct LayerSparsity {
    std::string layer;
    std::int64_t element_count = 0;  // activations observed across the dataset
    double zero_fraction = 0.0;
};

struct SparsityReport {
    std::vector<LayerSparsity> layers;      // one entry per nonlinearity, in network order
    double weighted_average = 0.0;          // weighted by element count
};

// Fraction of exactly-zero activation outputs per nonlinearity, averaged over
// samples and time steps. Runs inference over the whole dataset in batches.
SparsityReport measure_sparsity(ModelT<float>& model, const WindowDataset& dataset, int batch_size = 128);

struct LayerOpCount {
    std::string layer;
    std::int64_t macs_per_step = 0;  // dense MAC positions per sample per time step
};

struct OpCounts {
    std::vector<LayerOpCount> layers;  // synaptic layers (conv/dense) in network order
};

OpCounts count_ops(const ModelT<float>& model);

// Per-operation energy constants in pJ; defaults are published 45 nm figures
// for a multiply-accumulate and an accumulate-only operation.
struct EnergyModel {
    double e_mac = 4.6;
    double e_ac = 0.9;

    void validate() const;
};

struct EnergyRow {
    std::string layer;
    std::int64_t op_count = 0;      // per sample per step
    double input_rate = 1.0;        // fraction of nonzero inputs feeding the layer
    double energy_pj = 0.0;
};

struct EnergyEstimate {
    std::vector<EnergyRow> rows;
    double total_pj = 0.0;
    double total_excl_first_pj = 0.0;  // without the first layer's real-valued MAC term
};

// Both networks process every step of a T-step window, so per-step op counts
// are scaled by T on both sides.
// ANN: dense MAC work at full rate,            count * e_mac * T per layer.
// SNN: first layer consumes real-valued input, count * e_mac * T;
//      deeper layers consume spikes and do accumulate-only work scaled by the
//      predecessor nonlinearity's firing rate,
//                                  count * (1 - sparsity) * e_ac * T.
EnergyEstimate estimate_energy(const OpCounts& counts, const SparsityReport& sparsity, NeuronKind model_kind,
                               const EnergyModel& energy, int time_steps);

struct EnergyComparison {
    double ann_pj = 0.0;
    double snn_pj = 0.0;
    double ratio = 0.0;             // snn / ann, ann normalized to 1
    double ratio_excl_first = 0.0;  // same with both first-layer terms removed
};

EnergyComparison compare_energy(const EnergyEstimate& ann, const EnergyEstimate& snn);

}  // namespace spikehar
