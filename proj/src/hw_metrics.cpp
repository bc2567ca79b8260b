#include "spikehar/hw_metrics.hpp"

#include <numeric>

#include "spikehar/errors.hpp"

namespace spikehar {

void EnergyModel::validate() const {
    if (!(e_mac > e_ac && e_ac > 0.0)) throw ArgumentError("energy model requires e_mac > e_ac > 0");
}

SparsityReport measure_sparsity(ModelT<float>& model, const WindowDataset& dataset, int batch_size) {
    dataset.validate();
    if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");

    std::vector<std::size_t> nl_indices;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        if (model.layers[i]->is_nonlinearity()) nl_indices.push_back(i);
    }
    std::vector<std::int64_t> zeros(nl_indices.size(), 0);
    std::vector<std::int64_t> totals(nl_indices.size(), 0);

    const int n = dataset.size();
    for (int begin = 0; begin < n; begin += batch_size) {
        const int count = std::min(batch_size, n - begin);
        std::vector<std::int64_t> idx(static_cast<std::size_t>(count));
        std::iota(idx.begin(), idx.end(), static_cast<std::int64_t>(begin));
        const TimeBatch batch = make_time_batch(dataset, idx);
        (void)model.forward(batch);
        for (std::size_t k = 0; k < nl_indices.size(); ++k) {
            zeros[k] += model.layers[nl_indices[k]]->last_zero_count();
            totals[k] += model.layers[nl_indices[k]]->last_activation_count();
        }
    }

    SparsityReport report;
    double weighted = 0.0;
    std::int64_t total_elems = 0;
    for (std::size_t k = 0; k < nl_indices.size(); ++k) {
        LayerSparsity row;
        row.layer = model.layers[nl_indices[k]]->name();
        row.element_count = totals[k];
        row.zero_fraction = totals[k] > 0 ? static_cast<double>(zeros[k]) / static_cast<double>(totals[k]) : 0.0;
        weighted += row.zero_fraction * static_cast<double>(totals[k]);
        total_elems += totals[k];
        report.layers.push_back(std::move(row));
    }
    report.weighted_average = total_elems > 0 ? weighted / static_cast<double>(total_elems) : 0.0;
    return report;
}

OpCounts count_ops(const ModelT<float>& model) {
    OpCounts counts;
    for (const auto& layer : model.layers) {
        if (layer->macs_per_step() > 0) {
            counts.layers.push_back({layer->name(), layer->macs_per_step()});
        }
    }
    return counts;
}

EnergyEstimate estimate_energy(const OpCounts& counts, const SparsityReport& sparsity, NeuronKind model_kind,
                               const EnergyModel& energy, int time_steps) {
    energy.validate();
    if (time_steps < 1) throw ArgumentError("estimate_energy needs time_steps >= 1");
    if (counts.layers.empty()) throw ArgumentError("estimate_energy needs at least one synaptic layer");
    if (model_kind == NeuronKind::Lif && sparsity.layers.size() + 1 < counts.layers.size()) {
        // Synaptic layer k > 0 draws its input rate from nonlinearity k-1; the
        // head has no nonlinearity after it, so one fewer entry is fine.
        throw ArgumentError("estimate_energy: sparsity report does not cover the synaptic layers");
    }

    EnergyEstimate est;
    for (std::size_t k = 0; k < counts.layers.size(); ++k) {
        EnergyRow row;
        row.layer = counts.layers[k].layer;
        row.op_count = counts.layers[k].macs_per_step;
        double term = 0.0;
        if (model_kind == NeuronKind::Relu) {
            row.input_rate = 1.0;
            term = static_cast<double>(row.op_count) * energy.e_mac * time_steps;
        } else if (k == 0) {
            // Real-valued sensor input each step: MAC work, full rate.
            row.input_rate = 1.0;
            term = static_cast<double>(row.op_count) * energy.e_mac * time_steps;
        } else {
            row.input_rate = 1.0 - sparsity.layers[k - 1].zero_fraction;
            term = static_cast<double>(row.op_count) * row.input_rate * energy.e_ac * time_steps;
        }
        row.energy_pj = term;
        est.total_pj += term;
        if (k > 0) est.total_excl_first_pj += term;
        est.rows.push_back(std::move(row));
    }
    return est;
}

EnergyComparison compare_energy(const EnergyEstimate& ann, const EnergyEstimate& snn) {
    if (ann.total_pj <= 0.0 || ann.total_excl_first_pj <= 0.0) {
        throw ArgumentError("compare_energy: baseline energy must be positive");
    }
    EnergyComparison cmp;
    cmp.ann_pj = ann.total_pj;
    cmp.snn_pj = snn.total_pj;
    cmp.ratio = snn.total_pj / ann.total_pj;
    cmp.ratio_excl_first = snn.total_excl_first_pj / ann.total_excl_first_pj;
    return cmp;
}

}  // namespace spikehar
