#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spikehar/hw_metrics.hpp"
#include "spikehar/rng.hpp"

using namespace spikehar;

namespace {

ModelSpec tiny_spec(NeuronKind neuron = NeuronKind::Lif) {
    ModelSpec spec;
    spec.input_channels = 4;
    spec.time_steps = 8;
    spec.class_count = 3;
    spec.blocks = {{4, 3, 1, 1, 2}};
    spec.hidden = 6;
    spec.neuron = neuron;
    return spec;
}

WindowDataset zero_dataset(int n, int steps, int channels, int classes) {
    WindowDataset ds;
    ds.samples = Tensor({n, steps, channels});
    ds.labels.assign(static_cast<std::size_t>(n), 0);
    ds.class_count = classes;
    return ds;
}

WindowDataset random_dataset(int n, int steps, int channels, int classes, std::uint64_t seed) {
    WindowDataset ds = zero_dataset(n, steps, channels, classes);
    SeededRng rng(seed);
    for (std::int64_t i = 0; i < ds.samples.size(); ++i) ds.samples[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
    for (int i = 0; i < n; ++i) ds.labels[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_int(classes));
    return ds;
}

}  // namespace

TEST_CASE("zero input yields full sparsity in every lif layer") {
    const ModelSpec spec = tiny_spec();
    ModelT<float> model = build_spike_cnn(spec);
    const WindowDataset ds = zero_dataset(6, spec.time_steps, spec.input_channels, spec.class_count);
    const SparsityReport report = measure_sparsity(model, ds, 4);
    REQUIRE(report.layers.size() == 2);  // one lif per conv block + one after dense1
    for (const auto& row : report.layers) CHECK(row.zero_fraction == 1.0);
    CHECK(report.weighted_average == 1.0);
}

TEST_CASE("relu on symmetric zero-mean inputs sits near half sparsity") {
    ReluLayerT<float> relu;
    SeededRng rng(5);
    TensorT<float> data({8, 50, 64});
    for (std::int64_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
    (void)relu.forward(TimeBatchT<float>(std::move(data), 50, 1));
    const double sparsity =
        static_cast<double>(relu.last_zero_count()) / static_cast<double>(relu.last_activation_count());
    CHECK(sparsity == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("sparsity on binary spike tensors equals one minus the mean") {
    const ModelSpec spec = tiny_spec();
    ModelT<float> model = build_spike_cnn(spec);
    const WindowDataset ds = random_dataset(10, spec.time_steps, spec.input_channels, spec.class_count, 3);
    const SparsityReport report = measure_sparsity(model, ds, 10);

    // recompute by hand from a full forward over the dataset
    std::vector<std::int64_t> idx(10);
    for (int i = 0; i < 10; ++i) idx[static_cast<std::size_t>(i)] = i;
    TimeBatch x = make_time_batch(ds, idx);
    std::size_t li = 0;
    for (const auto& layer : model.layers) {
        x = layer->forward(x);
        if (layer->kind() == LayerKind::Lif) {
            double mean = 0.0;
            for (std::int64_t i = 0; i < x.data.size(); ++i) mean += x.data[i];
            mean /= static_cast<double>(x.data.size());
            CHECK(report.layers[li].zero_fraction == doctest::Approx(1.0 - mean).epsilon(1e-12));
            ++li;
        }
    }
    REQUIRE(li == report.layers.size());

    // weighted average lies within the per-layer range
    double lo = 1.0, hi = 0.0;
    for (const auto& row : report.layers) {
        lo = std::min(lo, row.zero_fraction);
        hi = std::max(hi, row.zero_fraction);
    }
    CHECK(report.weighted_average >= lo);
    CHECK(report.weighted_average <= hi);
}

TEST_CASE("op counts follow the shape formulas") {
    SeededRng rng(1);
    ModelT<float> model;
    model.layers.push_back(std::make_unique<DenseLayerT<float>>(10, 5, rng));
    model.layers[0]->set_name("dense");
    const OpCounts dense_counts = count_ops(model);
    REQUIRE(dense_counts.layers.size() == 1);
    CHECK(dense_counts.layers[0].macs_per_step == 50);

    ModelT<float> conv_model;
    conv_model.layers.push_back(std::make_unique<Conv1dLayerT<float>>(3, 16, 4, 5, 1, 2, rng));
    conv_model.layers[0]->set_name("conv");
    const OpCounts conv_counts = count_ops(conv_model);
    CHECK(conv_counts.layers[0].macs_per_step == 960);  // 4 * 16 * 3 * 5
}

TEST_CASE("reference network op table matches the hand-summed fixture") {
    ModelSpec spec;  // D=9, T=128 reference
    ModelT<float> model = build_spike_cnn(spec);
    const OpCounts counts = count_ops(model);
    REQUIRE(counts.layers.size() == 5);
    CHECK(counts.layers[0].layer == "conv1");
    CHECK(counts.layers[0].macs_per_step == 2880);    // 64 * 9 * 1 * 5
    CHECK(counts.layers[1].macs_per_step == 163840);  // 128 * 4 * 64 * 5
    CHECK(counts.layers[2].macs_per_step == 327680);  // 256 * 2 * 128 * 5
    CHECK(counts.layers[3].macs_per_step == 131072);  // 256 * 512
    CHECK(counts.layers[4].macs_per_step == 3072);    // 512 * 6
}

TEST_CASE("toy two-layer energy matches the closed form") {
    OpCounts counts;
    counts.layers = {{"l1", 100}, {"l2", 200}};
    SparsityReport sparsity;
    sparsity.layers = {{"nl1", 1000, 0.8}};
    const EnergyModel energy{4.6, 0.9};

    const EnergyEstimate ann = estimate_energy(counts, sparsity, NeuronKind::Relu, energy, 4);
    CHECK(ann.total_pj == doctest::Approx(300 * 4.6 * 4));  // 5520

    const EnergyEstimate snn = estimate_energy(counts, sparsity, NeuronKind::Lif, energy, 4);
    // first layer: 100 * 4.6 * 4; second: 200 * (1 - 0.8) * 0.9 * 4
    CHECK(snn.rows[0].energy_pj == doctest::Approx(1840.0));
    CHECK(snn.rows[1].energy_pj == doctest::Approx(144.0));
    CHECK(snn.total_pj == doctest::Approx(1984.0));
    CHECK(snn.total_excl_first_pj == doctest::Approx(144.0));

    const EnergyComparison cmp = compare_energy(ann, snn);
    CHECK(cmp.ratio == doctest::Approx(1984.0 / 5520.0));
    CHECK(cmp.ratio < 1.0);  // spiking side wins whenever e_ac/e_mac and the rate are below one
    CHECK(cmp.ratio_excl_first == doctest::Approx(144.0 / 3680.0));

    // a model against itself is the normalization convention
    const EnergyComparison self = compare_energy(ann, ann);
    CHECK(self.ratio == doctest::Approx(1.0));
    CHECK(self.ratio_excl_first == doctest::Approx(1.0));
}

TEST_CASE("dead network beyond the first layer costs only the first-layer term") {
    OpCounts counts;
    counts.layers = {{"l1", 100}, {"l2", 200}, {"l3", 300}};
    SparsityReport sparsity;
    sparsity.layers = {{"nl1", 10, 1.0}, {"nl2", 10, 1.0}};
    const EnergyModel energy{4.6, 0.9};
    const EnergyEstimate snn = estimate_energy(counts, sparsity, NeuronKind::Lif, energy, 4);
    CHECK(snn.total_pj == doctest::Approx(100 * 4.6 * 4));
    CHECK(snn.total_excl_first_pj == doctest::Approx(0.0));
}

TEST_CASE("snn energy is monotone nonincreasing in every layer's sparsity") {
    OpCounts counts;
    counts.layers = {{"l1", 100}, {"l2", 200}, {"l3", 300}};
    const EnergyModel energy{4.6, 0.9};
    double prev = 1e300;
    for (double s = 0.0; s <= 1.0; s += 0.1) {
        SparsityReport sp;
        sp.layers = {{"nl1", 10, s}, {"nl2", 10, 0.5}};
        const double total = estimate_energy(counts, sp, NeuronKind::Lif, energy, 4).total_pj;
        CHECK(total <= prev + 1e-12);
        prev = total;
    }
}

TEST_CASE("both normalized ratios are invariant to uniform energy-constant scaling") {
    OpCounts counts;
    counts.layers = {{"l1", 100}, {"l2", 200}};
    SparsityReport sparsity;
    sparsity.layers = {{"nl1", 10, 0.7}};
    for (double scale : {1.0, 2.5, 10.0}) {
        const EnergyModel energy{4.6 * scale, 0.9 * scale};
        const EnergyComparison cmp = compare_energy(estimate_energy(counts, sparsity, NeuronKind::Relu, energy, 4),
                                                    estimate_energy(counts, sparsity, NeuronKind::Lif, energy, 4));
        const EnergyModel base{4.6, 0.9};
        const EnergyComparison ref = compare_energy(estimate_energy(counts, sparsity, NeuronKind::Relu, base, 4),
                                                    estimate_energy(counts, sparsity, NeuronKind::Lif, base, 4));
        CHECK(cmp.ratio == doctest::Approx(ref.ratio).epsilon(1e-12));
        CHECK(cmp.ratio_excl_first == doctest::Approx(ref.ratio_excl_first).epsilon(1e-12));
    }
}

TEST_CASE("estimate_energy validates its inputs") {
    OpCounts counts;
    counts.layers = {{"l1", 100}, {"l2", 200}, {"l3", 300}};
    SparsityReport sparsity;
    sparsity.layers = {{"nl1", 10, 0.5}};  // one nonlinearity short
    const EnergyModel energy{4.6, 0.9};
    CHECK_THROWS_AS(estimate_energy(counts, sparsity, NeuronKind::Lif, energy, 4), ArgumentError);
    CHECK_THROWS_AS(estimate_energy(OpCounts{}, sparsity, NeuronKind::Lif, energy, 4), ArgumentError);
    CHECK_THROWS_AS((EnergyModel{0.9, 4.6}).validate(), ArgumentError);
}
