#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spikehar/layers.hpp"
#include "spikehar/tensor.hpp"

namespace spikehar {

// N windowed samples of T time steps x D channels with one label each.
struct WindowDataset {
    Tensor samples;             // [N, T, D]
    std::vector<int> labels;    // values in [0, class_count)
    int class_count = 0;
    std::vector<std::string> channel_names;

    int size() const { return samples.rank() == 3 ? samples.dim(0) : 0; }
    int steps() const { return samples.rank() == 3 ? samples.dim(1) : 0; }
    int channels() const { return samples.rank() == 3 ? samples.dim(2) : 0; }

    void validate() const;
};

struct SplitSpec {
    double train = 0.64;
    double val = 0.16;
    double test = 0.20;
    std::uint64_t seed = 1000;
};

// Raw inertial-signal layout: <root>/{train,test}/Inertial Signals/ holds nine
// whitespace-separated text files of 128 floats per row plus a label file with
// values 1..6. Both partitions are merged; channel order is documented in
// docs/formats.md. Result: T=128, D=9, labels remapped to 0..5.
WindowDataset load_ucihar(const std::string& root_dir);

// Fixed channel order used by load_ucihar.
const std::vector<std::string>& ucihar_channel_names();

// Seeded permutation split: train gets floor(train*N), val floor(val*N), test
// the remainder. Partitions are disjoint and exhaustive.
std::array<WindowDataset, 3> split(const WindowDataset& dataset, const SplitSpec& spec);

struct ChannelStats {
    std::vector<float> mean;
    std::vector<float> std_dev;  // floored at 1e-6
};

// Per-channel z-score with statistics computed on `train` only; the same
// statistics are applied to every dataset in `others` (validation/test).
ChannelStats normalize(WindowDataset& train, const std::vector<WindowDataset*>& others);

// Class c is a sinusoid at a class-specific frequency with per-channel random
// phase plus Gaussian noise; classes are separable from spectral magnitudes by
// construction.
WindowDataset synth_generate(int classes, int per_class, int time_steps, int channels, std::uint64_t seed,
                             double noise_sigma = 0.3);

// Generic window CSV: one row per (sample, time step) with columns
// sample_id,t,d_0..d_{D-1}; labels live in a sidecar CSV with rows
// sample_id,label. Schemas in docs/formats.md.
WindowDataset load_window_csv(const std::string& data_path, const std::string& labels_path);
void save_window_csv(const WindowDataset& dataset, const std::string& data_path, const std::string& labels_path);

// Assembles model input for the given sample indices: a TimeBatch whose
// per-slice signal is one channel over the D sensor axis.
TimeBatch make_time_batch(const WindowDataset& dataset, const std::vector<std::int64_t>& indices);
std::vector<int> gather_labels(const WindowDataset& dataset, const std::vector<std::int64_t>& indices);

}  // namespace spikehar
