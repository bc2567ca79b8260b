#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spikehar/data.hpp"
#include "spikehar/model.hpp"
#include "spikehar/optim.hpp"

namespace spikehar {

struct TrainOptions {
    int epochs = 60;
    int batch_size = 128;
    LrSchedule schedule;              // base_lr chosen by the caller
    std::uint64_t shuffle_seed = 1000;
};

struct EpochMetrics {
    int epoch = 0;
    double lr = 0.0;
    double train_loss = 0.0;
    double train_acc = 0.0;  // measured on the fly from training forward passes
    double val_acc = 0.0;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

struct TrainResult {
    std::vector<EpochMetrics> history;
    std::vector<Tensor> best_params;  // snapshot at best validation accuracy
    double best_val_acc = -1.0;
    int best_epoch = -1;
};

// Minibatch Adam with a per-epoch cosine learning-rate schedule. The best
// (strictly greater) validation accuracy decides the returned snapshot; with
// epochs == 0 the snapshot is the initialization. Throws NumericError naming
// the epoch if the loss leaves the finite range.
TrainResult train_model(ModelT<float>& model, const WindowDataset& train, const WindowDataset& val,
                        const TrainOptions& options, const EpochCallback& on_epoch = nullptr);

double evaluate_accuracy(ModelT<float>& model, const WindowDataset& dataset, int batch_size = 128);

// rows: true label, cols: predicted label.
std::vector<std::vector<std::int64_t>> confusion_matrix(ModelT<float>& model, const WindowDataset& dataset,
                                                        int batch_size = 128);

struct FitOptions {
    std::vector<double> lr_grid = {1e-4, 3e-4, 1e-3};
    int epochs = 60;
    int batch_size = 128;
};

struct FitResult {
    std::vector<EpochMetrics> history;  // all learning rates; rows carry lr
    std::vector<Tensor> best_params;
    double best_val_acc = -1.0;
    double chosen_lr = 0.0;
    int best_epoch = -1;
};

// Trains one freshly built model per learning rate in the grid (same seed for
// each) and keeps the parameters of the best validation accuracy overall.
FitResult fit(const ModelSpec& spec, const WindowDataset& train, const WindowDataset& val, const FitOptions& options,
              const EpochCallback& on_epoch = nullptr);

}  // namespace spikehar
