#include "spikehar/train.hpp"

#include <cmath>
#include <numeric>

#include "spikehar/errors.hpp"
#include "spikehar/rng.hpp"

namespace spikehar {

namespace {

std::vector<std::int64_t> range_indices(int begin, int count) {
    std::vector<std::int64_t> idx(static_cast<std::size_t>(count));
    std::iota(idx.begin(), idx.end(), static_cast<std::int64_t>(begin));
    return idx;
}

}  // namespace

TrainResult train_model(ModelT<float>& model, const WindowDataset& train, const WindowDataset& val,
                        const TrainOptions& options, const EpochCallback& on_epoch) {
    train.validate();
    val.validate();
    if (options.epochs < 0) throw ArgumentError("epochs must be >= 0");
    if (options.batch_size < 1) throw ArgumentError("batch_size must be >= 1");

    TrainResult result;
    result.best_params = snapshot_params(model);

    Adam adam(model.params());
    SeededRng shuffle_rng(options.shuffle_seed);
    const int n = train.size();

    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        const double lr = cosine_lr(epoch, options.schedule);
        const std::vector<std::int64_t> perm = shuffle_rng.permutation(n);

        double loss_sum = 0.0;
        std::int64_t correct = 0;
        std::int64_t seen = 0;
        for (int begin = 0; begin < n; begin += options.batch_size) {
            const int count = std::min(options.batch_size, n - begin);
            std::vector<std::int64_t> idx(perm.begin() + begin, perm.begin() + begin + count);
            const TimeBatch batch = make_time_batch(train, idx);
            const std::vector<int> labels = gather_labels(train, idx);

            const TimeBatch out = model.forward(batch);
            const Tensor logits = readout_logits(out);
            auto [loss, grad_logits] = cross_entropy(logits, labels);
            if (!std::isfinite(loss)) {
                throw NumericError("training loss is not finite at epoch " + std::to_string(epoch));
            }
            loss_sum += loss * count;
            const std::vector<int> pred = argmax_rows(logits);
            for (int i = 0; i < count; ++i) {
                if (pred[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(i)]) ++correct;
            }
            seen += count;

            model.zero_grads();
            TimeBatch grad_out(Tensor({count, logits.dim(1), 1}), logits.dim(1), 1);
            for (std::int64_t i = 0; i < grad_logits.size(); ++i) grad_out.data[i] = grad_logits[i];
            model.backward(grad_out);
            adam.step(model.params(), model.grads(), lr);
        }

        EpochMetrics row;
        row.epoch = epoch;
        row.lr = lr;
        row.train_loss = loss_sum / static_cast<double>(seen);
        row.train_acc = static_cast<double>(correct) / static_cast<double>(seen);
        row.val_acc = evaluate_accuracy(model, val, options.batch_size);
        result.history.push_back(row);
        if (row.val_acc > result.best_val_acc) {
            result.best_val_acc = row.val_acc;
            result.best_epoch = epoch;
            result.best_params = snapshot_params(model);
        }
        if (on_epoch) on_epoch(row);
    }
    return result;
}

double evaluate_accuracy(ModelT<float>& model, const WindowDataset& dataset, int batch_size) {
    dataset.validate();
    const int n = dataset.size();
    std::int64_t correct = 0;
    for (int begin = 0; begin < n; begin += batch_size) {
        const int count = std::min(batch_size, n - begin);
        const std::vector<std::int64_t> idx = range_indices(begin, count);
        const TimeBatch batch = make_time_batch(dataset, idx);
        const std::vector<int> pred = predict(model, batch);
        for (int i = 0; i < count; ++i) {
            if (pred[static_cast<std::size_t>(i)] == dataset.labels[static_cast<std::size_t>(begin + i)]) ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

std::vector<std::vector<std::int64_t>> confusion_matrix(ModelT<float>& model, const WindowDataset& dataset,
                                                        int batch_size) {
    dataset.validate();
    const int k = dataset.class_count;
    std::vector<std::vector<std::int64_t>> matrix(static_cast<std::size_t>(k),
                                                  std::vector<std::int64_t>(static_cast<std::size_t>(k), 0));
    const int n = dataset.size();
    for (int begin = 0; begin < n; begin += batch_size) {
        const int count = std::min(batch_size, n - begin);
        const std::vector<std::int64_t> idx = range_indices(begin, count);
        const TimeBatch batch = make_time_batch(dataset, idx);
        const std::vector<int> pred = predict(model, batch);
        for (int i = 0; i < count; ++i) {
            const int truth = dataset.labels[static_cast<std::size_t>(begin + i)];
            ++matrix[static_cast<std::size_t>(truth)][static_cast<std::size_t>(pred[static_cast<std::size_t>(i)])];
        }
    }
    return matrix;
}

FitResult fit(const ModelSpec& spec, const WindowDataset& train, const WindowDataset& val, const FitOptions& options,
              const EpochCallback& on_epoch) {
    if (options.lr_grid.empty()) throw ArgumentError("fit needs at least one learning rate");
    FitResult result;
    for (double lr : options.lr_grid) {
        ModelT<float> model = build_model<float>(spec);
        TrainOptions topt;
        topt.epochs = options.epochs;
        topt.batch_size = options.batch_size;
        topt.schedule = LrSchedule{lr, options.epochs > 0 ? options.epochs : 1, 0.0};
        topt.shuffle_seed = spec.seed;
        TrainResult tr = train_model(model, train, val, topt, on_epoch);
        for (const auto& row : tr.history) result.history.push_back(row);
        if (result.best_params.empty() || tr.best_val_acc > result.best_val_acc) {
            result.best_val_acc = tr.best_val_acc;
            result.best_epoch = tr.best_epoch;
            result.chosen_lr = lr;
            result.best_params = std::move(tr.best_params);
        }
    }
    return result;
}

}  // namespace spikehar
