// Command-line entry points: train, eval, ablate, hwreport.
//
// Exit codes: 0 success, 1 argument/validation error, 2 dataset load failure,
// 3 numeric divergence while training, 4 checkpoint version mismatch.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spikehar/data.hpp"
#include "spikehar/errors.hpp"
#include "spikehar/hw_metrics.hpp"
#include "spikehar/model.hpp"
#include "spikehar/train.hpp"

namespace fs = std::filesystem;
using namespace spikehar;

namespace {

constexpr int kExitArgument = 1;
constexpr int kExitDataset = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVersion = 4;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// Expands `--config FILE` (key=value lines, # comments) into argv tokens
// inserted right after the subcommand name. Every option uses a take-last
// policy, so flags given on the command line override file entries.
std::vector<std::string> expand_args(int argc, char** argv) {
    std::vector<std::string> raw(argv + 1, argv + argc);
    std::string config_path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == "--config") {
            if (i + 1 >= raw.size()) throw ArgumentError("--config needs a file argument");
            config_path = raw[++i];
        } else if (raw[i].rfind("--config=", 0) == 0) {
            config_path = raw[i].substr(9);
        } else {
            rest.push_back(raw[i]);
        }
    }
    if (config_path.empty()) return rest;
    if (rest.empty() || rest[0].rfind("-", 0) == 0) {
        throw ArgumentError("--config must follow a subcommand");
    }
    std::ifstream in(config_path);
    if (!in) throw ArgumentError("cannot open config file: " + config_path);
    std::vector<std::string> expanded;
    expanded.push_back(rest[0]);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ArgumentError(config_path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty()) throw ArgumentError(config_path + ":" + std::to_string(line_no) + ": empty key");
        expanded.push_back("--" + key + "=" + value);
    }
    expanded.insert(expanded.end(), rest.begin() + 1, rest.end());
    return expanded;
}

// All CSV outputs go through a temp file and a rename so an error never
// leaves a partial file behind.
void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        if (!out) throw IoError("cannot open file for writing: " + tmp);
        out << content;
        if (!out) throw IoError("failed writing " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot move file into place: " + path);
}

struct DatasetOptions {
    std::string kind = "ucihar";
    std::string path;
    std::string labels_path;
    int synth_classes = 3;
    int synth_per_class = 200;
    int synth_steps = 64;
    int synth_channels = 3;
    double synth_sigma = 0.3;
    std::uint64_t synth_seed = 42;
    std::uint64_t split_seed = 1000;
};

void add_dataset_flags(CLI::App* cmd, DatasetOptions& opt) {
    cmd->add_option("--data-kind", opt.kind, "Dataset kind: ucihar | csv | synth")->default_val("ucihar");
    cmd->add_option("--data", opt.path, "Dataset root (ucihar) or window CSV path (csv); falls back to SPIKEHAR_DATA_ROOT");
    cmd->add_option("--labels", opt.labels_path, "Label sidecar CSV (csv kind); default <data>_labels.csv");
    cmd->add_option("--synth-classes", opt.synth_classes, "Synthetic: class count")->default_val(3);
    cmd->add_option("--synth-per-class", opt.synth_per_class, "Synthetic: samples per class")->default_val(200);
    cmd->add_option("--synth-steps", opt.synth_steps, "Synthetic: time steps")->default_val(64);
    cmd->add_option("--synth-channels", opt.synth_channels, "Synthetic: channels")->default_val(3);
    cmd->add_option("--synth-sigma", opt.synth_sigma, "Synthetic: noise sigma")->default_val(0.3);
    cmd->add_option("--synth-seed", opt.synth_seed, "Synthetic: generator seed")->default_val(42);
    cmd->add_option("--split-seed", opt.split_seed, "Seed for the 64/16/20 split permutation")->default_val(1000);
}

WindowDataset load_dataset(const DatasetOptions& opt) {
    if (opt.kind == "synth") {
        return synth_generate(opt.synth_classes, opt.synth_per_class, opt.synth_steps, opt.synth_channels,
                              opt.synth_seed, opt.synth_sigma);
    }
    std::string path = opt.path;
    if (path.empty()) {
        if (const char* env = std::getenv("SPIKEHAR_DATA_ROOT")) path = env;
    }
    if (path.empty()) throw ArgumentError("no dataset path: pass --data or set SPIKEHAR_DATA_ROOT");
    if (opt.kind == "ucihar") return load_ucihar(path);
    if (opt.kind == "csv") {
        std::string labels = opt.labels_path;
        if (labels.empty()) {
            labels = path;
            const auto dot = labels.rfind(".csv");
            if (dot != std::string::npos) labels = labels.substr(0, dot);
            labels += "_labels.csv";
        }
        return load_window_csv(path, labels);
    }
    throw ArgumentError("unknown dataset kind '" + opt.kind + "'");
}

struct SplitSets {
    WindowDataset train, val, test;
};

// Split then per-channel z-score with statistics from the training partition.
SplitSets split_and_normalize(const WindowDataset& dataset, std::uint64_t split_seed) {
    SplitSpec spec;
    spec.seed = split_seed;
    auto parts = split(dataset, spec);
    SplitSets sets{std::move(parts[0]), std::move(parts[1]), std::move(parts[2])};
    normalize(sets.train, {&sets.val, &sets.test});
    return sets;
}

const WindowDataset& pick_split(const SplitSets& sets, const std::string& which) {
    if (which == "train") return sets.train;
    if (which == "val") return sets.val;
    if (which == "test") return sets.test;
    throw ArgumentError("unknown split '" + which + "' (expected train|val|test)");
}

struct NeuronOptions {
    std::string model = "spike_cnn";
    double tau = 0.75;
    double vth = 0.5;
    std::string reset = "soft";
    std::string reset_grad = "attached";
};

void add_neuron_flags(CLI::App* cmd, NeuronOptions& opt) {
    cmd->add_option("--model", opt.model, "Model kind: spike_cnn | relu_cnn")->default_val("spike_cnn");
    cmd->add_option("--tau", opt.tau, "LIF membrane decay factor")->default_val(0.75);
    cmd->add_option("--vth", opt.vth, "LIF firing threshold")->default_val(0.5);
    cmd->add_option("--reset", opt.reset, "LIF reset mode: soft | hard")->default_val("soft");
    cmd->add_option("--reset-grad", opt.reset_grad, "Reset path in backward: attached | detached")
        ->default_val("attached");
}

ModelSpec make_model_spec(const WindowDataset& dataset, const NeuronOptions& opt, std::uint64_t seed) {
    ModelSpec spec;
    spec.input_channels = dataset.channels();
    spec.time_steps = dataset.steps();
    spec.class_count = dataset.class_count;
    spec.seed = seed;
    if (opt.model == "spike_cnn") {
        spec.neuron = NeuronKind::Lif;
    } else if (opt.model == "relu_cnn") {
        spec.neuron = NeuronKind::Relu;
    } else {
        throw ArgumentError("unknown model kind '" + opt.model + "'");
    }
    spec.lif.tau = opt.tau;
    spec.lif.v_th = opt.vth;
    if (opt.reset == "soft") {
        spec.lif.reset = ResetMode::Soft;
    } else if (opt.reset == "hard") {
        spec.lif.reset = ResetMode::Hard;
    } else {
        throw ArgumentError("unknown reset mode '" + opt.reset + "'");
    }
    if (opt.reset_grad == "attached") {
        spec.lif.reset_grad = ResetGrad::Attached;
    } else if (opt.reset_grad == "detached") {
        spec.lif.reset_grad = ResetGrad::Detached;
    } else {
        throw ArgumentError("unknown reset-grad mode '" + opt.reset_grad + "'");
    }
    spec.validate();
    return spec;
}

std::vector<double> parse_lr(const std::string& lr) {
    if (lr == "grid") return {1e-4, 3e-4, 1e-3};
    const double v = std::strtod(lr.c_str(), nullptr);
    if (!(v > 0.0)) throw ArgumentError("bad --lr value '" + lr + "' (expected 'grid' or a positive number)");
    return {v};
}

std::string metrics_csv(const std::vector<EpochMetrics>& history) {
    std::ostringstream os;
    os << "# spikehar-csv v1 train-metrics\n";
    os << "epoch,lr,train_loss,train_acc,val_acc\n";
    for (const auto& row : history) {
        os << row.epoch << ',' << fmt(row.lr) << ',' << fmt(row.train_loss) << ',' << fmt(row.train_acc) << ','
           << fmt(row.val_acc) << '\n';
    }
    return os.str();
}

double test_accuracy_of(const ModelSpec& spec, const std::vector<Tensor>& params, const WindowDataset& test) {
    ModelT<float> model = build_model<float>(spec);
    restore_params(model, params);
    return evaluate_accuracy(model, test);
}

// ---------------------------------------------------------------------------

int cmd_train(const DatasetOptions& data_opt, const NeuronOptions& neuron_opt, const std::string& lr,
              int epochs, int batch_size, std::uint64_t seed, const std::string& out_dir, bool quiet) {
    const WindowDataset dataset = load_dataset(data_opt);
    const SplitSets sets = split_and_normalize(dataset, data_opt.split_seed);
    const ModelSpec spec = make_model_spec(sets.train, neuron_opt, seed);

    FitOptions fopt;
    fopt.lr_grid = parse_lr(lr);
    fopt.epochs = epochs;
    fopt.batch_size = batch_size;

    EpochCallback log = nullptr;
    if (!quiet) {
        log = [](const EpochMetrics& m) {
            std::cout << "epoch " << m.epoch << " lr " << fmt(m.lr) << " loss " << fmt(m.train_loss) << " train_acc "
                      << fmt(m.train_acc) << " val_acc " << fmt(m.val_acc) << "\n";
        };
    }
    const FitResult result = fit(spec, sets.train, sets.val, fopt, log);

    fs::create_directories(out_dir);
    write_text_atomic(out_dir + "/metrics.csv", metrics_csv(result.history));

    ModelT<float> best = build_model<float>(spec);
    restore_params(best, result.best_params);
    save_checkpoint(out_dir + "/model.ckpt", best, spec);

    const double test_acc = evaluate_accuracy(best, sets.test);
    std::cout << "chosen_lr " << fmt(result.chosen_lr) << "\n";
    std::cout << "best_val_acc " << fmt(result.best_val_acc) << " (epoch " << result.best_epoch << ")\n";
    std::cout << "test_acc " << fmt(test_acc) << "\n";
    std::cout << "checkpoint " << out_dir << "/model.ckpt\n";
    return 0;
}

int cmd_eval(const std::string& checkpoint, const DatasetOptions& data_opt, const std::string& which_split,
             const std::string& out_dir) {
    LoadedCheckpoint loaded = load_checkpoint(checkpoint);
    const WindowDataset dataset = load_dataset(data_opt);
    const SplitSets sets = split_and_normalize(dataset, data_opt.split_seed);
    const WindowDataset& part = pick_split(sets, which_split);
    if (part.size() < 1) throw ArgumentError("selected split '" + which_split + "' is empty");

    const double acc = evaluate_accuracy(loaded.model, part);
    const auto matrix = confusion_matrix(loaded.model, part);

    std::ostringstream os;
    os << "# spikehar-csv v1 confusion\n";
    os << "true_label,pred_label,count\n";
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        for (std::size_t j = 0; j < matrix[i].size(); ++j) {
            os << i << ',' << j << ',' << matrix[i][j] << '\n';
        }
    }
    fs::create_directories(out_dir);
    write_text_atomic(out_dir + "/confusion.csv", os.str());

    std::cout << "split " << which_split << "\n";
    std::cout << "top1_acc " << fmt(acc) << "\n";
    std::cout << "confusion " << out_dir << "/confusion.csv\n";
    return 0;
}

int cmd_hwreport(const std::string& checkpoint, const DatasetOptions& data_opt, const std::string& which_split,
                 double e_mac, double e_ac, const std::string& out_dir) {
    LoadedCheckpoint loaded = load_checkpoint(checkpoint);
    const WindowDataset dataset = load_dataset(data_opt);
    const SplitSets sets = split_and_normalize(dataset, data_opt.split_seed);
    const WindowDataset& part = pick_split(sets, which_split);
    if (part.size() < 1) throw ArgumentError("selected split '" + which_split + "' is empty");

    const SparsityReport sparsity = measure_sparsity(loaded.model, part);
    const OpCounts counts = count_ops(loaded.model);
    const EnergyModel energy{e_mac, e_ac};
    const int steps = loaded.spec.time_steps;

    const EnergyEstimate ann = estimate_energy(counts, sparsity, NeuronKind::Relu, energy, steps);
    const EnergyEstimate own = loaded.spec.neuron == NeuronKind::Lif
                                   ? estimate_energy(counts, sparsity, NeuronKind::Lif, energy, steps)
                                   : ann;
    const EnergyComparison cmp = compare_energy(ann, own);

    fs::create_directories(out_dir);
    {
        std::ostringstream os;
        os << "# spikehar-csv v1 sparsity\n";
        os << "layer,element_count,zero_fraction\n";
        for (const auto& row : sparsity.layers) {
            os << row.layer << ',' << row.element_count << ',' << fmt(row.zero_fraction) << '\n';
        }
        os << "weighted_average,," << fmt(sparsity.weighted_average) << '\n';
        write_text_atomic(out_dir + "/sparsity.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "# spikehar-csv v1 energy\n";
        os << "layer,op_count,sparsity,energy_pj\n";
        for (std::size_t i = 0; i < own.rows.size(); ++i) {
            const auto& row = own.rows[i];
            os << row.layer << ',' << row.op_count << ',' << fmt(1.0 - row.input_rate) << ',' << fmt(row.energy_pj)
               << '\n';
        }
        os << "total,,," << fmt(own.total_pj) << '\n';
        os << "normalized_ratio,,," << fmt(cmp.ratio) << '\n';
        os << "normalized_ratio_excl_first,,," << fmt(cmp.ratio_excl_first) << '\n';
        write_text_atomic(out_dir + "/energy.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "# spikehar-csv v1 energy-summary\n";
        os << "model,energy_pj,normalized\n";
        os << "ann," << fmt(cmp.ann_pj) << ",1\n";
        os << (loaded.spec.neuron == NeuronKind::Lif ? "snn," : "ann,") << fmt(cmp.snn_pj) << ',' << fmt(cmp.ratio)
           << '\n';
        write_text_atomic(out_dir + "/summary.csv", os.str());
    }

    std::cout << "weighted_sparsity " << fmt(sparsity.weighted_average) << "\n";
    std::cout << "energy_pj " << fmt(own.total_pj) << "\n";
    std::cout << "normalized_ratio " << fmt(cmp.ratio) << "\n";
    std::cout << "normalized_ratio_excl_first " << fmt(cmp.ratio_excl_first) << "\n";
    return 0;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& seeds) {
    std::vector<std::uint64_t> out;
    std::istringstream is(seeds);
    std::string item;
    while (std::getline(is, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::strtoull(item.c_str(), nullptr, 10));
    }
    if (out.empty()) throw ArgumentError("empty seed list");
    return out;
}

int cmd_ablate(const DatasetOptions& data_opt, const NeuronOptions& base_neuron, const std::string& lr, int epochs,
               int batch_size, const std::string& seeds_str, const std::string& axes_str, const std::string& out_dir,
               bool quiet) {
    const WindowDataset dataset = load_dataset(data_opt);
    const SplitSets sets = split_and_normalize(dataset, data_opt.split_seed);
    const std::vector<std::uint64_t> seeds = parse_seed_list(seeds_str);

    std::vector<std::string> axes;
    {
        std::istringstream is(axes_str);
        std::string item;
        while (std::getline(is, item, ',')) {
            if (item == "tau" || item == "vth" || item == "reset") {
                axes.push_back(item);
            } else if (!item.empty()) {
                throw ArgumentError("unknown ablation axis '" + item + "'");
            }
        }
    }
    if (axes.empty()) throw ArgumentError("no ablation axes selected");

    struct Cell {
        std::string axis;
        std::string value;
        NeuronOptions neuron;
    };
    std::vector<Cell> cells;
    for (const std::string& axis : axes) {
        if (axis == "tau") {
            for (double tau : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                NeuronOptions n = base_neuron;
                n.tau = tau;
                cells.push_back({axis, fmt(tau), n});
            }
        } else if (axis == "vth") {
            for (double vth : {0.25, 0.5, 0.75, 1.0}) {
                NeuronOptions n = base_neuron;
                n.vth = vth;
                cells.push_back({axis, fmt(vth), n});
            }
        } else {
            for (const char* reset : {"hard", "soft"}) {
                NeuronOptions n = base_neuron;
                n.reset = reset;
                cells.push_back({axis, reset, n});
            }
        }
    }

    std::ostringstream sweep;
    sweep << "# spikehar-csv v1 ablate\n";
    sweep << "axis,value,mean_acc,std_acc\n";
    std::ostringstream detail;
    detail << "# spikehar-csv v1 ablate-cells\n";
    detail << "axis,value,seed,lr,test_acc\n";

    for (const Cell& cell : cells) {
        // The learning rate is fixed per cell: when a grid is requested it is
        // selected once by validation accuracy at the first seed, then reused
        // for the remaining seeds.
        std::vector<double> accs;
        double cell_lr = 0.0;
        for (std::size_t si = 0; si < seeds.size(); ++si) {
            const ModelSpec spec = make_model_spec(sets.train, cell.neuron, seeds[si]);
            FitOptions fopt;
            fopt.lr_grid = si == 0 ? parse_lr(lr) : std::vector<double>{cell_lr};
            fopt.epochs = epochs;
            fopt.batch_size = batch_size;
            const FitResult result = fit(spec, sets.train, sets.val, fopt);
            if (si == 0) cell_lr = result.chosen_lr;
            const double acc = test_accuracy_of(spec, result.best_params, sets.test);
            accs.push_back(acc);
            detail << cell.axis << ',' << cell.value << ',' << seeds[si] << ',' << fmt(cell_lr) << ',' << fmt(acc)
                   << '\n';
            if (!quiet) {
                std::cout << "cell " << cell.axis << '=' << cell.value << " seed " << seeds[si] << " lr "
                          << fmt(cell_lr) << " test_acc " << fmt(acc) << "\n";
            }
        }
        double mean = 0.0;
        for (double a : accs) mean += a;
        mean /= static_cast<double>(accs.size());
        double var = 0.0;
        for (double a : accs) var += (a - mean) * (a - mean);
        const double stddev = accs.size() > 1 ? std::sqrt(var / static_cast<double>(accs.size() - 1)) : 0.0;
        sweep << cell.axis << ',' << cell.value << ',' << fmt(mean) << ',' << fmt(stddev) << '\n';
    }

    fs::create_directories(out_dir);
    write_text_atomic(out_dir + "/sweep.csv", sweep.str());
    write_text_atomic(out_dir + "/cells.csv", detail.str());
    std::cout << "sweep " << out_dir << "/sweep.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spiking and conventional CNNs for windowed sensor classification"};
    app.require_subcommand(1);

    std::string config_doc;  // consumed by expand_args before parsing; listed here for --help

    // train ------------------------------------------------------------
    auto* train = app.add_subcommand("train", "Train a model and save the best-validation checkpoint");
    train->add_option("--config", config_doc, "Read defaults from a key=value config file (flags override)");
    DatasetOptions train_data;
    NeuronOptions train_neuron;
    std::string train_lr = "grid";
    int train_epochs = 60;
    int train_batch = 128;
    std::uint64_t train_seed = 1000;
    std::string train_out = "out";
    bool train_quiet = false;
    add_dataset_flags(train, train_data);
    add_neuron_flags(train, train_neuron);
    train->add_option("--lr", train_lr, "Learning rate: 'grid' ({1e-4, 3e-4, 1e-3}) or a number")->default_val("grid");
    train->add_option("--epochs", train_epochs)->default_val(60);
    train->add_option("--batch-size", train_batch)->default_val(128);
    train->add_option("--seed", train_seed, "Weight init and shuffle seed")->default_val(1000);
    train->add_option("--out", train_out, "Output directory")->default_val("out");
    train->add_flag("--quiet", train_quiet, "Suppress per-epoch log lines");

    // eval -------------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint: top-1 accuracy and confusion matrix");
    eval->add_option("--config", config_doc, "Read defaults from a key=value config file (flags override)");
    DatasetOptions eval_data;
    std::string eval_ckpt;
    std::string eval_split = "test";
    std::string eval_out = "out";
    eval->add_option("--checkpoint", eval_ckpt, "Checkpoint file")->required();
    add_dataset_flags(eval, eval_data);
    eval->add_option("--split", eval_split, "Partition to evaluate: train | val | test")->default_val("test");
    eval->add_option("--out", eval_out, "Output directory")->default_val("out");

    // ablate -----------------------------------------------------------
    auto* ablate = app.add_subcommand("ablate", "Sweep tau / threshold / reset grids, averaged over seeds");
    ablate->add_option("--config", config_doc, "Read defaults from a key=value config file (flags override)");
    DatasetOptions ablate_data;
    NeuronOptions ablate_neuron;
    std::string ablate_lr = "grid";
    int ablate_epochs = 60;
    int ablate_batch = 128;
    std::string ablate_seeds = "1000,1001,1002,1003,1004";
    std::string ablate_axes = "tau,vth,reset";
    std::string ablate_out = "out";
    bool ablate_quiet = false;
    add_dataset_flags(ablate, ablate_data);
    add_neuron_flags(ablate, ablate_neuron);
    ablate->add_option("--lr", ablate_lr, "Learning rate: 'grid' or a number (fixed per cell)")->default_val("grid");
    ablate->add_option("--epochs", ablate_epochs)->default_val(60);
    ablate->add_option("--batch-size", ablate_batch)->default_val(128);
    ablate->add_option("--seeds", ablate_seeds, "Comma-separated training seeds")->default_val("1000,1001,1002,1003,1004");
    ablate->add_option("--axes", ablate_axes, "Comma-separated subset of tau,vth,reset")->default_val("tau,vth,reset");
    ablate->add_option("--out", ablate_out, "Output directory")->default_val("out");
    ablate->add_flag("--quiet", ablate_quiet, "Suppress per-cell log lines");

    // hwreport ----------------------------------------------------------
    auto* hwreport = app.add_subcommand("hwreport", "Sparsity and proxy energy report for a checkpoint");
    hwreport->add_option("--config", config_doc, "Read defaults from a key=value config file (flags override)");
    DatasetOptions hw_data;
    std::string hw_ckpt;
    std::string hw_split = "test";
    double hw_emac = 4.6;
    double hw_eac = 0.9;
    std::string hw_out = "out";
    hwreport->add_option("--checkpoint", hw_ckpt, "Checkpoint file")->required();
    add_dataset_flags(hwreport, hw_data);
    hwreport->add_option("--split", hw_split, "Partition to measure on")->default_val("test");
    hwreport->add_option("--emac", hw_emac, "Energy per multiply-accumulate, pJ")->default_val(4.6);
    hwreport->add_option("--eac", hw_eac, "Energy per accumulate, pJ")->default_val(0.9);
    hwreport->add_option("--out", hw_out, "Output directory")->default_val("out");

    // Command-line flags override config-file entries: file keys are injected
    // first and every option takes its last occurrence.
    for (CLI::App* sub : app.get_subcommands({})) {
        for (CLI::Option* opt : sub->get_options()) {
            opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        }
    }

    std::vector<std::string> args;
    try {
        args = expand_args(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitArgument;
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (train->parsed()) {
            return cmd_train(train_data, train_neuron, train_lr, train_epochs, train_batch, train_seed, train_out,
                             train_quiet);
        }
        if (eval->parsed()) return cmd_eval(eval_ckpt, eval_data, eval_split, eval_out);
        if (ablate->parsed()) {
            return cmd_ablate(ablate_data, ablate_neuron, ablate_lr, ablate_epochs, ablate_batch, ablate_seeds,
                              ablate_axes, ablate_out, ablate_quiet);
        }
        if (hwreport->parsed()) return cmd_hwreport(hw_ckpt, hw_data, hw_split, hw_emac, hw_eac, hw_out);
    } catch (const VersionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVersion;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataset;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataset;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitArgument;
    }
    return kExitArgument;
}
