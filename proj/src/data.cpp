#include "spikehar/data.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "spikehar/errors.hpp"
#include "spikehar/rng.hpp"

namespace fs = std::filesystem;

namespace spikehar {

void WindowDataset::validate() const {
    if (size() < 1) throw ArgumentError("dataset is empty");
    if (static_cast<int>(labels.size()) != size()) throw DimensionError("dataset label count does not match samples");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= class_count) {
            throw ArgumentError("label " + std::to_string(labels[i]) + " outside [0, " + std::to_string(class_count) +
                                ") at sample " + std::to_string(i));
        }
    }
}

// ---------------------------------------------------------------------------
// UCI-HAR raw signals

const std::vector<std::string>& ucihar_channel_names() {
    static const std::vector<std::string> names = {
        "body_acc_x", "body_acc_y", "body_acc_z", "body_gyro_x", "body_gyro_y",
        "body_gyro_z", "total_acc_x", "total_acc_y", "total_acc_z",
    };
    return names;
}

namespace {

constexpr int kUciharSteps = 128;

// Parses one whitespace-separated signal file; every row must hold exactly
// `kUciharSteps` floats.
std::vector<std::vector<float>> read_signal_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("missing dataset file: " + path.string());
    std::vector<std::vector<float>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::vector<float> row;
        row.reserve(kUciharSteps);
        std::istringstream ls(line);
        double v;
        while (ls >> v) row.push_back(static_cast<float>(v));
        if (row.empty()) continue;  // tolerate trailing blank lines
        if (static_cast<int>(row.size()) != kUciharSteps) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(kUciharSteps) + " values per row, got " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<int> read_label_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("missing dataset file: " + path.string());
    std::vector<int> labels;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        int v;
        if (!(ls >> v)) continue;
        if (v < 1 || v > 6) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": label " + std::to_string(v) +
                             " outside 1..6");
        }
        labels.push_back(v - 1);
    }
    return labels;
}

void load_ucihar_partition(const fs::path& root, const std::string& partition,
                           std::vector<std::vector<std::vector<float>>>& all_channels, std::vector<int>& labels) {
    const fs::path part_dir = root / partition;
    const fs::path signals_dir = part_dir / "Inertial Signals";
    std::vector<std::vector<std::vector<float>>> channels;
    for (const std::string& name : ucihar_channel_names()) {
        channels.push_back(read_signal_file(signals_dir / (name + "_" + partition + ".txt")));
    }
    std::vector<int> part_labels = read_label_file(part_dir / ("y_" + partition + ".txt"));
    const std::size_t n = part_labels.size();
    for (std::size_t c = 0; c < channels.size(); ++c) {
        if (channels[c].size() != n) {
            throw ParseError("row count mismatch in " + partition + ": " + ucihar_channel_names()[c] + " has " +
                             std::to_string(channels[c].size()) + " rows, labels have " + std::to_string(n));
        }
    }
    for (std::size_t c = 0; c < channels.size(); ++c) {
        if (all_channels.size() <= c) all_channels.emplace_back();
        for (auto& row : channels[c]) all_channels[c].push_back(std::move(row));
    }
    labels.insert(labels.end(), part_labels.begin(), part_labels.end());
}

}  // namespace

WindowDataset load_ucihar(const std::string& root_dir) {
    const fs::path root(root_dir);
    std::vector<std::vector<std::vector<float>>> channels;  // [D][N][T]
    std::vector<int> labels;
    load_ucihar_partition(root, "train", channels, labels);
    load_ucihar_partition(root, "test", channels, labels);

    const int n = static_cast<int>(labels.size());
    const int d = static_cast<int>(channels.size());
    WindowDataset ds;
    ds.samples = Tensor({n, kUciharSteps, d});
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) {
            const auto& row = channels[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
            for (int t = 0; t < kUciharSteps; ++t) ds.samples.at3(i, t, c) = row[static_cast<std::size_t>(t)];
        }
    }
    ds.labels = std::move(labels);
    ds.class_count = 6;
    ds.channel_names = ucihar_channel_names();
    ds.validate();
    return ds;
}

// ---------------------------------------------------------------------------
// Split / normalize

std::array<WindowDataset, 3> split(const WindowDataset& dataset, const SplitSpec& spec) {
    dataset.validate();
    const int n = dataset.size();
    if (n < 5) throw ArgumentError("split needs at least 5 samples, got " + std::to_string(n));
    const double frac_sum = spec.train + spec.val + spec.test;
    if (std::abs(frac_sum - 1.0) > 1e-9) throw ArgumentError("split fractions must sum to 1");

    SeededRng rng(spec.seed);
    const std::vector<std::int64_t> perm = rng.permutation(n);
    const int n_train = static_cast<int>(std::floor(spec.train * n));
    const int n_val = static_cast<int>(std::floor(spec.val * n));

    auto take = [&](int begin, int count) {
        WindowDataset out;
        out.samples = Tensor({count, dataset.steps(), dataset.channels()});
        out.labels.resize(static_cast<std::size_t>(count));
        out.class_count = dataset.class_count;
        out.channel_names = dataset.channel_names;
        const std::int64_t stride = static_cast<std::int64_t>(dataset.steps()) * dataset.channels();
        for (int i = 0; i < count; ++i) {
            const std::int64_t src = perm[static_cast<std::size_t>(begin + i)];
            const float* from = dataset.samples.data() + src * stride;
            float* to = out.samples.data() + static_cast<std::int64_t>(i) * stride;
            for (std::int64_t j = 0; j < stride; ++j) to[j] = from[j];
            out.labels[static_cast<std::size_t>(i)] = dataset.labels[static_cast<std::size_t>(src)];
        }
        return out;
    };
    return {take(0, n_train), take(n_train, n_val), take(n_train + n_val, n - n_train - n_val)};
}

ChannelStats normalize(WindowDataset& train, const std::vector<WindowDataset*>& others) {
    train.validate();
    const int d = train.channels();
    ChannelStats stats;
    stats.mean.assign(static_cast<std::size_t>(d), 0.0f);
    stats.std_dev.assign(static_cast<std::size_t>(d), 1.0f);

    const std::int64_t per_channel = static_cast<std::int64_t>(train.size()) * train.steps();
    for (int c = 0; c < d; ++c) {
        double sum = 0.0;
        for (int i = 0; i < train.size(); ++i) {
            for (int t = 0; t < train.steps(); ++t) sum += train.samples.at3(i, t, c);
        }
        const double mean = sum / static_cast<double>(per_channel);
        double var = 0.0;
        for (int i = 0; i < train.size(); ++i) {
            for (int t = 0; t < train.steps(); ++t) {
                const double dv = train.samples.at3(i, t, c) - mean;
                var += dv * dv;
            }
        }
        var /= static_cast<double>(per_channel);
        stats.mean[static_cast<std::size_t>(c)] = static_cast<float>(mean);
        stats.std_dev[static_cast<std::size_t>(c)] = static_cast<float>(std::max(std::sqrt(var), 1e-6));
    }

    auto apply = [&](WindowDataset& ds) {
        for (int i = 0; i < ds.size(); ++i) {
            for (int t = 0; t < ds.steps(); ++t) {
                for (int c = 0; c < d; ++c) {
                    float& v = ds.samples.at3(i, t, c);
                    v = (v - stats.mean[static_cast<std::size_t>(c)]) / stats.std_dev[static_cast<std::size_t>(c)];
                }
            }
        }
    };
    apply(train);
    for (WindowDataset* ds : others) {
        if (ds->channels() != d) throw DimensionError("normalize: channel count mismatch across datasets");
        apply(*ds);
    }
    return stats;
}

// ---------------------------------------------------------------------------
// Synthetic data

WindowDataset synth_generate(int classes, int per_class, int time_steps, int channels, std::uint64_t seed,
                             double noise_sigma) {
    if (classes < 2) throw ArgumentError("synth_generate needs at least 2 classes");
    if (per_class < 1 || time_steps < 1 || channels < 1) throw ArgumentError("synth_generate sizes must be positive");
    SeededRng rng(seed);
    const int n = classes * per_class;
    WindowDataset ds;
    ds.samples = Tensor({n, time_steps, channels});
    ds.labels.resize(static_cast<std::size_t>(n));
    ds.class_count = classes;
    for (int c = 0; c < channels; ++c) ds.channel_names.push_back("synth_" + std::to_string(c));

    int idx = 0;
    for (int cls = 0; cls < classes; ++cls) {
        // Distinct integer cycle counts keep the classes apart in the spectrum.
        const double freq = 2.0 + 3.0 * cls;
        for (int s = 0; s < per_class; ++s, ++idx) {
            for (int c = 0; c < channels; ++c) {
                const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
                for (int t = 0; t < time_steps; ++t) {
                    const double x = std::sin(2.0 * std::numbers::pi * freq * t / time_steps + phase) +
                                     noise_sigma * rng.normal();
                    ds.samples.at3(idx, t, c) = static_cast<float>(x);
                }
            }
            ds.labels[static_cast<std::size_t>(idx)] = cls;
        }
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Generic window CSV

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double_field(const std::string& s, const std::string& path, int line_no) {
    double v;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return v;
}

}  // namespace

WindowDataset load_window_csv(const std::string& data_path, const std::string& labels_path) {
    std::ifstream in(data_path);
    if (!in) throw IoError("missing dataset file: " + data_path);
    std::string line;
    int line_no = 0;

    // Header: optional "# ..." schema comment, then sample_id,t,d_0..d_{D-1}.
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        header = split_csv_line(line);
        break;
    }
    if (header.size() < 3 || header[0] != "sample_id" || header[1] != "t") {
        throw ParseError(data_path + ":" + std::to_string(line_no) + ": expected header sample_id,t,d_0,...");
    }
    const int d = static_cast<int>(header.size()) - 2;

    std::vector<std::vector<float>> rows;  // ordered (sample, step) blocks
    std::int64_t prev_id = -1, prev_t = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != d + 2) {
            throw ParseError(data_path + ":" + std::to_string(line_no) + ": expected " + std::to_string(d + 2) +
                             " columns, got " + std::to_string(fields.size()));
        }
        const auto id = static_cast<std::int64_t>(parse_double_field(fields[0], data_path, line_no));
        const auto t = static_cast<std::int64_t>(parse_double_field(fields[1], data_path, line_no));
        const bool continues = id == prev_id && t == prev_t + 1;
        const bool starts_next = id == prev_id + 1 && t == 0;
        if (!(continues || starts_next)) {
            throw ParseError(data_path + ":" + std::to_string(line_no) + ": rows must be ordered by (sample_id, t); got (" +
                             std::to_string(id) + ", " + std::to_string(t) + ")");
        }
        std::vector<float> vals(static_cast<std::size_t>(d));
        for (int c = 0; c < d; ++c) {
            vals[static_cast<std::size_t>(c)] =
                static_cast<float>(parse_double_field(fields[static_cast<std::size_t>(c + 2)], data_path, line_no));
        }
        rows.push_back(std::move(vals));
        prev_id = id;
        prev_t = t;
    }
    // Determine T from the labels file and total row count.
    std::ifstream lin(labels_path);
    if (!lin) throw IoError("missing dataset file: " + labels_path);
    std::vector<int> labels;
    int lab_line = 0;
    bool lab_header_seen = false;
    while (std::getline(lin, line)) {
        ++lab_line;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv_line(line);
        if (!lab_header_seen) {
            if (fields.size() != 2 || fields[0] != "sample_id" || fields[1] != "label") {
                throw ParseError(labels_path + ":" + std::to_string(lab_line) + ": expected header sample_id,label");
            }
            lab_header_seen = true;
            continue;
        }
        if (fields.size() != 2) throw ParseError(labels_path + ":" + std::to_string(lab_line) + ": expected 2 columns");
        const auto id = static_cast<std::int64_t>(parse_double_field(fields[0], labels_path, lab_line));
        const int label = static_cast<int>(parse_double_field(fields[1], labels_path, lab_line));
        if (id != static_cast<std::int64_t>(labels.size())) {
            throw ParseError(labels_path + ":" + std::to_string(lab_line) + ": labels must be ordered by sample_id");
        }
        labels.push_back(label);
    }
    if (labels.empty()) throw ParseError(labels_path + ": no labels");
    const std::int64_t total_rows = static_cast<std::int64_t>(rows.size());
    if (total_rows % static_cast<std::int64_t>(labels.size()) != 0) {
        throw ParseError(data_path + ": row count " + std::to_string(total_rows) + " is not a multiple of sample count " +
                         std::to_string(labels.size()));
    }
    const int t_steps = static_cast<int>(total_rows / static_cast<std::int64_t>(labels.size()));
    const int n_samples = static_cast<int>(labels.size());

    WindowDataset ds;
    ds.samples = Tensor({n_samples, t_steps, d});
    for (int i = 0; i < n_samples; ++i) {
        for (int t = 0; t < t_steps; ++t) {
            const auto& row = rows[static_cast<std::size_t>(static_cast<std::int64_t>(i) * t_steps + t)];
            for (int c = 0; c < d; ++c) ds.samples.at3(i, t, c) = row[static_cast<std::size_t>(c)];
        }
    }
    ds.labels = std::move(labels);
    int max_label = 0;
    for (int v : ds.labels) {
        if (v < 0) throw ParseError(labels_path + ": negative label " + std::to_string(v));
        max_label = std::max(max_label, v);
    }
    ds.class_count = max_label + 1;
    for (int c = 0; c < d; ++c) ds.channel_names.push_back(header[static_cast<std::size_t>(c + 2)]);
    ds.validate();
    return ds;
}

void save_window_csv(const WindowDataset& dataset, const std::string& data_path, const std::string& labels_path) {
    dataset.validate();
    const std::string data_tmp = data_path + ".tmp";
    {
        std::ofstream out(data_tmp, std::ios::trunc);
        if (!out) throw IoError("cannot open file for writing: " + data_tmp);
        out << "# spikehar-csv v1 windows\n";
        out << "sample_id,t";
        for (int c = 0; c < dataset.channels(); ++c) {
            out << ',' << (c < static_cast<int>(dataset.channel_names.size()) ? dataset.channel_names[static_cast<std::size_t>(c)]
                                                                              : "d_" + std::to_string(c));
        }
        out << '\n';
        char buf[64];
        for (int i = 0; i < dataset.size(); ++i) {
            for (int t = 0; t < dataset.steps(); ++t) {
                out << i << ',' << t;
                for (int c = 0; c < dataset.channels(); ++c) {
                    std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(dataset.samples.at3(i, t, c)));
                    out << ',' << buf;
                }
                out << '\n';
            }
        }
        if (!out) throw IoError("failed writing " + data_tmp);
    }
    if (std::rename(data_tmp.c_str(), data_path.c_str()) != 0) throw IoError("cannot move file into place: " + data_path);

    const std::string labels_tmp = labels_path + ".tmp";
    {
        std::ofstream out(labels_tmp, std::ios::trunc);
        if (!out) throw IoError("cannot open file for writing: " + labels_tmp);
        out << "# spikehar-csv v1 labels\n";
        out << "sample_id,label\n";
        for (int i = 0; i < dataset.size(); ++i) out << i << ',' << dataset.labels[static_cast<std::size_t>(i)] << '\n';
        if (!out) throw IoError("failed writing " + labels_tmp);
    }
    if (std::rename(labels_tmp.c_str(), labels_path.c_str()) != 0) {
        throw IoError("cannot move file into place: " + labels_path);
    }
}

// ---------------------------------------------------------------------------
// Batch assembly

TimeBatch make_time_batch(const WindowDataset& dataset, const std::vector<std::int64_t>& indices) {
    const int n = static_cast<int>(indices.size());
    const int steps = dataset.steps();
    const int d = dataset.channels();
    TimeBatch batch(Tensor({n, d, steps}), 1, d);
    float* out = batch.data.data();
    const float* src = dataset.samples.data();
    const std::int64_t sample_stride = static_cast<std::int64_t>(steps) * d;
    for (int i = 0; i < n; ++i) {
        const float* s = src + indices[static_cast<std::size_t>(i)] * sample_stride;
        for (int c = 0; c < d; ++c) {
            float* row = out + (static_cast<std::int64_t>(i) * d + c) * steps;
            for (int t = 0; t < steps; ++t) row[t] = s[static_cast<std::int64_t>(t) * d + c];
        }
    }
    return batch;
}

std::vector<int> gather_labels(const WindowDataset& dataset, const std::vector<std::int64_t>& indices) {
    std::vector<int> out(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) out[i] = dataset.labels[static_cast<std::size_t>(indices[i])];
    return out;
}

}  // namespace spikehar
