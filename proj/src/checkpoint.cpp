#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spikehar/errors.hpp"
#include "spikehar/model.hpp"

namespace spikehar {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'I', 'K', 'E', 'H', 'A', 'R'};

static_assert(std::endian::native == std::endian::little, "checkpoint payload is little-endian float32");

nlohmann::json spec_to_json(const ModelSpec& spec) {
    nlohmann::json j;
    j["input_channels"] = spec.input_channels;
    j["time_steps"] = spec.time_steps;
    j["class_count"] = spec.class_count;
    j["hidden"] = spec.hidden;
    j["neuron"] = neuron_kind_name(spec.neuron);
    j["seed"] = spec.seed;
    j["lif"] = {{"tau", spec.lif.tau},
                {"v_th", spec.lif.v_th},
                {"reset", spec.lif.reset == ResetMode::Hard ? "hard" : "soft"},
                {"reset_grad", spec.lif.reset_grad == ResetGrad::Attached ? "attached" : "detached"}};
    j["blocks"] = nlohmann::json::array();
    for (const auto& b : spec.blocks) {
        j["blocks"].push_back({{"channels", b.channels},
                               {"kernel", b.kernel},
                               {"stride", b.stride},
                               {"padding", b.padding},
                               {"pool", b.pool}});
    }
    return j;
}

ModelSpec spec_from_json(const nlohmann::json& j) {
    ModelSpec spec;
    spec.input_channels = j.at("input_channels").get<int>();
    spec.time_steps = j.at("time_steps").get<int>();
    spec.class_count = j.at("class_count").get<int>();
    spec.hidden = j.at("hidden").get<int>();
    spec.neuron = neuron_kind_from_name(j.at("neuron").get<std::string>());
    spec.seed = j.at("seed").get<std::uint64_t>();
    const auto& lj = j.at("lif");
    spec.lif.tau = lj.at("tau").get<double>();
    spec.lif.v_th = lj.at("v_th").get<double>();
    spec.lif.reset = lj.at("reset").get<std::string>() == "hard" ? ResetMode::Hard : ResetMode::Soft;
    spec.lif.reset_grad = lj.at("reset_grad").get<std::string>() == "attached" ? ResetGrad::Attached : ResetGrad::Detached;
    spec.blocks.clear();
    for (const auto& bj : j.at("blocks")) {
        spec.blocks.push_back({bj.at("channels").get<int>(), bj.at("kernel").get<int>(), bj.at("stride").get<int>(),
                               bj.at("padding").get<int>(), bj.at("pool").get<int>()});
    }
    return spec;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelT<float>& model, const ModelSpec& spec) {
    auto params = model.params();
    auto names = model.param_names();

    nlohmann::json header;
    header["format_version"] = kCheckpointVersion;
    header["model"] = spec_to_json(spec);
    header["tensors"] = nlohmann::json::array();
    std::int64_t offset = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        header["tensors"].push_back(
            {{"name", names[i]}, {"shape", params[i]->shape()}, {"offset", offset}, {"count", params[i]->size()}});
        offset += params[i]->size();
    }
    const std::string header_str = header.dump();

    // Write to a temp path and rename so a failed save never leaves a
    // truncated checkpoint behind.
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open checkpoint file for writing: " + tmp);
        out.write(kMagic, sizeof(kMagic));
        const std::uint32_t version = kCheckpointVersion;
        const std::uint32_t header_len = static_cast<std::uint32_t>(header_str.size());
        out.write(reinterpret_cast<const char*>(&version), sizeof(version));
        out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
        out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
        for (const Tensor* p : params) {
            out.write(reinterpret_cast<const char*>(p->data()), static_cast<std::streamsize>(p->size() * sizeof(float)));
        }
        if (!out) throw IoError("failed writing checkpoint: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot move checkpoint into place: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ParseError("not a checkpoint file: " + path);
    }
    std::uint32_t version = 0, header_len = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
    if (!in) throw ParseError("truncated checkpoint header: " + path);
    if (version != kCheckpointVersion) {
        throw VersionError("checkpoint format version " + std::to_string(version) + " is not supported (expected " +
                           std::to_string(kCheckpointVersion) + "): " + path);
    }
    std::string header_str(header_len, '\0');
    in.read(header_str.data(), header_len);
    if (!in) throw ParseError("truncated checkpoint header: " + path);

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_str);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad checkpoint header in " + path + ": " + e.what());
    }

    LoadedCheckpoint loaded{spec_from_json(header.at("model")), ModelT<float>{}};
    loaded.model = build_model<float>(loaded.spec);

    auto params = loaded.model.params();
    auto names = loaded.model.param_names();
    const auto& table = header.at("tensors");
    if (table.size() != params.size()) {
        throw ParseError("checkpoint tensor table does not match architecture: " + path);
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& entry = table[i];
        if (entry.at("name").get<std::string>() != names[i] ||
            entry.at("shape").get<std::vector<int>>() != params[i]->shape()) {
            throw ParseError("checkpoint tensor '" + entry.at("name").get<std::string>() +
                             "' does not match architecture: " + path);
        }
        in.read(reinterpret_cast<char*>(params[i]->data()), static_cast<std::streamsize>(params[i]->size() * sizeof(float)));
        if (!in) throw ParseError("truncated checkpoint payload: " + path);
    }
    return loaded;
}

}  // namespace spikehar
