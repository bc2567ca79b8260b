// End-to-end checks of the command-line tool on desk-scale synthetic data.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(SPIKEHAR_CLI_PATH) + " " + args + " 2>&1";
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 512> buf;
    while (fgets(buf.data(), buf.size(), pipe)) res.output += buf.data();
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

double parse_metric(const std::string& output, const std::string& key) {
    const auto pos = output.find(key + " ");
    REQUIRE(pos != std::string::npos);
    return std::stod(output.substr(pos + key.size() + 1));
}

const std::string kTinySynth =
    "--data-kind synth --synth-classes 3 --synth-per-class 20 --synth-steps 16 --synth-channels 3 --synth-seed 7";

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("train writes metrics, a reloadable checkpoint, and is byte-deterministic") {
    TempDir out_a("spikehar_cli_train_a");
    TempDir out_b("spikehar_cli_train_b");
    const std::string common = "train " + kTinySynth + " --lr 1e-3 --epochs 2 --batch-size 16 --seed 1000 --quiet --out ";

    const RunResult a = run_cli(common + out_a.str());
    REQUIRE(a.exit_code == 0);
    const RunResult b = run_cli(common + out_b.str());
    REQUIRE(b.exit_code == 0);

    const std::string metrics_a = slurp(out_a.path / "metrics.csv");
    CHECK(metrics_a == slurp(out_b.path / "metrics.csv"));
    CHECK(metrics_a.find("# spikehar-csv v1 train-metrics") == 0);
    CHECK(metrics_a.find("epoch,lr,train_loss,train_acc,val_acc") != std::string::npos);
    CHECK(std::count(metrics_a.begin(), metrics_a.end(), '\n') == 4);  // schema + header + 2 epochs
    CHECK(slurp(out_a.path / "model.ckpt") == slurp(out_b.path / "model.ckpt"));

    // the checkpoint reloads and reproduces the reported test accuracy
    const double test_acc = parse_metric(a.output, "test_acc");
    const RunResult ev = run_cli("eval --checkpoint " + (out_a.path / "model.ckpt").string() + " " + kTinySynth +
                                 " --split test --out " + out_a.str());
    REQUIRE(ev.exit_code == 0);
    CHECK(parse_metric(ev.output, "top1_acc") == doctest::Approx(test_acc).epsilon(1e-9));
    CHECK(fs::exists(out_a.path / "confusion.csv"));
}

TEST_CASE("zero-epoch training emits a header-only csv and an init checkpoint") {
    TempDir out("spikehar_cli_train_zero");
    const RunResult r =
        run_cli("train " + kTinySynth + " --lr 1e-3 --epochs 0 --batch-size 16 --seed 1000 --quiet --out " + out.str());
    REQUIRE(r.exit_code == 0);
    const std::string metrics = slurp(out.path / "metrics.csv");
    CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 2);  // schema comment + column header only

    // an untrained model on balanced 3-class data sits near chance
    const RunResult ev = run_cli("eval --checkpoint " + (out.path / "model.ckpt").string() + " " + kTinySynth +
                                 " --split train --out " + out.str());
    REQUIRE(ev.exit_code == 0);
    const double acc = parse_metric(ev.output, "top1_acc");
    CHECK(acc > 0.1);
    CHECK(acc < 0.6);
}

TEST_CASE("dataset failures exit with code 2") {
    const RunResult r = run_cli("train --data-kind ucihar --data /no/such/dataset --epochs 1 --quiet --out /tmp/x");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("error") != std::string::npos);

    const RunResult no_path = run_cli("eval --checkpoint nope.ckpt --data-kind csv");
    CHECK(no_path.exit_code != 0);
}

TEST_CASE("the dataset root environment variable backs the --data flag") {
    // resolved through the env var (hence exit 2, a load failure, rather than
    // exit 1 for a missing path)
    const std::string cmd = std::string("SPIKEHAR_DATA_ROOT=/no/such/root ") + SPIKEHAR_CLI_PATH +
                            " train --data-kind ucihar --epochs 1 --quiet --out /tmp/x 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 256> buf;
    while (fgets(buf.data(), buf.size(), pipe)) {
    }
    const int status = pclose(pipe);
    CHECK(WEXITSTATUS(status) == 2);
}

TEST_CASE("checkpoint version mismatch exits with code 4") {
    TempDir out("spikehar_cli_version");
    const RunResult tr =
        run_cli("train " + kTinySynth + " --lr 1e-3 --epochs 0 --batch-size 16 --quiet --out " + out.str());
    REQUIRE(tr.exit_code == 0);
    const fs::path ckpt = out.path / "model.ckpt";
    {
        std::fstream f(ckpt, std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(8);
        const std::uint32_t future = 77;
        f.write(reinterpret_cast<const char*>(&future), sizeof(future));
    }
    const RunResult ev = run_cli("eval --checkpoint " + ckpt.string() + " " + kTinySynth + " --out " + out.str());
    CHECK(ev.exit_code == 4);
}

TEST_CASE("hwreport emits sparsity, energy, and a normalized two-row summary") {
    TempDir out("spikehar_cli_hw");
    const RunResult tr =
        run_cli("train " + kTinySynth + " --lr 1e-3 --epochs 2 --batch-size 16 --quiet --out " + out.str());
    REQUIRE(tr.exit_code == 0);
    const RunResult hw = run_cli("hwreport --checkpoint " + (out.path / "model.ckpt").string() + " " + kTinySynth +
                                 " --split test --out " + out.str());
    REQUIRE(hw.exit_code == 0);
    CHECK(parse_metric(hw.output, "weighted_sparsity") > 0.0);
    CHECK(parse_metric(hw.output, "normalized_ratio") > 0.0);

    const std::string summary = slurp(out.path / "summary.csv");
    CHECK(summary.find("ann,") != std::string::npos);
    CHECK(summary.find("snn,") != std::string::npos);
    CHECK(summary.find(",1\n") != std::string::npos);  // baseline normalized to one
    CHECK(slurp(out.path / "sparsity.csv").find("weighted_average") != std::string::npos);
    CHECK(slurp(out.path / "energy.csv").find("normalized_ratio") != std::string::npos);

    // a relu model reports ratio exactly 1 against itself
    TempDir rout("spikehar_cli_hw_relu");
    const RunResult rtr = run_cli("train " + kTinySynth +
                                  " --model relu_cnn --lr 1e-3 --epochs 1 --batch-size 16 --quiet --out " + rout.str());
    REQUIRE(rtr.exit_code == 0);
    const RunResult rhw = run_cli("hwreport --checkpoint " + (rout.path / "model.ckpt").string() + " " + kTinySynth +
                                  " --split test --out " + rout.str());
    REQUIRE(rhw.exit_code == 0);
    CHECK(parse_metric(rhw.output, "normalized_ratio") == doctest::Approx(1.0));
}

TEST_CASE("ablate sweeps a restricted axis and reports mean and std per cell") {
    TempDir out("spikehar_cli_ablate");
    const RunResult r = run_cli("ablate " + kTinySynth +
                                " --axes reset --seeds 1000,1001 --lr 1e-3 --epochs 1 --batch-size 16 --quiet --out " +
                                out.str());
    REQUIRE(r.exit_code == 0);
    const std::string sweep = slurp(out.path / "sweep.csv");
    CHECK(sweep.find("axis,value,mean_acc,std_acc") != std::string::npos);
    CHECK(sweep.find("reset,hard,") != std::string::npos);
    CHECK(sweep.find("reset,soft,") != std::string::npos);
    const std::string cells = slurp(out.path / "cells.csv");
    CHECK(cells.find("reset,hard,1000,") != std::string::npos);
    CHECK(cells.find("reset,soft,1001,") != std::string::npos);
}

TEST_CASE("config files provide defaults that flags override") {
    TempDir out("spikehar_cli_config");
    const fs::path cfg = out.path / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "data-kind=synth\nsynth-classes=3\nsynth-per-class=20\nsynth-steps=16\nsynth-channels=3\n"
          << "synth-seed=7\nlr=1e-3\nepochs=1\nbatch-size=16\nquiet=true\n";
    }
    const RunResult r = run_cli("train --config " + cfg.string() + " --out " + out.str());
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(out.path / "model.ckpt"));
}
