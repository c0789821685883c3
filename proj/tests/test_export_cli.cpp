#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"

#include "lapwave/export.hpp"
#include "lapwave/graph.hpp"

using namespace lapwave;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Graph k2() { return Graph::build({"a", "b"}, {{0, 1}}); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

// ---- subprocess driver ----

fs::path work_dir() {
    const fs::path d = fs::temp_directory_path() / "lapwave_cli_test";
    fs::create_directories(d);
    return d;
}

struct CliResult {
    int exit_code = -1;
    std::string output; // stdout + stderr
};

CliResult run_cli(const std::string& args) {
    const fs::path cap = work_dir() / "capture.txt";
    const std::string cmd =
        std::string("\"") + LAPWAVE_CLI_PATH + "\" " + args + " > \"" + cap.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.output = slurp(cap);
    return r;
}

fs::path k2_file() {
    const fs::path p = work_dir() / "k2.txt";
    std::ofstream(p) << "0 1\n";
    return p;
}

} // namespace

TEST_CASE("format_double survives a parse round trip") {
    for (const double v : {0.1, -3.0, 1.0 / 3.0, 6.02e23, 5e-324, 0.0}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("spectrum csv is bin-major with labels and honors the probe filter") {
    SpectrumEstimate spec;
    spec.eps = 0.5;
    spec.samples = 8;
    spec.n_bins = 8;
    spec.nodes = {0, 1};
    spec.bins.assign(2 * 8, {0.0, 0.0});
    spec.bins[3] = {1.25, -2.5};      // node slot 0, bin 3
    spec.bins[8 + 3] = {0.75, 0.25};  // node slot 1, bin 3

    const Graph g = k2();
    const auto all = lines_of(spectrum_csv(spec, g));
    CHECK(all[0] == "theta,node,re,im");
    // bins 0..N/2 inclusive, two nodes each
    CHECK(all.size() == 1 + 2 * (8 / 2 + 1));
    const double theta3 = 3.0 * 2.0 * std::numbers::pi / (8 * 0.5);
    CHECK(all[1 + 2 * 3] == format_double(theta3) + ",a,1.25,-2.5");
    CHECK(all[1 + 2 * 3 + 1] == format_double(theta3) + ",b,0.75,0.25");

    const auto only_b = lines_of(spectrum_csv(spec, g, 1));
    CHECK(only_b.size() == 1 + (8 / 2 + 1));
    for (std::size_t i = 1; i < only_b.size(); ++i)
        CHECK(only_b[i].find(",b,") != std::string::npos);
}

TEST_CASE("trajectory csv is sample-major") {
    Trajectory traj;
    traj.eps = 0.25;
    traj.samples = 3;
    traj.nodes = {0, 1};
    traj.data = {{1, 0}, {2, 0}, {3, 0},      // node a samples
                 {10, -1}, {20, -2}, {30, -3}}; // node b samples

    const auto lines = lines_of(trajectory_csv(traj, k2()));
    REQUIRE(lines.size() == 1 + 3 * 2);
    CHECK(lines[0] == "time,node,re,im");
    CHECK(lines[1] == "0,a,1,0");
    CHECK(lines[2] == "0,b,10,-1");
    CHECK(lines[3] == "0.25,a,2,0");
    CHECK(lines[6] == "0.5,b,30,-3");
}

TEST_CASE("eigenpairs json toggles vector entries") {
    EigenPairEstimate p;
    p.lambda = 2.0;
    p.theta = 2.0;
    p.bin = 5;
    p.vector = {0.5, -0.5};
    const auto with = eigenpairs_json({p}, true);
    const auto without = eigenpairs_json({p}, false);
    CHECK(with[0]["lambda"] == 2.0);
    CHECK(with[0]["bin"] == 5);
    CHECK(with[0].contains("vector"));
    CHECK(with[0]["vector"].size() == 2);
    CHECK_FALSE(without[0].contains("vector"));
}

TEST_CASE("summary json shapes") {
    distsim::SimResult sim;
    sim.rounds.push_back({0, 1, 2, 1, 1, 2, 1});
    sim.total_packets = 1;
    sim.total_messages_directed = 2;
    sim.total_barriers = 1;
    const auto ds = distsim_stats_json(sim);
    CHECK(ds["rounds"].size() == 1);
    CHECK(ds["rounds"][0]["packets"] == 1);
    CHECK(ds["totals"]["global_reductions"] == 0);

    ConsensusRun run;
    run.w = 0.5;
    run.converged = true;
    run.steps = 7;
    const auto cj = consensus_json(run);
    CHECK(cj["w"] == 0.5);
    CHECK(cj["steps_to_converge"] == 7);

    ConsensusRun stuck;
    stuck.converged = false;
    stuck.steps = 99;
    CHECK(consensus_json(stuck)["steps_to_converge"] == -1);

    const Graph g = k2();
    ChosenParams params{0.5, 100, 0.1};
    const auto pj = params_json(g, params, 0.1, 1.0);
    CHECK(pj["n"] == 2);
    CHECK(pj["m"] == 1);
    CHECK(pj["lambda_max_bound"] == 2.0);
    CHECK(pj["samples"] == 100);
}

TEST_CASE("write_text_file creates parent directories") {
    const fs::path p = work_dir() / "nested" / "deep" / "file.txt";
    fs::remove_all(work_dir() / "nested");
    write_text_file(p, "payload\n");
    CHECK(slurp(p) == "payload\n");
}

// ---- CLI process behavior ----

TEST_CASE("cli help exits 0 and documents subcommands and flags") {
    const auto top = run_cli("--help");
    CHECK(top.exit_code == 0);
    for (const char* sub : {"spectrum", "peaks", "trajectory", "distsim", "consensus",
                            "params", "compare", "fetch"})
        CHECK(top.output.find(sub) != std::string::npos);

    const auto sub = run_cli("spectrum --help");
    CHECK(sub.exit_code == 0);
    for (const char* flag : {"--scheme", "--eps", "--samples", "--smoothing-v", "--seed",
                             "--probe", "--threshold", "--out", "--format", "--distributed",
                             "--safety"})
        CHECK(sub.output.find(flag) != std::string::npos);
}

TEST_CASE("cli usage errors exit 2") {
    CHECK(run_cli("nosuchcommand").exit_code == 2);
    CHECK(run_cli("spectrum").exit_code == 2);                       // missing graph
    CHECK(run_cli("spectrum /nonexistent_graph_file").exit_code == 2);
    const auto k2p = k2_file().string();
    CHECK(run_cli("spectrum " + k2p + " --scheme nope").exit_code == 2);
    CHECK(run_cli("spectrum " + k2p + " --eps 0.1").exit_code == 2); // no sample sizing
    CHECK(run_cli("spectrum " + k2p + " --eps 0.1 --samples 32 --probe zz").exit_code == 2);
    CHECK(run_cli("spectrum " + k2p + " --eps 0.1 --samples 32 --scheme si4 --distributed")
              .exit_code == 2);
    CHECK(run_cli("compare " + k2p + " --eps 0.1 --samples 32 --schemes si2").exit_code == 2);
}

TEST_CASE("cli runtime errors exit 1") {
    const auto k2p = k2_file().string();
    // Nyquist violation is a config error raised after parsing
    const auto r = run_cli("spectrum " + k2p + " --eps 1.7 --samples 32");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("error") != std::string::npos);
}

TEST_CASE("cli spectrum recovers the K2 spectrum and writes both artifacts") {
    const auto k2p = k2_file().string();
    const fs::path stem = work_dir() / "k2run";
    const auto r = run_cli("spectrum " + k2p +
                           " --eps 0.1 --samples 2000 --smoothing-v 0.001 --out " + stem.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("wrote") != std::string::npos);

    const auto csv = lines_of(slurp(stem.string() + ".csv"));
    CHECK(csv[0] == "theta,node,re,im");
    CHECK(csv.size() == 1 + 2 * (2048 / 2 + 1)); // padded to 2048 bins

    const json pairs = json::parse(slurp(stem.string() + ".json"));
    REQUIRE(pairs.size() == 2);
    CHECK(std::fabs(pairs[0]["lambda"].get<double>()) <= 1e-9);
    CHECK(pairs[1]["lambda"].get<double>() == doctest::Approx(2.0).epsilon(0.05));
    CHECK(pairs[0]["vector"].size() == 2);
}

TEST_CASE("cli reruns are byte-identical") {
    const auto k2p = k2_file().string();
    const fs::path a = work_dir() / "rerun_a";
    const fs::path b = work_dir() / "rerun_b";
    const std::string flags = " --eps 0.1 --samples 256 --smoothing-v 0.001 --seed 9 --out ";
    CHECK(run_cli("spectrum " + k2p + flags + a.string()).exit_code == 0);
    CHECK(run_cli("spectrum " + k2p + flags + b.string()).exit_code == 0);
    CHECK(slurp(a.string() + ".csv") == slurp(b.string() + ".csv"));
    CHECK(slurp(a.string() + ".json") == slurp(b.string() + ".json"));
}

TEST_CASE("cli distsim check passes and reports the packet law") {
    const auto k2p = k2_file().string();
    const fs::path out = work_dir() / "ds.json";
    const auto r = run_cli("distsim " + k2p +
                           " --eps 0.1 --samples 50 --schedule-seed 3 --locality-check --check --out " +
                           out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("bit-identical") != std::string::npos);
    const json j = json::parse(slurp(out));
    // m = 1: init m packets, then 2m per iteration
    CHECK(j["totals"]["packets"] == 1 + 2 * 49);
    CHECK(j["totals"]["barriers"] == 1 + 3 * 49);
    CHECK(j["totals"]["global_reductions"] == 0);
}

TEST_CASE("cli params emits the closed-form sizing") {
    const auto k2p = k2_file().string();
    const fs::path out = work_dir() / "params.json";
    const auto r = run_cli("params " + k2p + " --lambda-diff 0.5 --out " + out.string());
    CHECK(r.exit_code == 0);
    const json j = json::parse(slurp(out));
    CHECK(j["eps"].get<double>() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
    CHECK(j["samples"] == 8);
    CHECK(j["within_budget"] == true);

    CHECK(run_cli("params " + k2p).exit_code == 2); // --lambda-diff is required
}

TEST_CASE("cli consensus with an explicit weight averages K2 in one step") {
    const auto k2p = k2_file().string();
    const fs::path out = work_dir() / "consensus.json";
    const auto r = run_cli("consensus " + k2p + " --w 0.5 --out " + out.string());
    CHECK(r.exit_code == 0);
    const json j = json::parse(slurp(out));
    CHECK(j["converged"] == true);
    CHECK(j["steps_to_converge"] == 1);
    CHECK(j["final_error"] == 0.0);
    CHECK(j["mean_drift"].get<double>() <= 1e-12);
}

TEST_CASE("cli fetch verifies the committed dataset offline") {
    const std::string src = LAPWAVE_SOURCE_DIR;
    const auto r = run_cli("fetch lesmis --verify-only --data-dir \"" + src +
                           "/data\" --manifest \"" + src + "/data/datasets.json\"");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("sha256 ok") != std::string::npos);
    CHECK(r.output.find("[ok]") != std::string::npos);
}
