#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fetch.hpp"
#include "lapwave/consensus.hpp"
#include "lapwave/distsim.hpp"
#include "lapwave/errors.hpp"
#include "lapwave/export.hpp"
#include "lapwave/graph.hpp"
#include "lapwave/integrate.hpp"
#include "lapwave/rng.hpp"
#include "lapwave/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

using namespace lapwave;

// Post-parse flag problems (bad combinations, out-of-range graph references)
// exit with the usage code 2, like CLI11 parse errors.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Growth past this factor means the run left the oscillatory regime; every
// symplectic scheme stays near 1, explicit Euler blows through it quickly.
constexpr double kDivergedRatio = 2.0;

// ---- shared run flags ------------------------------------------------------

struct RunFlags {
    std::string graph_path;
    bool lcc = false;
    std::string scheme = "si2";
    std::string matrix = "laplacian";
    double eps = 0.0;        // 0 = derive from the degree bound
    long long samples = 0;   // 0 = derive from --lambda-diff
    double lambda_diff = 0.0;
    double safety = 1.0;
    long long budget = 100'000'000;
    double smoothing_v = 0.0;
    std::uint64_t seed = 1;
    std::string si4_coeffs;
    bool distributed = false;
    std::uint64_t schedule_seed = 0;
    bool locality_check = false;

    Scheme scheme_kind() const { return scheme_from_name(scheme); }
    MatrixKind matrix_kind() const {
        return matrix == "adjacency" ? MatrixKind::Adjacency : MatrixKind::Laplacian;
    }
};

void add_graph_options(CLI::App* sub, RunFlags& rf) {
    sub->add_option("graph", rf.graph_path, "graph file (.gml, anything else is read as an edge list)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_flag("--lcc", rf.lcc, "reduce to the largest connected component before running");
}

void add_budget_options(CLI::App* sub, RunFlags& rf) {
    sub->add_option("--eps", rf.eps, "time step; default safety*pi/(2*max_degree)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--samples", rf.samples, "trajectory samples s (includes t=0); default from --lambda-diff")
        ->check(CLI::PositiveNumber);
    sub->add_option("--lambda-diff", rf.lambda_diff,
                    "smallest eigenvalue gap to resolve; sets s = ceil(2*pi/(eps*lambda_diff))")
        ->check(CLI::PositiveNumber);
    sub->add_option("--safety", rf.safety, "step-size safety factor in (0,1]")
        ->check(CLI::Range(1e-9, 1.0));
    sub->add_option("--budget", rf.budget, "maximum admissible sample count")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", rf.seed, "seed for the random initial state");
}

void add_scheme_option(CLI::App* sub, RunFlags& rf, bool distributed_only = false) {
    const std::vector<std::string> all = {"euler", "leapfrog2", "si2", "si4"};
    const std::vector<std::string> dist = {"si2", "leapfrog2"};
    sub->add_option("--scheme", rf.scheme, "integration scheme")
        ->check(CLI::IsMember(distributed_only ? dist : all));
    sub->add_option("--matrix", rf.matrix, "operator driving the dynamics")
        ->check(CLI::IsMember({"laplacian", "adjacency"}));
    sub->add_option("--si4-coeffs", rf.si4_coeffs, "JSON stage-coefficient table for si4")
        ->check(CLI::ExistingFile);
}

void add_distributed_options(CLI::App* sub, RunFlags& rf) {
    sub->add_flag("--distributed", rf.distributed,
                  "route the run through the message-passing simulator (si2/leapfrog2 only)");
    sub->add_option("--schedule-seed", rf.schedule_seed,
                    "node execution order permutation seed for the simulator");
    sub->add_flag("--locality-check", rf.locality_check,
                  "assert that simulator nodes touch only their own state");
}

Graph load_graph(const RunFlags& rf, std::string* desc = nullptr) {
    LoadStats stats;
    Graph g = load_graph_file(rf.graph_path, {}, &stats);
    std::string d = "graph: " + rf.graph_path + " n=" + std::to_string(g.n()) +
                    " m=" + std::to_string(g.m());
    if (rf.lcc) {
        g = largest_connected_component(g);
        d += " -> lcc n=" + std::to_string(g.n()) + " m=" + std::to_string(g.m());
    }
    if (desc)
        *desc = d;
    return g;
}

// Fills eps/samples from the degree bound and --lambda-diff where the user
// left them open. cap_sqrt trims the step below the Lagrangian stability
// limit 2/sqrt(lambda_max_bound) when a leapfrog2 run is among the targets.
void resolve_budget(const Graph& g, RunFlags& rf, bool cap_sqrt) {
    const double bound = g.lambda_max_bound();
    if (rf.eps <= 0.0) {
        if (bound <= 0.0)
            throw ConfigError("graph has no edges: lambda_max_bound = 0, pass --eps explicitly");
        rf.eps = rf.safety * std::numbers::pi / bound;
        if (cap_sqrt)
            rf.eps = std::min(rf.eps, 0.9 * 2.0 / std::sqrt(bound));
    }
    if (rf.samples <= 0) {
        if (rf.lambda_diff <= 0.0)
            throw UsageError("need --samples or --lambda-diff to size the run");
        const double s_real = 2.0 * std::numbers::pi / (rf.eps * rf.lambda_diff);
        rf.samples = std::max<long long>(
            2, static_cast<long long>(std::ceil(s_real * (1.0 - 1e-12))));
    }
    if (rf.samples > rf.budget)
        throw ConfigError("samples " + std::to_string(rf.samples) + " exceed budget " +
                          std::to_string(rf.budget) +
                          " (raise --budget or relax --lambda-diff)");
}

RunConfig make_config(const RunFlags& rf) {
    RunConfig cfg;
    cfg.scheme = rf.scheme_kind();
    cfg.matrix = rf.matrix_kind();
    cfg.eps = rf.eps;
    cfg.samples = rf.samples;
    cfg.smoothing_v = rf.smoothing_v;
    cfg.seed = rf.seed;
    return cfg;
}

StageCoefficients coeffs_of(const RunFlags& rf) {
    return rf.si4_coeffs.empty() ? StageCoefficients::order4_default()
                                 : StageCoefficients::from_json_file(rf.si4_coeffs);
}

// Label first, falling back to a numeric node index.
int resolve_node(const Graph& g, const std::string& token) {
    if (auto idx = g.find_label(token))
        return *idx;
    try {
        std::size_t pos = 0;
        const int v = std::stoi(token, &pos);
        if (pos == token.size() && v >= 0 && v < g.n())
            return v;
    } catch (const std::exception&) {
    }
    throw UsageError("node '" + token + "' is neither a label nor an index below " +
                     std::to_string(g.n()));
}

Trajectory integrate(const Graph& g, const RunConfig& cfg, const StatePair& st,
                     const RunFlags& rf, distsim::SimResult* stats = nullptr) {
    if (rf.distributed) {
        distsim::SimOptions opts;
        opts.schedule_seed = rf.schedule_seed;
        opts.locality_check = rf.locality_check;
        distsim::SimResult res;
        if (cfg.scheme == Scheme::SI2)
            res = distsim::run_distributed_si2(g, cfg, st, opts);
        else if (cfg.scheme == Scheme::Leapfrog2)
            res = distsim::run_distributed_leapfrog2(g, cfg, st, opts);
        else
            throw UsageError("--distributed supports si2 and leapfrog2 only");
        if (stats)
            *stats = res;
        Trajectory traj = std::move(res.trajectory);
        if (stats)
            stats->trajectory = traj;
        return traj;
    }
    if (cfg.scheme == Scheme::SI4)
        return si4_run(g, cfg, st, coeffs_of(rf));
    return run_scheme(g, cfg, st);
}

void print_run_line(const RunConfig& cfg, std::size_t n_bins, double resolution) {
    std::cout << "run: scheme=" << scheme_name(cfg.scheme)
              << " matrix=" << (cfg.matrix == MatrixKind::Adjacency ? "adjacency" : "laplacian")
              << " eps=" << short_num(cfg.eps) << " samples=" << cfg.samples;
    if (n_bins)
        std::cout << " bins=" << n_bins << " resolution=" << short_num(resolution);
    std::cout << " v=" << short_num(cfg.smoothing_v) << " seed=" << cfg.seed << "\n";
}

void print_norm_line(const Trajectory& traj) {
    std::cout << "norm: max_ratio=" << short_num(traj.max_norm_ratio)
              << " final_ratio=" << short_num(traj.final_norm_ratio) << "\n";
    if (traj.max_norm_ratio > kDivergedRatio)
        std::cout << "warning: state norm grew by " << short_num(traj.max_norm_ratio)
                  << "x, the trajectory is diverging and peak estimates are unreliable\n";
}

// ---- output plumbing -------------------------------------------------------

enum class Artifact { Csv, Json, Both };

Artifact artifact_for(const std::string& format, const std::string& out, Artifact dflt) {
    if (format == "csv")
        return Artifact::Csv;
    if (format == "json")
        return Artifact::Json;
    if (out.size() >= 4 && out.substr(out.size() - 4) == ".csv")
        return Artifact::Csv;
    if (out.size() >= 5 && out.substr(out.size() - 5) == ".json")
        return Artifact::Json;
    return dflt;
}

void emit(const fs::path& path, const std::string& content) {
    write_text_file(path, content);
    std::cout << "wrote " << path.string() << "\n";
}

std::string json_text(const ordered_json& j) { return j.dump(2) + "\n"; }

double rms_magnitude(const SpectrumEstimate& spec, std::size_t bin, int probe_slot) {
    if (probe_slot >= 0)
        return std::abs(spec.bins[static_cast<std::size_t>(probe_slot) * spec.n_bins + bin]);
    double acc = 0.0;
    for (std::size_t slot = 0; slot < spec.nodes.size(); ++slot)
        acc += std::norm(spec.bins[slot * spec.n_bins + bin]);
    return std::sqrt(acc / static_cast<double>(spec.nodes.size()));
}

// ---- spectrum / peaks -------------------------------------------------------

struct SpectrumCmd {
    RunFlags rf;
    std::string probe;
    double threshold = 0.05;
    std::string part = "real";
    std::string estimator = "onesided";
    double t0 = 0.0;
    bool omit_vectors = false;
    std::string out, format;

    PeakOptions peak_options() const {
        return {threshold, part == "abs" ? PeakPart::Abs : PeakPart::Real};
    }
    EstimatorKind estimator_kind() const {
        return estimator == "plain" ? EstimatorKind::Plain : EstimatorKind::OneSided;
    }
};

void add_spectral_options(CLI::App* sub, SpectrumCmd& o) {
    sub->add_option("--probe", o.probe,
                    "detect peaks on this node only (label or index); default aggregates all nodes");
    sub->add_option("--threshold", o.threshold,
                    "peak height relative to the band maximum")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--part", o.part, "component used for peak detection")
        ->check(CLI::IsMember({"real", "abs"}));
    sub->add_option("--estimator", o.estimator,
                    "onesided doubles samples past t=0 before transforming")
        ->check(CLI::IsMember({"onesided", "plain"}));
    sub->add_option("--t0", o.t0, "phase-correction time offset");
    sub->add_option("--smoothing-v", o.rf.smoothing_v,
                    "Gaussian window variance (0 disables smoothing)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--out", o.out, "output path; unsuffixed paths get .csv and .json");
    sub->add_option("--format", o.format, "restrict --out to one artifact")
        ->check(CLI::IsMember({"csv", "json"}));
}

struct SpectrumResult {
    Graph g;
    StatePair st;
    Trajectory traj;
    SpectrumEstimate spec;
    std::vector<std::size_t> bins;
    int probe = -1;
};

SpectrumResult run_spectrum_pipeline(SpectrumCmd& o) {
    SpectrumResult r;
    std::string gdesc;
    r.g = load_graph(o.rf, &gdesc);
    resolve_budget(r.g, o.rf, o.rf.scheme_kind() == Scheme::Leapfrog2);
    std::cout << gdesc << "\n";
    const RunConfig cfg = make_config(o.rf);
    r.st = init_state(r.g.n(), cfg.seed, InitMode::RandomGaussianX_ZeroY);
    r.traj = integrate(r.g, cfg, r.st, o.rf);
    r.spec = trajectory_dft(r.traj, cfg.smoothing_v, o.t0, o.estimator_kind());
    r.probe = o.probe.empty() ? -1 : resolve_node(r.g, o.probe);
    r.bins = r.probe >= 0 ? detect_peaks(r.spec, r.probe, o.peak_options())
                          : detect_peaks_aggregate(r.spec, o.peak_options());
    print_run_line(cfg, r.spec.n_bins, r.spec.grid_spacing());
    print_norm_line(r.traj);
    return r;
}

int cmd_spectrum(SpectrumCmd& o) {
    SpectrumResult r = run_spectrum_pipeline(o);
    auto pairs = extract_eigenpairs(r.spec, r.bins, r.st.a0, r.traj.scheme);

    const int probe_slot = r.probe >= 0 ? r.spec.slot_of(r.probe) : -1;
    std::cout << "peaks: " << pairs.size() << " (threshold " << short_num(o.threshold)
              << ", part " << o.part << ", "
              << (r.probe >= 0 ? "probe " + r.g.label(r.probe) : std::string("aggregate"))
              << ")\n";
    std::cout << "  lambda          theta           bin      magnitude\n";
    for (const auto& p : pairs) {
        char row[128];
        std::snprintf(row, sizeof(row), "  %-15.9g %-15.9g %-8zu %.9g\n", p.lambda, p.theta,
                      p.bin, rms_magnitude(r.spec, p.bin, probe_slot));
        std::cout << row;
    }

    if (!o.out.empty()) {
        const Artifact a = artifact_for(o.format, o.out, Artifact::Both);
        if (a == Artifact::Csv) {
            emit(o.out, spectrum_csv(r.spec, r.g, r.probe));
        } else if (a == Artifact::Json) {
            emit(o.out, json_text(eigenpairs_json(pairs, !o.omit_vectors)));
        } else {
            emit(o.out + ".csv", spectrum_csv(r.spec, r.g, r.probe));
            emit(o.out + ".json", json_text(eigenpairs_json(pairs, !o.omit_vectors)));
        }
    }
    return 0;
}

int cmd_peaks(SpectrumCmd& o) {
    SpectrumResult r = run_spectrum_pipeline(o);
    const int probe_slot = r.probe >= 0 ? r.spec.slot_of(r.probe) : -1;

    std::cout << "peaks: " << r.bins.size() << " (threshold " << short_num(o.threshold)
              << ", part " << o.part << ", "
              << (r.probe >= 0 ? "probe " + r.g.label(r.probe) : std::string("aggregate"))
              << ")\n";
    std::cout << "  bin      theta           lambda          magnitude\n";
    std::string csv = "bin,theta,lambda,magnitude\n";
    ordered_json jpeaks = ordered_json::array();
    for (const std::size_t b : r.bins) {
        const double theta = r.spec.theta(b);
        const double lambda = frequency_to_eigenvalue(theta, r.traj.scheme);
        const double mag = rms_magnitude(r.spec, b, probe_slot);
        char row[128];
        std::snprintf(row, sizeof(row), "  %-8zu %-15.9g %-15.9g %.9g\n", b, theta, lambda, mag);
        std::cout << row;
        csv += std::to_string(b) + "," + format_double(theta) + "," + format_double(lambda) +
               "," + format_double(mag) + "\n";
        jpeaks.push_back({{"bin", b}, {"theta", theta}, {"lambda", lambda}, {"magnitude", mag}});
    }
    if (!o.out.empty()) {
        const Artifact a = artifact_for(o.format, o.out, Artifact::Csv);
        if (a == Artifact::Json)
            emit(o.out, json_text(ordered_json{{"peaks", jpeaks}}));
        else
            emit(o.out, csv);
    }
    return 0;
}

// ---- trajectory -------------------------------------------------------------

struct TrajectoryCmd {
    RunFlags rf;
    std::vector<std::string> probes;
    bool record_energy = false;
    std::string out, format;
};

int cmd_trajectory(TrajectoryCmd& o) {
    std::string gdesc;
    Graph g = load_graph(o.rf, &gdesc);
    resolve_budget(g, o.rf, o.rf.scheme_kind() == Scheme::Leapfrog2);
    std::cout << gdesc << "\n";
    RunConfig cfg = make_config(o.rf);
    cfg.record_energy = o.record_energy;
    for (const auto& tok : o.probes)
        cfg.probe_nodes.push_back(resolve_node(g, tok));
    const StatePair st = init_state(g.n(), cfg.seed, InitMode::RandomGaussianX_ZeroY);
    const Trajectory traj = integrate(g, cfg, st, o.rf);

    print_run_line(cfg, 0, 0.0);
    std::cout << "recorded nodes: " << traj.nodes.size() << "\n";
    print_norm_line(traj);
    if (!traj.energy.empty()) {
        double drift = 0.0;
        for (const double e : traj.energy)
            drift = std::max(drift, std::fabs(e - traj.energy.front()));
        const double rel = drift / std::max(std::fabs(traj.energy.front()), 1e-300);
        std::cout << "energy: H0=" << short_num(traj.energy.front())
                  << " max_drift=" << short_num(drift) << " relative=" << short_num(rel) << "\n";
    }

    if (!o.out.empty()) {
        const Artifact a = artifact_for(o.format, o.out, Artifact::Csv);
        if (a == Artifact::Json) {
            ordered_json j;
            j["scheme"] = scheme_name(traj.scheme);
            j["eps"] = traj.eps;
            j["samples"] = traj.samples;
            ordered_json labels = ordered_json::array();
            for (const int u : traj.nodes)
                labels.push_back(g.label(u));
            j["nodes"] = std::move(labels);
            j["max_norm_ratio"] = traj.max_norm_ratio;
            j["final_norm_ratio"] = traj.final_norm_ratio;
            if (!traj.energy.empty())
                j["energy"] = traj.energy;
            emit(o.out, json_text(j));
        } else {
            emit(o.out, trajectory_csv(traj, g));
        }
    }
    return 0;
}

// ---- distsim ----------------------------------------------------------------

struct DistsimCmd {
    RunFlags rf;
    bool check = false;
    std::string out, format;
};

int cmd_distsim(DistsimCmd& o) {
    std::string gdesc;
    Graph g = load_graph(o.rf, &gdesc);
    resolve_budget(g, o.rf, o.rf.scheme_kind() == Scheme::Leapfrog2);
    std::cout << gdesc << "\n";
    const RunConfig cfg = make_config(o.rf);
    const StatePair st = init_state(g.n(), cfg.seed, InitMode::RandomGaussianX_ZeroY);

    distsim::SimOptions opts;
    opts.schedule_seed = o.rf.schedule_seed;
    opts.locality_check = o.rf.locality_check;
    const distsim::SimResult res = cfg.scheme == Scheme::SI2
                                       ? distsim::run_distributed_si2(g, cfg, st, opts)
                                       : distsim::run_distributed_leapfrog2(g, cfg, st, opts);

    print_run_line(cfg, 0, 0.0);
    std::cout << "schedule_seed=" << opts.schedule_seed
              << " locality_check=" << (opts.locality_check ? "on" : "off") << "\n";
    if (res.rounds.size() > 1) {
        const auto& r1 = res.rounds[1];
        std::cout << "per iteration: packets=" << r1.packets
                  << " messages_directed=" << r1.messages_directed
                  << " barriers=" << r1.barriers << "\n";
    }
    std::cout << "totals: iterations=" << cfg.samples - 1 << " packets=" << res.total_packets
              << " messages_directed=" << res.total_messages_directed
              << " barriers=" << res.total_barriers
              << " global_reductions=" << res.global_reductions << "\n";
    print_norm_line(res.trajectory);

    if (o.check) {
        const Trajectory central = run_scheme(g, cfg, st);
        const bool same =
            central.data.size() == res.trajectory.data.size() &&
            std::memcmp(central.data.data(), res.trajectory.data.data(),
                        central.data.size() * sizeof(std::complex<double>)) == 0;
        std::cout << "check: centralized trajectory "
                  << (same ? "bit-identical" : "MISMATCH") << "\n";
        if (!same) {
            std::cerr << "error: distributed trajectory differs from the centralized run\n";
            return 1;
        }
    }

    if (!o.out.empty()) {
        const Artifact a = artifact_for(o.format, o.out, Artifact::Json);
        if (a == Artifact::Csv) {
            std::string csv = "iter,packets,messages_directed,barriers\n";
            for (const auto& r : res.rounds)
                csv += std::to_string(r.iteration) + "," + std::to_string(r.packets) +
                       "," + std::to_string(r.messages_directed) + "," +
                       std::to_string(r.barriers) + "\n";
            emit(o.out, csv);
        } else {
            emit(o.out, json_text(distsim_stats_json(res)));
        }
    }
    return 0;
}

// ---- consensus ---------------------------------------------------------------

struct ConsensusCmd {
    RunFlags rf;
    int rgg_n = 0;
    double rgg_radius = 0.0;
    std::uint64_t rgg_seed = 1;
    double w = 0.0; // 0 = derive from the estimated spectrum
    double tau = 1e-8;
    long long max_steps = 100'000;
    std::uint64_t values_seed = 1;
    double threshold = 0.05;
    std::string out, format;
};

int cmd_consensus(ConsensusCmd& o) {
    Graph g;
    ordered_json jrgg;
    if (o.rgg_n > 0 || o.rgg_radius > 0.0) {
        if (!o.rf.graph_path.empty())
            throw UsageError("give either a graph file or --rgg-n/--rgg-radius, not both");
        if (o.rgg_n <= 0 || o.rgg_radius <= 0.0)
            throw UsageError("--rgg-n and --rgg-radius must both be set");
        RggSample sample = rgg_connected_sample({o.rgg_n, o.rgg_radius, o.rgg_seed});
        g = std::move(sample.graph);
        std::cout << "rgg: n=" << o.rgg_n << " radius=" << short_num(o.rgg_radius)
                  << " seed_used=" << sample.seed_used << " rejected=" << sample.rejected
                  << " m=" << g.m() << "\n";
        jrgg = {{"n", o.rgg_n},
                {"radius", o.rgg_radius},
                {"seed_used", sample.seed_used},
                {"rejected", sample.rejected}};
    } else {
        if (o.rf.graph_path.empty())
            throw UsageError("consensus needs a graph file or --rgg-n/--rgg-radius");
        std::string gdesc;
        g = load_graph(o.rf, &gdesc);
        std::cout << gdesc << "\n";
        if (!is_connected(g))
            throw ConfigError("graph is disconnected; consensus needs a connected graph (try --lcc)");
    }

    double w = o.w;
    double l2_hat = 0.0, lmax_hat = 0.0;
    if (w <= 0.0) {
        resolve_budget(g, o.rf, o.rf.scheme_kind() == Scheme::Leapfrog2);
        const RunConfig cfg = make_config(o.rf);
        const StatePair st = init_state(g.n(), cfg.seed, InitMode::RandomGaussianX_ZeroY);
        const Trajectory traj = integrate(g, cfg, st, o.rf);
        const SpectrumEstimate spec = trajectory_dft(traj, cfg.smoothing_v);
        const auto bins = detect_peaks_aggregate(spec, {o.threshold, PeakPart::Abs});
        const auto pairs = extract_eigenpairs(spec, bins, st.a0, cfg.scheme);
        const double floor = 0.5 * spec.grid_spacing();
        for (const auto& p : pairs) {
            if (p.lambda <= floor)
                continue;
            if (l2_hat == 0.0)
                l2_hat = p.lambda;
            lmax_hat = p.lambda;
        }
        if (l2_hat == 0.0)
            throw ConfigError("no nonzero spectral peaks resolved; raise --samples or lower --threshold");
        w = best_constant_weight(lmax_hat, l2_hat);
        std::cout << "spectrum: scheme=" << scheme_name(cfg.scheme) << " eps=" << short_num(cfg.eps)
                  << " samples=" << cfg.samples << " lambda2_hat=" << short_num(l2_hat)
                  << " lambda_max_hat=" << short_num(lmax_hat) << "\n";
    }

    std::vector<double> m(static_cast<std::size_t>(g.n()));
    Rng rng(o.values_seed);
    for (double& v : m)
        v = rng.uniform01();

    const ConsensusRun run = consensus_run(g, w, m, o.tau, o.max_steps);
    double mean_drift = 0.0;
    for (const double mu : run.mean_history)
        mean_drift = std::max(mean_drift, std::fabs(mu - run.initial_mean));

    std::cout << "consensus: w=" << short_num(w) << " "
              << (run.converged ? "converged" : "did NOT converge") << " steps=" << run.steps
              << " final_error=" << short_num(run.final_error) << " tau=" << short_num(o.tau)
              << "\n";
    std::cout << "mean: " << short_num(run.initial_mean) << " drift=" << short_num(mean_drift)
              << "\n";

    if (!o.out.empty()) {
        const Artifact a = artifact_for(o.format, o.out, Artifact::Json);
        if (a == Artifact::Csv) {
            std::string csv = "step,error,mean\n";
            const std::size_t rows = std::min(run.error_history.size(), run.mean_history.size());
            for (std::size_t i = 0; i < rows; ++i)
                csv += std::to_string(i) + "," + format_double(run.error_history[i]) + "," +
                       format_double(run.mean_history[i]) + "\n";
            emit(o.out, csv);
        } else {
            ordered_json j = consensus_json(run);
            if (l2_hat > 0.0) {
                j["lambda_second_hat"] = l2_hat;
                j["lambda_largest_hat"] = lmax_hat;
            }
            j["tau"] = o.tau;
            j["max_steps"] = o.max_steps;
            j["mean_drift"] = mean_drift;
            if (!jrgg.is_null())
                j["rgg"] = jrgg;
            emit(o.out, json_text(j));
        }
    }
    return 0;
}

// ---- params -------------------------------------------------------------------

struct ParamsCmd {
    RunFlags rf;
    std::string out, format;
};

int cmd_params(ParamsCmd& o) {
    std::string gdesc;
    const Graph g = load_graph(o.rf, &gdesc);
    if (o.rf.lambda_diff <= 0.0)
        throw UsageError("params needs --lambda-diff");
    const ChosenParams p = choose_params(g.lambda_max_bound(), o.rf.lambda_diff, o.rf.safety,
                                         std::numeric_limits<long long>::max());
    std::cout << gdesc << "\n";
    std::cout << "max_degree = " << g.max_degree() << "\n";
    std::cout << "lambda_max_bound = 2 * max_degree = " << short_num(g.lambda_max_bound())
              << "\n";
    std::cout << "eps = safety * pi / lambda_max_bound = " << format_double(p.eps) << "\n";
    std::cout << "samples = ceil(2 pi / (eps * lambda_diff)) = " << p.samples << "\n";
    std::cout << "resolution = 2 pi / (samples * eps) = " << format_double(p.resolution) << "\n";
    if (p.samples > o.rf.budget) {
        const double achievable =
            2.0 * std::numbers::pi / (p.eps * static_cast<double>(o.rf.budget));
        std::cout << "warning: samples exceed budget " << o.rf.budget
                  << "; achievable lambda_diff at this budget is " << short_num(achievable)
                  << "\n";
    }
    if (!o.out.empty()) {
        const Artifact a = artifact_for(o.format, o.out, Artifact::Json);
        if (a == Artifact::Csv)
            throw UsageError("params supports --format json only");
        ordered_json j = params_json(g, p, o.rf.lambda_diff, o.rf.safety);
        j["sample_budget"] = o.rf.budget;
        j["within_budget"] = p.samples <= o.rf.budget;
        emit(o.out, json_text(j));
    }
    return 0;
}

// ---- compare -------------------------------------------------------------------

struct CompareCmd {
    RunFlags rf;
    std::vector<std::string> schemes{"leapfrog2", "si2"};
    std::string ref_path;
    double match_tol = 0.0; // 0 = half the frequency-grid spacing
    double threshold = 0.05;
    std::string part = "abs";
    std::string out, format;
};

std::vector<double> load_reference(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open reference file " + path);
    const nlohmann::json doc = nlohmann::json::parse(in);
    std::vector<double> out;
    for (const auto& item : doc) {
        if (item.is_number())
            out.push_back(item.get<double>());
        else if (item.is_object() && item.contains("lambda"))
            out.push_back(item["lambda"].get<double>());
        else
            throw ParseError("reference entries must be numbers or objects with a lambda key");
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct SchemeOutcome {
    std::string name;
    bool diverged = false;
    long long diverged_step = -1;
    std::vector<double> lambdas;
    std::vector<double> energy;
    double energy_drift = 0.0;
    double max_norm_ratio = 1.0;
    int matches = 0;
};

int cmd_compare(CompareCmd& o) {
    std::vector<std::string> schemes = o.schemes;
    std::sort(schemes.begin(), schemes.end());
    schemes.erase(std::unique(schemes.begin(), schemes.end()), schemes.end());
    if (schemes.size() < 2)
        throw UsageError("compare needs at least two distinct --schemes");
    // restore the user's order after the dedupe
    std::vector<std::string> ordered;
    for (const auto& s : o.schemes)
        if (std::find(ordered.begin(), ordered.end(), s) == ordered.end())
            ordered.push_back(s);

    std::string gdesc;
    const Graph g = load_graph(o.rf, &gdesc);
    const bool has_lf =
        std::find(ordered.begin(), ordered.end(), "leapfrog2") != ordered.end();
    resolve_budget(g, o.rf, has_lf);
    std::cout << gdesc << "\n";
    std::cout << "shared budget: eps=" << short_num(o.rf.eps) << " samples=" << o.rf.samples
              << " v=" << short_num(o.rf.smoothing_v) << " seed=" << o.rf.seed << "\n";

    const StatePair st = init_state(g.n(), o.rf.seed, InitMode::RandomGaussianX_ZeroY);
    const PeakPart part = o.part == "real" ? PeakPart::Real : PeakPart::Abs;
    double match_tol = o.match_tol;

    std::vector<SchemeOutcome> outcomes;
    for (const auto& name : ordered) {
        SchemeOutcome res;
        res.name = name;
        RunFlags rf = o.rf;
        rf.scheme = name;
        RunConfig cfg = make_config(rf);
        cfg.record_energy = true;
        try {
            const Trajectory traj = integrate(g, cfg, st, rf);
            res.energy = traj.energy;
            res.max_norm_ratio = traj.max_norm_ratio;
            for (const double e : traj.energy)
                res.energy_drift = std::max(
                    res.energy_drift, std::fabs(e - traj.energy.front()) /
                                          std::max(std::fabs(traj.energy.front()), 1e-300));
            const SpectrumEstimate spec = trajectory_dft(traj, cfg.smoothing_v);
            if (match_tol <= 0.0)
                match_tol = 0.5 * spec.grid_spacing();
            const auto bins = detect_peaks_aggregate(spec, {o.threshold, part});
            const auto pairs = extract_eigenpairs(spec, bins, st.a0, cfg.scheme);
            for (const auto& p : pairs)
                res.lambdas.push_back(p.lambda);
        } catch (const DivergenceError& e) {
            res.diverged = true;
            res.diverged_step = e.step;
        }
        outcomes.push_back(std::move(res));
    }

    std::vector<double> reference;
    std::string ref_source;
    if (!o.ref_path.empty()) {
        reference = load_reference(o.ref_path);
        ref_source = o.ref_path;
    } else {
        // highest-order non-diverged run stands in for a reference
        for (const char* pick : {"si4", "si2", "leapfrog2", "euler"}) {
            for (const auto& r : outcomes)
                if (r.name == pick && !r.diverged && !r.lambdas.empty() && reference.empty()) {
                    reference = r.lambdas;
                    ref_source = "scheme " + r.name;
                }
        }
    }

    for (auto& r : outcomes) {
        for (const double lam : reference)
            for (const double est : r.lambdas)
                if (std::fabs(est - lam) <= match_tol) {
                    ++r.matches;
                    break;
                }
    }

    std::cout << "reference: " << (ref_source.empty() ? "none" : ref_source)
              << " (" << reference.size() << " values, match_tol=" << short_num(match_tol)
              << ")\n";
    std::cout << "  scheme      peaks  matches  energy_drift  max_norm_ratio\n";
    for (const auto& r : outcomes) {
        char row[160];
        if (r.diverged)
            std::snprintf(row, sizeof(row), "  %-11s diverged at step %lld\n", r.name.c_str(),
                          r.diverged_step);
        else
            std::snprintf(row, sizeof(row), "  %-11s %-6zu %d/%zu     %-13.6g %.6g\n",
                          r.name.c_str(), r.lambdas.size(), r.matches, reference.size(),
                          r.energy_drift, r.max_norm_ratio);
        std::cout << row;
    }

    if (!o.out.empty()) {
        const Artifact a = artifact_for(o.format, o.out, Artifact::Json);
        if (a == Artifact::Csv) {
            std::string csv = "scheme,time,energy\n";
            for (const auto& r : outcomes)
                for (std::size_t l = 0; l < r.energy.size(); ++l)
                    csv += r.name + "," + format_double(static_cast<double>(l) * o.rf.eps) +
                           "," + format_double(r.energy[l]) + "\n";
            emit(o.out, csv);
        } else {
            ordered_json j;
            j["eps"] = o.rf.eps;
            j["samples"] = o.rf.samples;
            j["match_tol"] = match_tol;
            j["reference"] = reference;
            j["reference_source"] = ref_source;
            ordered_json arr = ordered_json::array();
            for (const auto& r : outcomes) {
                ordered_json e;
                e["scheme"] = r.name;
                e["diverged"] = r.diverged;
                if (r.diverged)
                    e["diverged_step"] = r.diverged_step;
                e["lambdas"] = r.lambdas;
                e["matches"] = r.matches;
                e["energy_drift_max"] = r.energy_drift;
                e["max_norm_ratio"] = r.max_norm_ratio;
                arr.push_back(std::move(e));
            }
            j["schemes"] = std::move(arr);
            emit(o.out, json_text(j));
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"matrix-free graph spectra from symplectic wave dynamics"};
    app.require_subcommand(1);

    std::function<int()> action;

    SpectrumCmd spectrum_opts;
    {
        auto* sub = app.add_subcommand(
            "spectrum", "integrate, transform, and extract eigenvalue/eigenvector estimates");
        add_graph_options(sub, spectrum_opts.rf);
        add_scheme_option(sub, spectrum_opts.rf);
        add_budget_options(sub, spectrum_opts.rf);
        add_distributed_options(sub, spectrum_opts.rf);
        add_spectral_options(sub, spectrum_opts);
        sub->add_flag("--omit-vectors", spectrum_opts.omit_vectors,
                      "skip eigenvector entries in the JSON output");
        sub->callback([&] { action = [&] { return cmd_spectrum(spectrum_opts); }; });
    }

    SpectrumCmd peaks_opts;
    {
        auto* sub = app.add_subcommand("peaks", "detect spectral peaks without eigenvector extraction");
        add_graph_options(sub, peaks_opts.rf);
        add_scheme_option(sub, peaks_opts.rf);
        add_budget_options(sub, peaks_opts.rf);
        add_distributed_options(sub, peaks_opts.rf);
        add_spectral_options(sub, peaks_opts);
        sub->callback([&] { action = [&] { return cmd_peaks(peaks_opts); }; });
    }

    TrajectoryCmd traj_opts;
    {
        auto* sub = app.add_subcommand("trajectory", "integrate and export the sampled trajectory");
        add_graph_options(sub, traj_opts.rf);
        add_scheme_option(sub, traj_opts.rf);
        add_budget_options(sub, traj_opts.rf);
        add_distributed_options(sub, traj_opts.rf);
        sub->add_option("--probe", traj_opts.probes,
                        "record only these nodes (repeatable; label or index)");
        sub->add_flag("--record-energy", traj_opts.record_energy,
                      "sample the conserved energy alongside the trajectory");
        sub->add_option("--out", traj_opts.out, "output path");
        sub->add_option("--format", traj_opts.format, "csv trajectory or json summary")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->callback([&] { action = [&] { return cmd_trajectory(traj_opts); }; });
    }

    DistsimCmd distsim_opts;
    {
        auto* sub = app.add_subcommand(
            "distsim", "run the synchronous message-passing protocol and report its cost");
        add_graph_options(sub, distsim_opts.rf);
        add_scheme_option(sub, distsim_opts.rf, /*distributed_only=*/true);
        add_budget_options(sub, distsim_opts.rf);
        sub->add_option("--schedule-seed", distsim_opts.rf.schedule_seed,
                        "node execution order permutation seed");
        sub->add_flag("--locality-check", distsim_opts.rf.locality_check,
                      "assert that nodes touch only their own state");
        sub->add_flag("--check", distsim_opts.check,
                      "rerun centrally and require a bit-identical trajectory");
        sub->add_option("--out", distsim_opts.out, "output path");
        sub->add_option("--format", distsim_opts.format, "json stats or csv per-round table")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->callback([&] { action = [&] { return cmd_distsim(distsim_opts); }; });
    }

    ConsensusCmd consensus_opts;
    {
        auto* sub = app.add_subcommand(
            "consensus", "best-constant consensus with the weight tuned from the estimated spectrum");
        sub->add_option("graph", consensus_opts.rf.graph_path, "graph file")
            ->check(CLI::ExistingFile);
        sub->add_flag("--lcc", consensus_opts.rf.lcc, "reduce to the largest connected component");
        sub->add_option("--rgg-n", consensus_opts.rgg_n, "generate a random geometric graph with n nodes")
            ->check(CLI::PositiveNumber);
        sub->add_option("--rgg-radius", consensus_opts.rgg_radius, "connection radius in the unit square")
            ->check(CLI::PositiveNumber);
        sub->add_option("--rgg-seed", consensus_opts.rgg_seed,
                        "seed for the generator (resampled until connected)");
        add_scheme_option(sub, consensus_opts.rf);
        add_budget_options(sub, consensus_opts.rf);
        sub->add_option("--smoothing-v", consensus_opts.rf.smoothing_v,
                        "Gaussian window variance for the spectral run")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--threshold", consensus_opts.threshold,
                        "peak height relative to the band maximum")
            ->check(CLI::Range(0.0, 1.0));
        sub->add_option("--w", consensus_opts.w, "consensus weight; skips the spectral estimation")
            ->check(CLI::PositiveNumber);
        sub->add_option("--tau", consensus_opts.tau, "convergence tolerance on max |x_k - mean|")
            ->check(CLI::PositiveNumber);
        sub->add_option("--max-steps", consensus_opts.max_steps, "iteration cap")
            ->check(CLI::PositiveNumber);
        sub->add_option("--values-seed", consensus_opts.values_seed,
                        "seed for the initial sensor values");
        sub->add_option("--out", consensus_opts.out, "output path");
        sub->add_option("--format", consensus_opts.format, "json summary or csv error history")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->callback([&] { action = [&] { return cmd_consensus(consensus_opts); }; });
    }

    ParamsCmd params_opts;
    {
        auto* sub = app.add_subcommand("params", "print the sampling parameters for a target resolution");
        add_graph_options(sub, params_opts.rf);
        sub->add_option("--lambda-diff", params_opts.rf.lambda_diff,
                        "smallest eigenvalue gap to resolve")
            ->required()
            ->check(CLI::PositiveNumber);
        sub->add_option("--safety", params_opts.rf.safety, "step-size safety factor in (0,1]")
            ->check(CLI::Range(1e-9, 1.0));
        sub->add_option("--budget", params_opts.rf.budget, "sample budget for the warning check")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", params_opts.out, "output path (json)");
        sub->add_option("--format", params_opts.format, "json only")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->callback([&] { action = [&] { return cmd_params(params_opts); }; });
    }

    CompareCmd compare_opts;
    {
        auto* sub = app.add_subcommand(
            "compare", "run several schemes on one budget and score them against a reference");
        add_graph_options(sub, compare_opts.rf);
        add_budget_options(sub, compare_opts.rf);
        sub->add_option("--schemes", compare_opts.schemes, "comma-separated scheme list (two or more)")
            ->delimiter(',')
            ->check(CLI::IsMember({"euler", "leapfrog2", "si2", "si4"}));
        sub->add_option("--si4-coeffs", compare_opts.rf.si4_coeffs,
                        "JSON stage-coefficient table for si4")
            ->check(CLI::ExistingFile);
        sub->add_option("--smoothing-v", compare_opts.rf.smoothing_v,
                        "Gaussian window variance (0 disables smoothing)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--ref", compare_opts.ref_path,
                        "JSON reference eigenvalues (array of numbers or of {lambda} objects); "
                        "default: estimates of the highest-order scheme in the list")
            ->check(CLI::ExistingFile);
        sub->add_option("--match-tol", compare_opts.match_tol,
                        "eigenvalue match tolerance; default half the frequency-grid spacing")
            ->check(CLI::PositiveNumber);
        sub->add_option("--threshold", compare_opts.threshold,
                        "peak height relative to the band maximum")
            ->check(CLI::Range(0.0, 1.0));
        sub->add_option("--part", compare_opts.part, "component used for peak detection")
            ->check(CLI::IsMember({"real", "abs"}));
        sub->add_option("--out", compare_opts.out, "output path");
        sub->add_option("--format", compare_opts.format, "json summary or csv energy series")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->callback([&] { action = [&] { return cmd_compare(compare_opts); }; });
    }

    cli::FetchOptions fetch_opts;
    {
        auto* sub = app.add_subcommand("fetch", "download and verify the benchmark datasets");
        sub->add_option("dataset", fetch_opts.dataset, "dataset name from the manifest, or 'all'");
        sub->add_option("--data-dir", fetch_opts.data_dir, "directory for dataset files");
        sub->add_option("--manifest", fetch_opts.manifest, "dataset manifest path")
            ->check(CLI::ExistingFile);
        sub->add_flag("--verify-only", fetch_opts.verify_only,
                      "verify cached files without touching the network");
        sub->add_flag("--force", fetch_opts.force, "re-download even when a cached file exists");
        sub->callback([&] { action = [&] { return cli::run_fetch(fetch_opts); }; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return action ? action() : 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
