#include "lapwave/export.hpp"

#include <cstdio>
#include <fstream>

namespace lapwave {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string spectrum_csv(const SpectrumEstimate& spec, const Graph& g, int probe) {
    std::string out = "theta,node,re,im\n";
    const std::size_t kmax = spec.band_end();
    for (std::size_t k = 0; k <= kmax; ++k) {
        const std::string theta = format_double(spec.theta(k));
        for (std::size_t slot = 0; slot < spec.nodes.size(); ++slot) {
            const int u = spec.nodes[slot];
            if (probe >= 0 && u != probe)
                continue;
            const auto z = spec.bins[slot * spec.n_bins + k];
            out += theta;
            out += ',';
            out += g.label(u);
            out += ',';
            out += format_double(z.real());
            out += ',';
            out += format_double(z.imag());
            out += '\n';
        }
    }
    return out;
}

std::string trajectory_csv(const Trajectory& traj, const Graph& g) {
    std::string out = "time,node,re,im\n";
    for (long long l = 0; l < traj.samples; ++l) {
        const std::string t = format_double(static_cast<double>(l) * traj.eps);
        for (std::size_t slot = 0; slot < traj.nodes.size(); ++slot) {
            const auto z = traj.data[slot * traj.samples + l];
            out += t;
            out += ',';
            out += g.label(traj.nodes[slot]);
            out += ',';
            out += format_double(z.real());
            out += ',';
            out += format_double(z.imag());
            out += '\n';
        }
    }
    return out;
}

nlohmann::ordered_json eigenpairs_json(const std::vector<EigenPairEstimate>& pairs,
                                       bool include_vectors) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : pairs) {
        nlohmann::ordered_json j;
        j["lambda"] = p.lambda;
        j["theta"] = p.theta;
        j["bin"] = p.bin;
        if (include_vectors)
            j["vector"] = p.vector;
        arr.push_back(std::move(j));
    }
    return arr;
}

nlohmann::ordered_json distsim_stats_json(const distsim::SimResult& res) {
    nlohmann::ordered_json rounds = nlohmann::ordered_json::array();
    for (const auto& r : res.rounds) {
        rounds.push_back({{"iter", r.iteration},
                          {"packets", r.packets},
                          {"barriers", r.barriers}});
    }
    nlohmann::ordered_json j;
    j["rounds"] = std::move(rounds);
    j["totals"] = {{"packets", res.total_packets},
                   {"messages_directed", res.total_messages_directed},
                   {"barriers", res.total_barriers},
                   {"global_reductions", res.global_reductions}};
    return j;
}

nlohmann::ordered_json consensus_json(const ConsensusRun& run) {
    nlohmann::ordered_json j;
    j["w"] = run.w;
    j["steps_to_converge"] = run.converged ? run.steps : -1;
    j["final_error"] = run.final_error;
    j["converged"] = run.converged;
    j["mean"] = run.initial_mean;
    return j;
}

nlohmann::ordered_json params_json(const Graph& g, const ChosenParams& params,
                                   double lambda_diff, double safety) {
    nlohmann::ordered_json j;
    j["n"] = g.n();
    j["m"] = g.m();
    j["max_degree"] = g.max_degree();
    j["lambda_max_bound"] = g.lambda_max_bound();
    j["lambda_diff"] = lambda_diff;
    j["safety"] = safety;
    j["eps"] = params.eps;
    j["samples"] = params.samples;
    j["resolution"] = params.resolution;
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

} // namespace lapwave
