#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "lapwave/graph.hpp"
#include "lapwave/integrate.hpp"
#include "lapwave/kernels.hpp"

// Shared between the centralized integrators and the distributed simulator
// so both sides record through identical code paths.

namespace lapwave::detail {

constexpr double k_norm_guard = 1e6; // abort when ||state|| exceeds guard * initial

inline std::vector<int> recorded_nodes(const Graph& g, const RunConfig& config) {
    if (config.probe_nodes.empty()) {
        std::vector<int> all(g.n());
        for (int u = 0; u < g.n(); ++u)
            all[u] = u;
        return all;
    }
    std::vector<int> nodes = config.probe_nodes;
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    for (int u : nodes)
        if (u < 0 || u >= g.n())
            throw ConfigError("probe node " + std::to_string(u) + " out of range");
    return nodes;
}

inline void validate_config(const Graph& g, const RunConfig& config, Scheme expected) {
    if (config.scheme != expected)
        throw ConfigError(std::string("config.scheme must be ") + scheme_name(expected));
    if (!(config.eps > 0.0))
        throw ConfigError("eps must be > 0");
    if (g.m() > 0 && config.eps > std::numbers::pi / g.lambda_max_bound() * (1.0 + 1e-12))
        throw ConfigError("eps violates the Nyquist bound pi / lambda_max_bound");
    if (config.samples < 2)
        throw ConfigError("samples must be >= 2");
    if (config.smoothing_v < 0.0)
        throw ConfigError("smoothing variance must be >= 0");
}

// Records samples and enforces the divergence guard. Euler runs in reporting
// mode: only non-finite values abort, unbounded growth is the observable.
class Recorder {
public:
    Recorder(const Graph& g, const RunConfig& config, bool reporting_only)
        : reporting_only_(reporting_only) {
        traj_.scheme = config.scheme;
        traj_.eps = config.eps;
        traj_.samples = config.samples;
        traj_.nodes = recorded_nodes(g, config);
        traj_.config = config;
        traj_.data.resize(traj_.nodes.size() * static_cast<std::size_t>(config.samples));
        if (config.record_energy)
            traj_.energy.reserve(config.samples);
    }

    void sample(long long l, std::span<const double> x, std::span<const double> y) {
        const long long s = traj_.samples;
        for (std::size_t k = 0; k < traj_.nodes.size(); ++k) {
            const int u = traj_.nodes[k];
            traj_.data[k * s + l] = {x[u], y[u]};
        }
        const double ns = kernels::norm_sq(x) + kernels::norm_sq(y);
        if (l == 0) {
            norm0_ = ns;
            return;
        }
        if (!std::isfinite(ns))
            throw DivergenceError("non-finite state norm at step " + std::to_string(l), l);
        const double ratio = std::sqrt(ns / norm0_);
        traj_.max_norm_ratio = std::max(traj_.max_norm_ratio, ratio);
        traj_.final_norm_ratio = ratio;
        if (!reporting_only_ && ratio > k_norm_guard)
            throw DivergenceError("state norm exceeded " + std::to_string(k_norm_guard) +
                                      "x initial at step " + std::to_string(l) +
                                      " (eps too large?)",
                                  l);
    }

    void energy(double h) { traj_.energy.push_back(h); }

    Trajectory take() { return std::move(traj_); }

private:
    Trajectory traj_;
    double norm0_ = 1.0;
    bool reporting_only_;
};

} // namespace lapwave::detail
