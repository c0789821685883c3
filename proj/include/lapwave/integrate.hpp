#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lapwave/errors.hpp"
#include "lapwave/graph.hpp"

namespace lapwave {

enum class Scheme { Euler, Leapfrog2, SI2, SI4 };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(std::string_view name); // throws ConfigError

// Wave-function pair psi = x + i y. For the Lagrangian scheme y holds the
// momentum p instead of an imaginary part. a0, b0 keep the initial vectors
// for later amplitude normalization.
struct StatePair {
    std::vector<double> x, y;
    std::vector<double> a0, b0;
};

enum class InitMode { RandomGaussianX_ZeroY, RandomBoth, Given };

StatePair init_state(int n, std::uint64_t seed, InitMode mode,
                     std::span<const double> a0 = {},
                     std::span<const double> b0 = {});

struct RunConfig {
    Scheme scheme = Scheme::SI2;
    MatrixKind matrix = MatrixKind::Laplacian;
    double eps = 0.0;
    long long samples = 0;      // s, includes the t=0 sample
    double smoothing_v = 0.0;   // Gaussian window variance, 0 = off
    std::uint64_t seed = 1;
    std::vector<int> probe_nodes; // empty = record all nodes
    bool record_energy = false;
};

// Sampling constraints: eps = safety * pi / lambda_max_bound,
// s = ceil(2 pi / (eps * lambda_diff)).
struct ChosenParams {
    double eps;
    long long samples;
    double resolution; // achieved 2 pi / (s eps)
};

ChosenParams choose_params(double lambda_max_bound, double lambda_diff,
                           double safety = 1.0,
                           long long sample_budget = 100'000'000);

// Stage table for the r-stage splitting
//   y_j = y_{j-1} + p_j eps L x_{j-1};  x_j = x_{j-1} - q_j eps L y_j.
struct StageCoefficients {
    int r = 0;
    std::vector<double> p, q;

    // p/q derived from a symmetric leapfrog composition with weights w:
    // kicks of w_i/2 around drifts of w_i, adjacent kicks merged.
    static StageCoefficients from_composition(std::span<const double> w);
    static StageCoefficients order2();          // w = {1}
    static StageCoefficients order4_default();  // Suzuki 5-fold composition
    static StageCoefficients forest_ruth();     // 3-fold composition
    static StageCoefficients canonical_order1(); // r=1, p=q={1}
    static StageCoefficients from_json_file(const std::filesystem::path& path);

    void validate() const; // throws ConfigError on shape mismatch
};

struct Trajectory {
    Scheme scheme = Scheme::SI2;
    double eps = 0.0;
    long long samples = 0;
    std::vector<int> nodes;   // recorded node indices, ascending
    // node-major: sample l of recorded slot k at data[k*samples + l]
    std::vector<std::complex<double>> data;
    std::vector<double> energy;    // per sample when requested
    double max_norm_ratio = 1.0;   // max_i ||state_i|| / ||state_0||
    double final_norm_ratio = 1.0;
    RunConfig config;

    std::span<const std::complex<double>> node_samples(int slot) const {
        return {data.data() + static_cast<std::size_t>(slot) * samples,
                static_cast<std::size_t>(samples)};
    }
    int slot_of(int node) const; // -1 if not recorded
};

Trajectory euler_run(const Graph& g, const RunConfig& config, const StatePair& state);
Trajectory leapfrog2_run(const Graph& g, const RunConfig& config, const StatePair& state);
Trajectory si2_run(const Graph& g, const RunConfig& config, const StatePair& state);
Trajectory si4_run(const Graph& g, const RunConfig& config, const StatePair& state,
                   const StageCoefficients& coeffs = StageCoefficients::order4_default());

// Dispatch on config.scheme.
Trajectory run_scheme(const Graph& g, const RunConfig& config, const StatePair& state);

} // namespace lapwave
