#pragma once

#include <cstdint>
#include <vector>

#include "lapwave/graph.hpp"

namespace lapwave {

struct GeometricGraphSpec {
    int n = 0;
    double radius = 0.0; // unit-square units
    std::uint64_t seed = 1;
};

// Uniform points on [0,1]^2, edge iff Euclidean distance <= radius.
// Positions (x, y per node) are returned when a target vector is supplied.
Graph rgg_generate(const GeometricGraphSpec& spec,
                   std::vector<std::pair<double, double>>* positions = nullptr);

// Resamples with seed, seed+1, ... until the graph is connected.
struct RggSample {
    Graph graph;
    std::uint64_t seed_used = 0;
    int rejected = 0;
};
RggSample rgg_connected_sample(GeometricGraphSpec spec, int max_attempts = 1000);

// Best constant weight w = 2 / (lambda_largest + lambda_second_smallest) for
// x(t+1) = (I - wL) x(t). Inputs must be positive (connected graph).
double best_constant_weight(double lambda_largest, double lambda_second_smallest);

struct ConsensusRun {
    double w = 0.0;
    bool converged = false;
    long long steps = 0;        // iterations applied before convergence
    double final_error = 0.0;   // max_k |x_k - mean| at stop
    double initial_mean = 0.0;
    std::vector<double> final_values;
    std::vector<double> error_history; // error before each applied step, then final
    std::vector<double> mean_history;  // running mean per recorded state
};

// Matrix-free iteration x <- x - w L x until max_k |x_k - mean| <= tau.
// Exceeding max_steps is reported, not thrown.
ConsensusRun consensus_run(const Graph& g, double w, std::span<const double> m,
                           double tau, long long max_steps);

} // namespace lapwave
