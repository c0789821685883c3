#include "lapwave/consensus.hpp"

#include <string>

#include "lapwave/kernels.hpp"
#include "lapwave/rng.hpp"

namespace lapwave {

Graph rgg_generate(const GeometricGraphSpec& spec,
                   std::vector<std::pair<double, double>>* positions) {
    if (spec.n < 1)
        throw ConfigError("rgg_generate: n must be >= 1");
    if (spec.radius < 0.0)
        throw ConfigError("rgg_generate: radius must be >= 0");
    Rng rng(spec.seed);
    std::vector<std::pair<double, double>> pts(spec.n);
    for (auto& [px, py] : pts) {
        px = rng.uniform01();
        py = rng.uniform01();
    }
    const double r2 = spec.radius * spec.radius;
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < spec.n; ++u)
        for (int v = u + 1; v < spec.n; ++v) {
            const double dx = pts[u].first - pts[v].first;
            const double dy = pts[u].second - pts[v].second;
            if (dx * dx + dy * dy <= r2)
                edges.emplace_back(u, v);
        }
    std::vector<std::string> labels(spec.n);
    for (int u = 0; u < spec.n; ++u)
        labels[u] = std::to_string(u);
    if (positions)
        *positions = std::move(pts);
    return Graph::build(std::move(labels), edges);
}

RggSample rgg_connected_sample(GeometricGraphSpec spec, int max_attempts) {
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        Graph g = rgg_generate(spec);
        if (is_connected(g))
            return {std::move(g), spec.seed, attempt};
        ++spec.seed;
    }
    throw ConfigError("rgg_connected_sample: no connected sample within " +
                      std::to_string(max_attempts) + " attempts");
}

double best_constant_weight(double lambda_largest, double lambda_second_smallest) {
    if (!(lambda_largest > 0.0) || !(lambda_second_smallest > 0.0))
        throw ConfigError("best_constant_weight: spectrum inputs must be positive "
                          "(graph disconnected or estimates invalid)");
    return 2.0 / (lambda_largest + lambda_second_smallest);
}

ConsensusRun consensus_run(const Graph& g, double w, std::span<const double> m,
                           double tau, long long max_steps) {
    if (static_cast<int>(m.size()) != g.n())
        throw ConfigError("consensus_run: initial values size mismatch");
    if (tau < 0.0 || max_steps < 0)
        throw ConfigError("consensus_run: invalid tolerance or step limit");

    ConsensusRun run;
    run.w = w;
    std::vector<double> x(m.begin(), m.end());
    std::vector<double> t(g.n());

    double sum = 0.0;
    for (double v : x)
        sum += v;
    const double mean = sum / static_cast<double>(g.n());
    run.initial_mean = mean;

    auto snapshot = [&]() {
        double s = 0.0;
        for (double v : x)
            s += v;
        run.mean_history.push_back(s / static_cast<double>(g.n()));
        return kernels::max_abs_diff(x, mean);
    };

    for (long long step = 0; step <= max_steps; ++step) {
        const double err = snapshot();
        run.error_history.push_back(err);
        if (err <= tau) {
            run.converged = true;
            run.steps = step;
            run.final_error = err;
            run.final_values = std::move(x);
            return run;
        }
        if (step == max_steps)
            break;
        g.matvec(MatrixKind::Laplacian, x, t);
        kernels::axpy(x, -w, t); // x(t+1) = x(t) - w L x(t)
    }
    run.converged = false;
    run.steps = max_steps;
    run.final_error = run.error_history.back();
    run.final_values = std::move(x);
    return run;
}

} // namespace lapwave
