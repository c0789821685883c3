#include "lapwave/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "json.hpp"

#include "lapwave/kernels.hpp"
#include "lapwave/rng.hpp"
#include "run_internal.hpp"

namespace lapwave {

const char* scheme_name(Scheme s) {
    switch (s) {
    case Scheme::Euler: return "euler";
    case Scheme::Leapfrog2: return "leapfrog2";
    case Scheme::SI2: return "si2";
    case Scheme::SI4: return "si4";
    }
    return "?";
}

Scheme scheme_from_name(std::string_view name) {
    if (name == "euler") return Scheme::Euler;
    if (name == "leapfrog2") return Scheme::Leapfrog2;
    if (name == "si2") return Scheme::SI2;
    if (name == "si4") return Scheme::SI4;
    throw ConfigError("unknown scheme \"" + std::string(name) + "\"");
}

StatePair init_state(int n, std::uint64_t seed, InitMode mode,
                     std::span<const double> a0, std::span<const double> b0) {
    if (n < 1)
        throw ConfigError("init_state: n must be >= 1");
    StatePair st;
    st.x.assign(n, 0.0);
    st.y.assign(n, 0.0);
    switch (mode) {
    case InitMode::Given: {
        if (static_cast<int>(a0.size()) != n ||
            (!b0.empty() && static_cast<int>(b0.size()) != n))
            throw ConfigError("init_state: given vector length mismatch");
        std::copy(a0.begin(), a0.end(), st.x.begin());
        if (!b0.empty())
            std::copy(b0.begin(), b0.end(), st.y.begin());
        break;
    }
    case InitMode::RandomGaussianX_ZeroY:
    case InitMode::RandomBoth: {
        Rng rng(seed);
        for (double& v : st.x)
            v = rng.gaussian();
        kernels::scale(st.x, 1.0 / std::sqrt(kernels::norm_sq(st.x)));
        if (mode == InitMode::RandomBoth) {
            for (double& v : st.y)
                v = rng.gaussian();
            kernels::scale(st.y, 1.0 / std::sqrt(kernels::norm_sq(st.y)));
        }
        break;
    }
    }
    st.a0 = st.x;
    st.b0 = st.y;
    return st;
}

ChosenParams choose_params(double lambda_max_bound, double lambda_diff,
                           double safety, long long sample_budget) {
    if (lambda_max_bound <= 0.0)
        throw ConfigError("choose_params: lambda_max_bound must be > 0 "
                          "(edgeless or invalid graph)");
    if (lambda_diff <= 0.0)
        throw ConfigError("choose_params: lambda_diff must be > 0");
    if (!(safety > 0.0 && safety <= 1.0))
        throw ConfigError("choose_params: safety must be in (0, 1]");
    ChosenParams out;
    out.eps = safety * std::numbers::pi / lambda_max_bound;
    const double s_real = 2.0 * std::numbers::pi / (out.eps * lambda_diff);
    // backoff keeps near-integer quotients from ceiling one sample too high
    out.samples = static_cast<long long>(std::ceil(s_real * (1.0 - 1e-12)));
    out.samples = std::max<long long>(out.samples, 2);
    if (out.samples > sample_budget) {
        const double achievable = 2.0 * std::numbers::pi / (out.eps * static_cast<double>(sample_budget));
        throw ConfigError("choose_params: s = " + std::to_string(out.samples) +
                          " exceeds budget " + std::to_string(sample_budget) +
                          "; achievable lambda_diff at this budget is " +
                          std::to_string(achievable));
    }
    out.resolution = 2.0 * std::numbers::pi / (static_cast<double>(out.samples) * out.eps);
    return out;
}

// ---- stage coefficients ---------------------------------------------------

StageCoefficients StageCoefficients::from_composition(std::span<const double> w) {
    StageCoefficients c;
    const int m = static_cast<int>(w.size());
    if (m < 1)
        throw ConfigError("empty composition");
    c.r = m + 1;
    c.p.resize(c.r);
    c.q.resize(c.r);
    c.p[0] = 0.5 * w[0];
    for (int j = 1; j < m; ++j)
        c.p[j] = 0.5 * (w[j - 1] + w[j]);
    c.p[m] = 0.5 * w[m - 1];
    for (int j = 0; j < m; ++j)
        c.q[j] = w[j];
    c.q[m] = 0.0;
    return c;
}

StageCoefficients StageCoefficients::order2() {
    const double w[] = {1.0};
    return from_composition(w);
}

StageCoefficients StageCoefficients::order4_default() {
    // Suzuki fractal composition: five order-2 substeps with weights
    // {z, z, 1-4z, z, z}, z = 1/(4 - 4^(1/3)). Chosen over the three-fold
    // (Forest-Ruth) composition for its much smaller error constant and
    // wider stability interval at the same order.
    const double z = 1.0 / (4.0 - std::cbrt(4.0));
    const double w[] = {z, z, 1.0 - 4.0 * z, z, z};
    return from_composition(w);
}

StageCoefficients StageCoefficients::forest_ruth() {
    const double g = 1.0 / (2.0 - std::cbrt(2.0));
    const double w[] = {g, 1.0 - 2.0 * g, g};
    return from_composition(w);
}

StageCoefficients StageCoefficients::canonical_order1() {
    StageCoefficients c;
    c.r = 1;
    c.p = {1.0};
    c.q = {1.0};
    return c;
}

StageCoefficients StageCoefficients::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open coefficient file " + path.string());
    nlohmann::json j;
    in >> j;
    StageCoefficients c;
    c.r = j.at("r").get<int>();
    c.p = j.at("p").get<std::vector<double>>();
    c.q = j.at("q").get<std::vector<double>>();
    c.validate();
    return c;
}

void StageCoefficients::validate() const {
    if (r < 1 || static_cast<int>(p.size()) != r || static_cast<int>(q.size()) != r)
        throw ConfigError("stage coefficient arrays must both have length r >= 1");
}

// ---- shared run machinery -------------------------------------------------

using detail::Recorder;
using detail::validate_config;

int Trajectory::slot_of(int node) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), node);
    if (it == nodes.end() || *it != node)
        return -1;
    return static_cast<int>(it - nodes.begin());
}

// ---- schemes ---------------------------------------------------------------

Trajectory euler_run(const Graph& g, const RunConfig& config, const StatePair& state) {
    validate_config(g, config, Scheme::Euler);
    const auto kind = config.matrix;
    std::vector<double> x = state.x, y = state.y;
    std::vector<double> lx(g.n()), ly(g.n());
    Recorder rec(g, config, /*reporting_only=*/true);
    rec.sample(0, x, y);
    if (config.record_energy) {
        g.matvec(kind, x, lx);
        g.matvec(kind, y, ly);
        rec.energy(0.5 * (kernels::dot(x, lx) + kernels::dot(y, ly)));
    }
    for (long long i = 1; i < config.samples; ++i) {
        g.matvec(kind, x, lx);
        g.matvec(kind, y, ly);
        kernels::axpy(x, -config.eps, ly); // x_i = x_{i-1} - eps L y_{i-1}
        kernels::axpy(y, config.eps, lx);  // y_i = y_{i-1} + eps L x_{i-1}
        rec.sample(i, x, y);
        if (config.record_energy) {
            g.matvec(kind, x, lx);
            g.matvec(kind, y, ly);
            rec.energy(0.5 * (kernels::dot(x, lx) + kernels::dot(y, ly)));
        }
    }
    return rec.take();
}

Trajectory leapfrog2_run(const Graph& g, const RunConfig& config, const StatePair& state) {
    validate_config(g, config, Scheme::Leapfrog2);
    const auto kind = config.matrix;
    const double eps = config.eps;
    const double halfeps = 0.5 * eps;
    std::vector<double> x = state.x, p = state.y;
    std::vector<double> t(g.n()), psync;
    Recorder rec(g, config, false);

    std::vector<double> zero(g.n(), 0.0);
    // trajectory carries x only; the imaginary slot stays zero
    rec.sample(0, x, zero);
    g.matvec(kind, x, t);
    if (config.record_energy)
        rec.energy(0.5 * (kernels::dot(p, p) + kernels::dot(x, t)));
    // half-step momentum: p_{1/2} = p_0 + (eps/2)(-L x_0)
    kernels::axpy(p, -halfeps, t);

    for (long long i = 1; i < config.samples; ++i) {
        kernels::axpy(x, eps, p); // x_i = x_{i-1} + eps p_{i-1/2}
        g.matvec(kind, x, t);
        if (config.record_energy) {
            // synchronize momentum at the sample time for the Hamiltonian
            psync = p;
            kernels::axpy(psync, -halfeps, t);
            rec.energy(0.5 * (kernels::dot(psync, psync) + kernels::dot(x, t)));
        }
        kernels::axpy(p, -eps, t); // p_{i+1/2} = p_{i-1/2} + eps(-L x_i)
        rec.sample(i, x, zero);
    }
    // norm diagnostics for the Lagrangian scheme track x alone
    return rec.take();
}

Trajectory si2_run(const Graph& g, const RunConfig& config, const StatePair& state) {
    validate_config(g, config, Scheme::SI2);
    const auto kind = config.matrix;
    const double eps = config.eps;
    const double halfeps = 0.5 * eps;
    std::vector<double> x = state.x, y = state.y;
    std::vector<double> t(g.n()), dy(g.n()), ly(g.n());
    Recorder rec(g, config, false);

    rec.sample(0, x, y);
    g.matvec(kind, x, t);
    if (config.record_energy) {
        g.matvec(kind, y, ly);
        rec.energy(0.5 * (kernels::dot(x, t) + kernels::dot(y, ly)));
    }
    kernels::negate(dy, t); // delta_y = -L x_0

    for (long long i = 1; i < config.samples; ++i) {
        kernels::axpy(y, -halfeps, dy); // y_{i-1/2} = y_{i-1} - (eps/2) delta_y
        g.matvec(kind, y, t);
        kernels::axpy(x, -eps, t);      // x_i = x_{i-1} - eps L y_{i-1/2}
        g.matvec(kind, x, t);
        kernels::negate(dy, t);         // delta_y = -L x_i
        kernels::axpy(y, -halfeps, dy); // y_i = y_{i-1/2} - (eps/2) delta_y
        rec.sample(i, x, y);
        if (config.record_energy) {
            g.matvec(kind, y, ly);
            rec.energy(0.5 * (kernels::dot(x, t) + kernels::dot(y, ly)));
        }
    }
    return rec.take();
}

Trajectory si4_run(const Graph& g, const RunConfig& config, const StatePair& state,
                   const StageCoefficients& coeffs) {
    validate_config(g, config, Scheme::SI4);
    coeffs.validate();
    const auto kind = config.matrix;
    const double eps = config.eps;
    std::vector<double> pe(coeffs.r), qe(coeffs.r);
    for (int j = 0; j < coeffs.r; ++j) {
        pe[j] = coeffs.p[j] * eps;
        qe[j] = -(coeffs.q[j] * eps);
    }
    std::vector<double> x = state.x, y = state.y;
    std::vector<double> lx(g.n()), t(g.n());
    bool lx_valid = false;
    Recorder rec(g, config, false);

    rec.sample(0, x, y);
    if (config.record_energy) {
        g.matvec(kind, x, lx);
        lx_valid = true;
        g.matvec(kind, y, t);
        rec.energy(0.5 * (kernels::dot(x, lx) + kernels::dot(y, t)));
    }

    for (long long i = 1; i < config.samples; ++i) {
        for (int j = 0; j < coeffs.r; ++j) {
            if (!lx_valid) {
                g.matvec(kind, x, lx);
                lx_valid = true;
            }
            kernels::axpy(y, pe[j], lx); // y_j = y_{j-1} + p_j eps L x_{j-1}
            if (coeffs.q[j] != 0.0) {
                g.matvec(kind, y, t);
                kernels::axpy(x, qe[j], t); // x_j = x_{j-1} - q_j eps L y_j
                lx_valid = false;
            }
        }
        rec.sample(i, x, y);
        if (config.record_energy) {
            if (!lx_valid) {
                g.matvec(kind, x, lx);
                lx_valid = true;
            }
            g.matvec(kind, y, t);
            rec.energy(0.5 * (kernels::dot(x, lx) + kernels::dot(y, t)));
        }
    }
    return rec.take();
}

Trajectory run_scheme(const Graph& g, const RunConfig& config, const StatePair& state) {
    switch (config.scheme) {
    case Scheme::Euler: return euler_run(g, config, state);
    case Scheme::Leapfrog2: return leapfrog2_run(g, config, state);
    case Scheme::SI2: return si2_run(g, config, state);
    case Scheme::SI4: return si4_run(g, config, state);
    }
    throw ConfigError("unknown scheme");
}

} // namespace lapwave
