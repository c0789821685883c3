#include "lapwave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "lapwave/kernels.hpp"

namespace lapwave {

int SpectrumEstimate::slot_of(int node) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), node);
    if (it == nodes.end() || *it != node)
        return -1;
    return static_cast<int>(it - nodes.begin());
}

void fft_inplace(std::span<std::complex<double>> a) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw ConfigError("fft length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j |= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

namespace {

std::size_t next_pow2(std::size_t s) {
    std::size_t n = 1;
    while (n < s)
        n <<= 1;
    return n;
}

} // namespace

SpectrumEstimate trajectory_dft(const Trajectory& traj, double v, double t0,
                                EstimatorKind estimator) {
    if (traj.nodes.empty() || traj.samples < 1)
        throw ConfigError("trajectory_dft: empty trajectory");
    if (v < 0.0)
        throw ConfigError("trajectory_dft: smoothing variance must be >= 0");

    SpectrumEstimate spec;
    spec.eps = traj.eps;
    spec.samples = traj.samples;
    spec.n_bins = next_pow2(static_cast<std::size_t>(traj.samples));
    spec.smoothing_v = v;
    spec.t0 = t0;
    spec.scheme = traj.scheme;
    spec.estimator = estimator;
    spec.nodes = traj.nodes;
    spec.bins.resize(spec.nodes.size() * spec.n_bins);

    // sample weights: Gaussian window times the one-sided doubling
    const long long s = traj.samples;
    std::vector<double> weight(s);
    for (long long l = 0; l < s; ++l) {
        const double t = static_cast<double>(l) * traj.eps;
        double w = (v > 0.0) ? std::exp(-0.5 * v * t * t) : 1.0;
        if (estimator == EstimatorKind::OneSided && l >= 1)
            w *= 2.0;
        weight[l] = w;
    }

    const double amp = traj.eps / std::sqrt(2.0 * std::numbers::pi);
    std::vector<std::complex<double>> work(spec.n_bins);
    for (std::size_t slot = 0; slot < spec.nodes.size(); ++slot) {
        auto samples = traj.node_samples(static_cast<int>(slot));
        for (long long l = 0; l < s; ++l)
            work[l] = weight[l] * samples[l];
        std::fill(work.begin() + s, work.end(), std::complex<double>(0.0, 0.0));
        fft_inplace(work);
        auto out = spec.bins.begin() + slot * spec.n_bins;
        if (t0 == 0.0) {
            for (std::size_t k = 0; k < spec.n_bins; ++k)
                out[k] = amp * work[k];
        } else {
            for (std::size_t k = 0; k < spec.n_bins; ++k) {
                const double ph = -t0 * spec.theta(k);
                out[k] = amp * std::complex<double>(std::cos(ph), std::sin(ph)) * work[k];
            }
        }
    }
    for (const auto& b : spec.bins)
        if (!std::isfinite(b.real()) || !std::isfinite(b.imag()))
            throw ConfigError("trajectory_dft: non-finite amplitude (diverged input?)");
    return spec;
}

double frequency_to_eigenvalue(double theta, Scheme scheme) {
    return scheme == Scheme::Leapfrog2 ? theta * theta : theta;
}

namespace {

std::vector<std::size_t> maxima_of(std::span<const double> mag, double rel_threshold) {
    const std::size_t last = mag.size() - 1;
    double gmax = 0.0;
    for (double m : mag)
        gmax = std::max(gmax, m);
    const double thr = rel_threshold * gmax;
    std::vector<std::size_t> bins;
    for (std::size_t k = 0; k <= last; ++k) {
        if (mag[k] < thr || mag[k] == 0.0)
            continue;
        const bool left_ok = (k == 0) || mag[k] > mag[k - 1];
        const bool right_ok = (k == last) || mag[k] > mag[k + 1];
        if (left_ok && right_ok)
            bins.push_back(k);
    }
    return bins;
}

double part_value(const std::complex<double>& z, PeakPart part) {
    return part == PeakPart::Real ? std::fabs(z.real()) : std::abs(z);
}

} // namespace

std::vector<std::size_t> detect_peaks(const SpectrumEstimate& spec, int probe_node,
                                      const PeakOptions& opts) {
    const int slot = spec.slot_of(probe_node);
    if (slot < 0)
        throw ConfigError("probe node " + std::to_string(probe_node) +
                          " was not recorded in this spectrum");
    auto nb = spec.node_bins(static_cast<std::size_t>(slot));
    std::vector<double> mag(spec.band_end() + 1);
    for (std::size_t k = 0; k < mag.size(); ++k)
        mag[k] = part_value(nb[k], opts.part);
    return maxima_of(mag, opts.rel_threshold);
}

std::vector<std::size_t> detect_peaks_aggregate(const SpectrumEstimate& spec,
                                                const PeakOptions& opts) {
    const std::size_t nn = spec.nodes.size();
    std::vector<double> mag(spec.band_end() + 1, 0.0);
    for (std::size_t slot = 0; slot < nn; ++slot) {
        auto nb = spec.node_bins(slot);
        for (std::size_t k = 0; k < mag.size(); ++k) {
            const double m = part_value(nb[k], opts.part);
            mag[k] += m * m;
        }
    }
    for (double& m : mag)
        m = std::sqrt(m / static_cast<double>(nn));
    return maxima_of(mag, opts.rel_threshold);
}

std::vector<EigenPairEstimate> extract_eigenpairs(const SpectrumEstimate& spec,
                                                  std::span<const std::size_t> bins,
                                                  std::span<const double> a0,
                                                  Scheme scheme) {
    if (a0.size() != spec.nodes.size())
        throw ConfigError("extract_eigenpairs: spectrum must record all n nodes");
    std::vector<EigenPairEstimate> out;
    const std::size_t nn = spec.nodes.size();

    // aggregate |f| magnitudes feed the three-point parabolic refinement
    auto agg = [&](std::size_t k) {
        double acc = 0.0;
        for (std::size_t slot = 0; slot < nn; ++slot) {
            const double m = std::abs(spec.bins[slot * spec.n_bins + k]);
            acc += m * m;
        }
        return std::sqrt(acc / static_cast<double>(nn));
    };

    for (std::size_t b : bins) {
        if (b > spec.band_end())
            throw ConfigError("extract_eigenpairs: bin outside the frequency band");
        EigenPairEstimate e;
        e.bin = b;
        e.amplitude.resize(nn);
        for (std::size_t slot = 0; slot < nn; ++slot)
            e.amplitude[slot] = spec.bins[slot * spec.n_bins + b].real();

        const double nrm = std::sqrt(kernels::norm_sq(e.amplitude));
        if (nrm == 0.0) {
            std::cerr << "extract_eigenpairs: dropping bin " << b
                      << " (zero amplitude vector)\n";
            continue;
        }
        e.vector = e.amplitude;
        kernels::scale(e.vector, 1.0 / nrm);
        // sign convention: largest-magnitude entry positive, ties at the
        // smallest index
        std::size_t arg = 0;
        for (std::size_t i = 1; i < nn; ++i)
            if (std::fabs(e.vector[i]) > std::fabs(e.vector[arg]))
                arg = i;
        if (e.vector[arg] < 0.0)
            kernels::scale(e.vector, -1.0);

        double theta = spec.theta(b);
        if (b > 0 && b < spec.band_end()) {
            const double m0 = agg(b - 1), m1 = agg(b), m2 = agg(b + 1);
            const double denom = m0 - 2.0 * m1 + m2;
            if (denom < 0.0) {
                double d = 0.5 * (m0 - m2) / denom;
                d = std::clamp(d, -0.5, 0.5);
                theta += d * spec.grid_spacing();
            }
        }
        e.theta = theta;
        e.lambda = frequency_to_eigenvalue(theta, scheme);
        out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(),
              [](const EigenPairEstimate& a, const EigenPairEstimate& b) {
                  return a.lambda < b.lambda;
              });
    return out;
}

std::vector<EigenPairEstimate> full_pipeline(const Graph& g, const RunConfig& config,
                                             const PipelineOptions& opts) {
    RunConfig cfg = config;
    cfg.probe_nodes.clear(); // extraction requires every node
    StatePair state = init_state(g.n(), cfg.seed, opts.init_mode);
    Trajectory traj = opts.si4_coeffs.r > 0 && cfg.scheme == Scheme::SI4
                          ? si4_run(g, cfg, state, opts.si4_coeffs)
                          : run_scheme(g, cfg, state);
    SpectrumEstimate spec = trajectory_dft(traj, cfg.smoothing_v, opts.t0, opts.estimator);
    traj.data.clear();
    traj.data.shrink_to_fit();
    std::vector<std::size_t> bins =
        opts.probe >= 0 ? detect_peaks(spec, opts.probe, opts.peaks)
                        : detect_peaks_aggregate(spec, opts.peaks);
    return extract_eigenpairs(spec, bins, state.a0, traj.scheme);
}

} // namespace lapwave
