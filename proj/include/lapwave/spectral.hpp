#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "lapwave/integrate.hpp"

namespace lapwave {

// The one-sided estimator doubles every sample past the first before
// transforming (assumes time symmetry of the underlying signal); Plain is the
// unmodified windowed transform, used for Parseval checks and diagnostics.
enum class EstimatorKind { OneSided, Plain };

enum class PeakPart { Real, Abs };

struct SpectrumEstimate {
    double eps = 0.0;
    long long samples = 0;      // s before padding
    std::size_t n_bins = 0;     // N, power of two >= s
    double smoothing_v = 0.0;
    double t0 = 0.0;
    Scheme scheme = Scheme::SI2;
    EstimatorKind estimator = EstimatorKind::OneSided;
    std::vector<int> nodes;     // recorded node indices, ascending
    // node-major: bin k of slot j at bins[j*n_bins + k]
    std::vector<std::complex<double>> bins;

    double grid_spacing() const {
        return 2.0 * std::numbers::pi / (static_cast<double>(n_bins) * eps);
    }
    double theta(std::size_t k) const { return static_cast<double>(k) * grid_spacing(); }
    // Frequencies above N/2 alias to negative ones; peak search stays below.
    std::size_t band_end() const { return n_bins / 2; }
    std::span<const std::complex<double>> node_bins(std::size_t slot) const {
        return {bins.data() + slot * n_bins, n_bins};
    }
    int slot_of(int node) const;
};

// Windowed DFT of each recorded node with the scaling/phase correction
// (eps / sqrt(2 pi)) * exp(-i t0 theta_k) applied per bin. Window is the
// Gaussian exp(-(l eps)^2 v / 2), identity when v = 0. Length is padded to
// the next power of two.
SpectrumEstimate trajectory_dft(const Trajectory& traj, double v, double t0 = 0.0,
                                EstimatorKind estimator = EstimatorKind::OneSided);

// Leapfrog trajectories oscillate at sqrt(lambda); Hamiltonian ones at lambda.
double frequency_to_eigenvalue(double theta, Scheme scheme);

struct PeakOptions {
    double rel_threshold = 0.05;
    PeakPart part = PeakPart::Real;
};

// Strict local maxima of the chosen part's magnitude over bins [0, N/2],
// at least rel_threshold times the band maximum. Bin 0 and N/2 qualify on
// their single-neighbor condition.
std::vector<std::size_t> detect_peaks(const SpectrumEstimate& spec, int probe_node,
                                      const PeakOptions& opts = {});
// Same rule on the root-mean-square of the part across all recorded nodes.
std::vector<std::size_t> detect_peaks_aggregate(const SpectrumEstimate& spec,
                                                const PeakOptions& opts = {});

struct EigenPairEstimate {
    double lambda = 0.0;   // after parabolic refinement of theta
    std::size_t bin = 0;
    double theta = 0.0;    // refined peak frequency
    std::vector<double> amplitude; // raw per-node real part at the bin
    std::vector<double> vector;    // unit norm, largest-|.| entry positive
};

// Per bin: eigenvector estimate from per-node real amplitudes. At an
// eigenfrequency the amplitude vector is the eigenvector scaled by the common
// overlap u^T a0, which normalization removes. Bins whose amplitude vector is
// exactly zero are dropped with a diagnostic on stderr.
std::vector<EigenPairEstimate> extract_eigenpairs(const SpectrumEstimate& spec,
                                                  std::span<const std::size_t> bins,
                                                  std::span<const double> a0,
                                                  Scheme scheme);

struct PipelineOptions {
    PeakOptions peaks;
    EstimatorKind estimator = EstimatorKind::OneSided;
    double t0 = 0.0;
    int probe = -1;               // -1: aggregate detection over all nodes
    InitMode init_mode = InitMode::RandomGaussianX_ZeroY;
    StageCoefficients si4_coeffs; // empty -> order4_default()
};

// init -> integrate -> dft -> detect -> extract, sorted by lambda ascending.
// Records all nodes regardless of config.probe_nodes (extraction needs them).
std::vector<EigenPairEstimate> full_pipeline(const Graph& g, const RunConfig& config,
                                             const PipelineOptions& opts = {});

// Iterative radix-2 transform, size must be a power of two. Forward sign
// convention e^{-2 pi i k l / N}.
void fft_inplace(std::span<std::complex<double>> a);

} // namespace lapwave
