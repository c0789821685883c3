#pragma once

// Dense reference implementations for tests only: eigendecompositions and
// exact propagators the matrix-free code is checked against. The library
// itself never touches Eigen.

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lapwave/graph.hpp"
#include "lapwave/integrate.hpp"
#include "lapwave/rng.hpp"

namespace oracle {

inline std::filesystem::path repo_path(const std::string& rel) {
    return std::filesystem::path(LAPWAVE_SOURCE_DIR) / rel;
}

inline Eigen::MatrixXd dense_matrix(const lapwave::Graph& g, lapwave::MatrixKind kind) {
    const int n = g.n();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int u = 0; u < n; ++u) {
        for (int v : g.neighbors(u)) {
            if (kind == lapwave::MatrixKind::Laplacian)
                m(u, v) = -1.0;
            else
                m(u, v) = 1.0;
        }
        if (kind == lapwave::MatrixKind::Laplacian)
            m(u, u) = g.degree(u);
    }
    return m;
}

struct Eigensystem {
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXd vectors; // columns
};

inline Eigensystem eigensystem(const lapwave::Graph& g,
                               lapwave::MatrixKind kind = lapwave::MatrixKind::Laplacian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_matrix(g, kind));
    return {es.eigenvalues(), es.eigenvectors()};
}

inline std::vector<double> distinct_values(const Eigensystem& es, double tol = 1e-9) {
    std::vector<double> out;
    for (int i = 0; i < es.values.size(); ++i)
        if (out.empty() || es.values[i] - out.back() > tol)
            out.push_back(es.values[i]);
    return out;
}

// exact psi(t) = exp(iMt) (a0 + i b0) for the Hamiltonian system
inline void exact_psi(const Eigensystem& es, const std::vector<double>& a0,
                      const std::vector<double>& b0, double t,
                      std::vector<double>& x, std::vector<double>& y) {
    const int n = static_cast<int>(a0.size());
    Eigen::VectorXd va = Eigen::Map<const Eigen::VectorXd>(a0.data(), n);
    Eigen::VectorXd vb = Eigen::Map<const Eigen::VectorXd>(b0.data(), n);
    Eigen::VectorXd ca = es.vectors.transpose() * va;
    Eigen::VectorXd cb = es.vectors.transpose() * vb;
    Eigen::VectorXd xx = Eigen::VectorXd::Zero(n), yy = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        const double c = std::cos(es.values[j] * t), s = std::sin(es.values[j] * t);
        // e^{i lambda t} (ca + i cb) = (ca c - cb s) + i (ca s + cb c)
        xx += (ca[j] * c - cb[j] * s) * es.vectors.col(j);
        yy += (ca[j] * s + cb[j] * c) * es.vectors.col(j);
    }
    x.assign(xx.data(), xx.data() + n);
    y.assign(yy.data(), yy.data() + n);
}

// exact x(t) = cos(t sqrt(L)) a0 + pinv(sqrt(L)) sin(t sqrt(L)) b0 for the
// Lagrangian system; the nullspace contributes a0 + t b0
inline void exact_lagrangian(const Eigensystem& es, const std::vector<double>& a0,
                             const std::vector<double>& b0, double t,
                             std::vector<double>& x) {
    const int n = static_cast<int>(a0.size());
    Eigen::VectorXd va = Eigen::Map<const Eigen::VectorXd>(a0.data(), n);
    Eigen::VectorXd vb = Eigen::Map<const Eigen::VectorXd>(b0.data(), n);
    Eigen::VectorXd ca = es.vectors.transpose() * va;
    Eigen::VectorXd cb = es.vectors.transpose() * vb;
    Eigen::VectorXd xx = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        const double lam = std::max(es.values[j], 0.0);
        if (lam < 1e-12) {
            xx += (ca[j] + t * cb[j]) * es.vectors.col(j);
        } else {
            const double w = std::sqrt(lam);
            xx += (ca[j] * std::cos(w * t) + cb[j] * std::sin(w * t) / w) * es.vectors.col(j);
        }
    }
    x.assign(xx.data(), xx.data() + n);
}

// projector onto the eigenspace of the value nearest lambda
inline Eigen::MatrixXd eigenspace_projector(const Eigensystem& es, double lambda,
                                            double tol = 1e-8) {
    const int n = static_cast<int>(es.values.size());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
        if (std::fabs(es.values[j] - lambda) <= tol)
            p += es.vectors.col(j) * es.vectors.col(j).transpose();
    return p;
}

inline int multiplicity(const Eigensystem& es, double lambda, double tol = 1e-8) {
    int c = 0;
    for (int j = 0; j < es.values.size(); ++j)
        if (std::fabs(es.values[j] - lambda) <= tol)
            ++c;
    return c;
}

inline double cosine(std::span<const double> a, std::span<const double> b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
}

// ---- small test graphs -----------------------------------------------------

inline lapwave::Graph make_graph(int n, std::vector<std::pair<int, int>> edges) {
    for (auto& [u, v] : edges)
        if (u > v)
            std::swap(u, v);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<std::string> labels(n);
    for (int i = 0; i < n; ++i)
        labels[i] = std::to_string(i);
    return lapwave::Graph::build(std::move(labels), edges);
}

inline lapwave::Graph k2() { return make_graph(2, {{0, 1}}); }

inline lapwave::Graph path(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i)
        e.emplace_back(i, i + 1);
    return make_graph(n, std::move(e));
}

inline lapwave::Graph cycle(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        e.emplace_back(i, (i + 1) % n);
    return make_graph(n, std::move(e));
}

// star with n-1 leaves attached to node 0
inline lapwave::Graph star(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i < n; ++i)
        e.emplace_back(0, i);
    return make_graph(n, std::move(e));
}

inline lapwave::Graph complete(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            e.emplace_back(i, j);
    return make_graph(n, std::move(e));
}

// Erdos-Renyi sample; may be disconnected, which the bit-identity tests want
inline lapwave::Graph gnp(int n, double p, std::uint64_t seed) {
    lapwave::Rng rng(seed);
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform01() < p)
                e.emplace_back(i, j);
    return make_graph(n, std::move(e));
}

inline lapwave::Graph lesmis() {
    return lapwave::load_graph_file(repo_path("data/lesmis.txt"));
}

// ---- helpers for matching detected eigenvalues ------------------------------

inline double nearest_value(const std::vector<double>& values, double x) {
    double best = values.front();
    for (double v : values)
        if (std::fabs(v - x) < std::fabs(best - x))
            best = v;
    return best;
}

// count how many of the k smallest (distinct) oracle values have a detected
// estimate within tol
inline int matched_smallest(const std::vector<double>& oracle_distinct,
                            const std::vector<double>& detected, int k, double tol) {
    int count = 0;
    for (int j = 0; j < k && j < static_cast<int>(oracle_distinct.size()); ++j) {
        for (double d : detected)
            if (std::fabs(d - oracle_distinct[j]) <= tol) {
                ++count;
                break;
            }
    }
    return count;
}

} // namespace oracle
