#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lapwave/errors.hpp"

namespace lapwave {

enum class MatrixKind { Laplacian, Adjacency };

// Simple undirected graph in CSR form. Invariants: no self loops, no
// duplicate edges, neighbor lists sorted ascending. Node indices are the
// canonical label order of the source file (numeric when every label parses
// as an integer, lexicographic otherwise), which makes loads reproducible.
class Graph {
public:
    Graph() = default;

    int n() const { return static_cast<int>(offsets_.size()) - 1; }
    std::size_t m() const { return adj_.size() / 2; }

    std::span<const int> neighbors(int u) const {
        return {adj_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
    }
    int degree(int u) const { return static_cast<int>(offsets_[u + 1] - offsets_[u]); }
    int max_degree() const;

    // Degree bound lambda_n <= 2 * max degree, used for step-size selection.
    double lambda_max_bound() const { return 2.0 * max_degree(); }

    const std::string& label(int u) const { return labels_[u]; }
    std::optional<int> find_label(std::string_view name) const;

    // For subgraphs: index of each node in the graph it was extracted from.
    // Empty for graphs loaded or built directly.
    std::span<const int> parent_index() const { return parent_index_; }

    // y = M x with M the Laplacian (deg(u) x_u - sum of neighbor values) or
    // adjacency (sum of neighbor values). Per-row accumulation runs in
    // ascending neighbor order; this ordering is part of the
    // bit-reproducibility contract shared with the distributed simulator.
    void matvec(MatrixKind kind, std::span<const double> x, std::span<double> y) const;
    std::vector<double> matvec(MatrixKind kind, std::span<const double> x) const;

    // `edges` must already be canonical: u < v, sorted, unique.
    static Graph build(std::vector<std::string> labels,
                       const std::vector<std::pair<int, int>>& edges,
                       std::vector<int> parent_index = {});

private:
    std::vector<std::size_t> offsets_{0};
    std::vector<int> adj_;
    std::vector<std::string> labels_;
    std::vector<int> parent_index_;
    std::unordered_map<std::string, int> label_index_;
};

struct LoadOptions {
    bool dedupe = true; // false: duplicate or reversed-duplicate lines are an error
};

struct LoadStats {
    std::size_t self_loops_dropped = 0;
    std::size_t duplicates_collapsed = 0;
};

// Whitespace-separated "u v" pairs, one edge per line. Blank lines and lines
// starting with '#' are skipped. Self loops register the endpoint but carry
// no edge. A file with no nodes at all is an error.
Graph load_edge_list(std::istream& in, const LoadOptions& opts = {},
                     LoadStats* stats = nullptr);

// Minimal GML reader: node [ id ... label "..." ] and edge [ source ... target ... ]
// blocks, other attributes ignored. Node order follows ascending id.
Graph load_gml(std::istream& in, const LoadOptions& opts = {},
               LoadStats* stats = nullptr);

// Dispatches on extension: ".gml" to load_gml, anything else to load_edge_list.
Graph load_graph_file(const std::filesystem::path& path,
                      const LoadOptions& opts = {}, LoadStats* stats = nullptr);

// Induced subgraph on the largest connected component (ties broken toward
// the component containing the smallest node index). Node order is preserved
// and recorded in parent_index().
Graph largest_connected_component(const Graph& g);

bool is_connected(const Graph& g);

} // namespace lapwave
