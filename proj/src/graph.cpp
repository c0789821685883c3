#include "lapwave/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

namespace lapwave {

int Graph::max_degree() const {
    int best = 0;
    for (int u = 0; u < n(); ++u)
        best = std::max(best, degree(u));
    return best;
}

std::optional<int> Graph::find_label(std::string_view name) const {
    auto it = label_index_.find(std::string(name));
    if (it == label_index_.end())
        return std::nullopt;
    return it->second;
}

void Graph::matvec(MatrixKind kind, std::span<const double> x, std::span<double> y) const {
    const int nn = n();
    for (int u = 0; u < nn; ++u) {
        double acc = 0.0;
        for (std::size_t k = offsets_[u]; k < offsets_[u + 1]; ++k)
            acc += x[adj_[k]];
        if (kind == MatrixKind::Laplacian)
            y[u] = static_cast<double>(degree(u)) * x[u] - acc;
        else
            y[u] = acc;
    }
}

std::vector<double> Graph::matvec(MatrixKind kind, std::span<const double> x) const {
    std::vector<double> y(n());
    matvec(kind, x, y);
    return y;
}

Graph Graph::build(std::vector<std::string> labels,
                   const std::vector<std::pair<int, int>>& edges,
                   std::vector<int> parent_index) {
    Graph g;
    const int n = static_cast<int>(labels.size());
    std::vector<std::size_t> deg(n, 0);
    for (auto [u, v] : edges) {
        ++deg[u];
        ++deg[v];
    }
    g.offsets_.assign(n + 1, 0);
    for (int u = 0; u < n; ++u)
        g.offsets_[u + 1] = g.offsets_[u] + deg[u];
    g.adj_.resize(2 * edges.size());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (auto [u, v] : edges) {
        g.adj_[cursor[u]++] = v;
        g.adj_[cursor[v]++] = u;
    }
    for (int u = 0; u < n; ++u)
        std::sort(g.adj_.begin() + g.offsets_[u], g.adj_.begin() + g.offsets_[u + 1]);
    g.labels_ = std::move(labels);
    g.parent_index_ = std::move(parent_index);
    for (int u = 0; u < n; ++u)
        g.label_index_.emplace(g.labels_[u], u);
    return g;
}

namespace {

bool numeric_label(const std::string& s, long long& value) {
    if (s.empty())
        return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc() && ptr == end;
}

// Canonical node order: numeric when every label is an integer, otherwise
// lexicographic. Equal numeric values (e.g. "01" vs "1") fall back to the
// string form so the order stays total.
std::vector<std::string> sorted_labels(const std::set<std::string>& names) {
    std::vector<std::string> out(names.begin(), names.end());
    bool all_numeric = true;
    std::vector<long long> value(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!numeric_label(out[i], value[i])) {
            all_numeric = false;
            break;
        }
    }
    if (all_numeric) {
        std::vector<std::size_t> order(out.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (value[a] != value[b])
                return value[a] < value[b];
            return out[a] < out[b];
        });
        std::vector<std::string> sorted;
        sorted.reserve(out.size());
        for (std::size_t i : order)
            sorted.push_back(out[i]);
        return sorted;
    }
    return out; // std::set iteration is already lexicographic
}

Graph assemble(const std::set<std::string>& names,
               const std::vector<std::pair<std::string, std::string>>& raw_edges,
               const std::vector<std::size_t>& lines, const LoadOptions& opts,
               LoadStats* stats) {
    if (names.empty())
        throw ParseError("empty graph: no nodes found");
    std::vector<std::string> labels = sorted_labels(names);
    std::unordered_map<std::string, int> index;
    for (int i = 0; i < static_cast<int>(labels.size()); ++i)
        index.emplace(labels[i], i);

    std::set<std::pair<int, int>> edge_set;
    for (std::size_t k = 0; k < raw_edges.size(); ++k) {
        int u = index.at(raw_edges[k].first);
        int v = index.at(raw_edges[k].second);
        if (u > v)
            std::swap(u, v);
        if (!edge_set.insert({u, v}).second) {
            if (!opts.dedupe)
                throw ParseError("duplicate edge \"" + raw_edges[k].first + " " +
                                     raw_edges[k].second + "\"",
                                 lines[k]);
            if (stats)
                ++stats->duplicates_collapsed;
        }
    }
    return Graph::build(std::move(labels),
                        {edge_set.begin(), edge_set.end()});
}

} // namespace

Graph load_edge_list(std::istream& in, const LoadOptions& opts, LoadStats* stats) {
    std::set<std::string> names;
    std::vector<std::pair<std::string, std::string>> edges;
    std::vector<std::size_t> lines;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string a, b, extra;
        if (!(ls >> a) || a[0] == '#')
            continue;
        if (!(ls >> b))
            throw ParseError("expected two tokens, got one", lineno);
        if (ls >> extra)
            throw ParseError("expected two tokens, got more", lineno);
        names.insert(a);
        names.insert(b);
        if (a == b) {
            if (stats)
                ++stats->self_loops_dropped;
            continue;
        }
        edges.emplace_back(std::move(a), std::move(b));
        lines.push_back(lineno);
    }
    return assemble(names, edges, lines, opts, stats);
}

namespace {

struct GmlToken {
    std::string text;
    bool quoted;
};

std::vector<GmlToken> gml_tokens(std::istream& in) {
    std::vector<GmlToken> toks;
    char c;
    while (in.get(c)) {
        if (std::isspace(static_cast<unsigned char>(c)))
            continue;
        if (c == '"') {
            std::string s;
            while (in.get(c) && c != '"')
                s.push_back(c);
            toks.push_back({std::move(s), true});
        } else if (c == '[' || c == ']') {
            toks.push_back({std::string(1, c), false});
        } else {
            std::string s(1, c);
            while (in.get(c)) {
                if (std::isspace(static_cast<unsigned char>(c)))
                    break;
                if (c == '[' || c == ']' || c == '"') {
                    in.unget();
                    break;
                }
                s.push_back(c);
            }
            toks.push_back({std::move(s), false});
        }
    }
    return toks;
}

} // namespace

Graph load_gml(std::istream& in, const LoadOptions& opts, LoadStats* stats) {
    const std::vector<GmlToken> toks = gml_tokens(in);

    struct NodeRec {
        long long id = 0;
        std::string label;
        bool has_label = false;
    };
    std::vector<NodeRec> nodes;
    std::vector<std::pair<long long, long long>> id_edges;

    std::size_t i = 0;
    auto parse_block = [&](bool is_node) {
        // caller consumed the "node"/"edge" keyword; expect a bracketed block
        if (i >= toks.size() || toks[i].text != "[")
            throw ParseError(std::string("gml: expected '[' after ") +
                             (is_node ? "node" : "edge"));
        ++i;
        NodeRec rec;
        long long source = -1, target = -1;
        bool has_id = false, has_source = false, has_target = false;
        int depth = 1;
        while (i < toks.size() && depth > 0) {
            const GmlToken& t = toks[i];
            if (!t.quoted && t.text == "[") {
                ++depth;
                ++i;
                continue;
            }
            if (!t.quoted && t.text == "]") {
                --depth;
                ++i;
                continue;
            }
            if (depth == 1 && !t.quoted && i + 1 < toks.size()) {
                const GmlToken& v = toks[i + 1];
                if (t.text == "id" && !v.quoted) {
                    rec.id = std::stoll(v.text);
                    has_id = true;
                    i += 2;
                    continue;
                }
                if (t.text == "label") {
                    rec.label = v.text;
                    rec.has_label = true;
                    i += 2;
                    continue;
                }
                if (t.text == "source" && !v.quoted) {
                    source = std::stoll(v.text);
                    has_source = true;
                    i += 2;
                    continue;
                }
                if (t.text == "target" && !v.quoted) {
                    target = std::stoll(v.text);
                    has_target = true;
                    i += 2;
                    continue;
                }
            }
            ++i;
        }
        if (depth != 0)
            throw ParseError("gml: unterminated block");
        if (is_node) {
            if (!has_id)
                throw ParseError("gml: node without id");
            nodes.push_back(std::move(rec));
        } else {
            if (!has_source || !has_target)
                throw ParseError("gml: edge without source/target");
            id_edges.emplace_back(source, target);
        }
    };

    while (i < toks.size()) {
        const GmlToken& t = toks[i];
        ++i;
        if (t.quoted)
            continue;
        if (t.text == "node")
            parse_block(true);
        else if (t.text == "edge")
            parse_block(false);
    }

    if (nodes.empty())
        throw ParseError("empty graph: no nodes found");

    std::sort(nodes.begin(), nodes.end(),
              [](const NodeRec& a, const NodeRec& b) { return a.id < b.id; });
    std::unordered_map<long long, int> by_id;
    for (int k = 0; k < static_cast<int>(nodes.size()); ++k)
        if (!by_id.emplace(nodes[k].id, k).second)
            throw ParseError("gml: duplicate node id " + std::to_string(nodes[k].id));

    // Use declared labels only when every node has one and they are unique;
    // otherwise fall back to the numeric ids so find_label stays well defined.
    bool labels_usable = true;
    {
        std::set<std::string> seen;
        for (const NodeRec& r : nodes)
            if (!r.has_label || !seen.insert(r.label).second) {
                labels_usable = false;
                break;
            }
    }
    std::vector<std::string> labels;
    labels.reserve(nodes.size());
    for (const NodeRec& r : nodes)
        labels.push_back(labels_usable ? r.label : std::to_string(r.id));

    std::set<std::pair<int, int>> edge_set;
    std::size_t self_loops = 0, dups = 0;
    for (auto [s, t] : id_edges) {
        auto is = by_id.find(s);
        auto it = by_id.find(t);
        if (is == by_id.end() || it == by_id.end())
            throw ParseError("gml: edge references unknown node id");
        int u = is->second, v = it->second;
        if (u == v) {
            ++self_loops;
            continue;
        }
        if (u > v)
            std::swap(u, v);
        if (!edge_set.insert({u, v}).second) {
            if (!opts.dedupe)
                throw ParseError("gml: duplicate edge");
            ++dups;
        }
    }
    if (stats) {
        stats->self_loops_dropped += self_loops;
        stats->duplicates_collapsed += dups;
    }
    return Graph::build(std::move(labels), {edge_set.begin(), edge_set.end()});
}

Graph load_graph_file(const std::filesystem::path& path, const LoadOptions& opts,
                      LoadStats* stats) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path.string());
    if (path.extension() == ".gml")
        return load_gml(in, opts, stats);
    return load_edge_list(in, opts, stats);
}

namespace {

std::vector<int> component_of(const Graph& g) {
    std::vector<int> comp(g.n(), -1);
    int next = 0;
    for (int s = 0; s < g.n(); ++s) {
        if (comp[s] != -1)
            continue;
        comp[s] = next;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : g.neighbors(u))
                if (comp[v] == -1) {
                    comp[v] = next;
                    q.push(v);
                }
        }
        ++next;
    }
    return comp;
}

} // namespace

bool is_connected(const Graph& g) {
    if (g.n() == 0)
        return false;
    std::vector<int> comp = component_of(g);
    return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

Graph largest_connected_component(const Graph& g) {
    std::vector<int> comp = component_of(g);
    int ncomp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    std::vector<int> size(ncomp, 0);
    for (int c : comp)
        ++size[c];
    // strict > keeps the earliest (hence smallest-index) component on ties
    int best = 0;
    for (int c = 1; c < ncomp; ++c)
        if (size[c] > size[best])
            best = c;

    std::vector<int> old_to_new(g.n(), -1);
    std::vector<int> parent;
    std::vector<std::string> labels;
    for (int u = 0; u < g.n(); ++u)
        if (comp[u] == best) {
            old_to_new[u] = static_cast<int>(parent.size());
            parent.push_back(u);
            labels.push_back(g.label(u));
        }
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < g.n(); ++u) {
        if (comp[u] != best)
            continue;
        for (int v : g.neighbors(u))
            if (u < v)
                edges.emplace_back(old_to_new[u], old_to_new[v]);
    }
    std::sort(edges.begin(), edges.end());
    return Graph::build(std::move(labels), edges, std::move(parent));
}

} // namespace lapwave
