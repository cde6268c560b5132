#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace lsek {

using Node = std::uint32_t;
using Label = std::uint32_t;

/// Unordered node pair. Stored normalized with u < v once a graph is built
/// through make_graph().
struct Edge {
    Node u = 0;
    Node v = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge normalized(Edge e) { return e.u <= e.v ? e : Edge{e.v, e.u}; }

/// Undirected simple graph with one dense label id per node.
///
/// The fields are public so that fixtures (and validate()) can describe
/// broken graphs; everything downstream of validate() assumes the invariants
/// hold and that edges are normalized and sorted.
struct LabeledGraph {
    std::size_t node_count = 0;
    std::vector<Edge> edges;
    std::vector<Label> labels;
    std::string id;

    std::size_t edge_count() const { return edges.size(); }

    friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;
};

enum class ViolationKind { label_count_mismatch, endpoint_out_of_range, self_loop, duplicate_edge };

struct Violation {
    ViolationKind kind;
    std::string message;
};

inline const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::label_count_mismatch: return "label count mismatch";
        case ViolationKind::endpoint_out_of_range: return "endpoint out of range";
        case ViolationKind::self_loop: return "self-loop";
        case ViolationKind::duplicate_edge: return "duplicate edge";
    }
    return "unknown";
}

/// First violated invariant, or nullopt when the graph is well formed.
inline std::optional<Violation> validate(const LabeledGraph& graph) {
    auto report = [](ViolationKind kind, const std::string& detail) {
        return Violation{kind, std::string(to_string(kind)) + detail};
    };
    if (graph.labels.size() != graph.node_count) {
        return report(ViolationKind::label_count_mismatch,
                      ": " + std::to_string(graph.labels.size()) + " labels for " +
                          std::to_string(graph.node_count) + " nodes");
    }
    auto edge_text = [](Edge e) {
        return " (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
    };
    for (const Edge& e : graph.edges) {
        if (e.u >= graph.node_count || e.v >= graph.node_count)
            return report(ViolationKind::endpoint_out_of_range, edge_text(e));
        if (e.u == e.v) return report(ViolationKind::self_loop, edge_text(e));
    }
    std::vector<Edge> sorted;
    sorted.reserve(graph.edges.size());
    for (const Edge& e : graph.edges) sorted.push_back(normalized(e));
    std::sort(sorted.begin(), sorted.end());
    auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) return report(ViolationKind::duplicate_edge, edge_text(*dup));
    return std::nullopt;
}

/// Builds a graph with normalized, sorted edges; throws ContractError on any
/// invariant violation.
inline LabeledGraph make_graph(std::size_t node_count, std::vector<Edge> edges,
                               std::vector<Label> labels, std::string id = {}) {
    for (Edge& e : edges) e = normalized(e);
    std::sort(edges.begin(), edges.end());
    LabeledGraph graph{node_count, std::move(edges), std::move(labels), std::move(id)};
    if (auto violation = validate(graph)) {
        throw ContractError("invalid graph '" + graph.id + "': " + violation->message);
    }
    return graph;
}

/// Uniformly labeled convenience overload.
inline LabeledGraph make_graph(std::size_t node_count, std::vector<Edge> edges, Label label = 0,
                               std::string id = {}) {
    return make_graph(node_count, std::move(edges), std::vector<Label>(node_count, label),
                      std::move(id));
}

inline Label label_count_of(const LabeledGraph& graph) {
    Label count = 0;
    for (Label l : graph.labels) count = std::max<Label>(count, l + 1);
    return count;
}

/// Compressed sorted adjacency with O(1) edge lookup for moderate graphs.
class Adjacency {
public:
    explicit Adjacency(const LabeledGraph& graph) : offsets_(graph.node_count + 1, 0) {
        for (const Edge& e : graph.edges) {
            ++offsets_[e.u + 1];
            ++offsets_[e.v + 1];
        }
        for (std::size_t i = 0; i < graph.node_count; ++i) offsets_[i + 1] += offsets_[i];
        targets_.resize(offsets_.back());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (const Edge& e : graph.edges) {
            targets_[fill[e.u]++] = e.v;
            targets_[fill[e.v]++] = e.u;
        }
        for (std::size_t i = 0; i < graph.node_count; ++i) {
            std::sort(targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                      targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
        }
        if (graph.node_count <= kDenseLimit) {
            dense_.assign(graph.node_count * graph.node_count, 0);
            for (const Edge& e : graph.edges) {
                dense_[e.u * graph.node_count + e.v] = 1;
                dense_[e.v * graph.node_count + e.u] = 1;
            }
        }
    }

    std::size_t node_count() const { return offsets_.size() - 1; }

    std::span<const Node> neighbors(Node u) const {
        return {targets_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
    }

    std::size_t degree(Node u) const { return offsets_[u + 1] - offsets_[u]; }

    /// Position of v inside neighbors(u), or degree(u) when absent.
    std::size_t slot(Node u, Node v) const {
        auto row = neighbors(u);
        auto it = std::lower_bound(row.begin(), row.end(), v);
        return (it != row.end() && *it == v) ? static_cast<std::size_t>(it - row.begin())
                                             : row.size();
    }

    /// Global index of the directed arc u->v, for per-arc side tables. Arcs
    /// out of u occupy [first_arc(u), first_arc(u) + degree(u)).
    std::size_t arc(Node u, Node v) const { return offsets_[u] + slot(u, v); }
    std::size_t first_arc(Node u) const { return offsets_[u]; }
    std::size_t arc_count() const { return targets_.size(); }

    bool adjacent(Node u, Node v) const {
        if (!dense_.empty()) return dense_[u * node_count() + v] != 0;
        return slot(u, v) < degree(u);
    }

private:
    static constexpr std::size_t kDenseLimit = 4096;

    std::vector<std::size_t> offsets_;
    std::vector<Node> targets_;
    std::vector<std::uint8_t> dense_;
};

/// Sorted first-order neighbor list of every node.
inline std::vector<std::vector<Node>> neighbor_sets(const LabeledGraph& graph) {
    const Adjacency adjacency(graph);
    std::vector<std::vector<Node>> sets(graph.node_count);
    for (Node u = 0; u < graph.node_count; ++u) {
        auto row = adjacency.neighbors(u);
        sets[u].assign(row.begin(), row.end());
    }
    return sets;
}

/// Returns a copy of `graph` with node i renamed to permutation[i].
inline LabeledGraph permuted(const LabeledGraph& graph, std::span<const Node> permutation) {
    std::vector<Edge> edges;
    edges.reserve(graph.edges.size());
    for (const Edge& e : graph.edges) edges.push_back({permutation[e.u], permutation[e.v]});
    std::vector<Label> labels(graph.node_count);
    for (std::size_t i = 0; i < graph.node_count; ++i) labels[permutation[i]] = graph.labels[i];
    return make_graph(graph.node_count, std::move(edges), std::move(labels), graph.id);
}

}  // namespace lsek
