#pragma once

// Exhaustive reference census. Shares nothing with census.hpp's counting
// code beyond the CensusTable type: every connected node subset of size 3..6
// is tested against each catalog entry by trying all position assignments.

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "catalog.hpp"
#include "census.hpp"
#include "error.hpp"
#include "graph.hpp"

namespace lsek {

inline constexpr std::size_t kOracleMaxNodes = 16;

namespace oracle_detail {

struct Shape {
    int type_id;
    std::size_t nodes;
    std::size_t edges;
    std::vector<std::vector<bool>> adjacent;
    std::vector<int> degrees_sorted;
    std::vector<bool> is_root;
};

inline std::vector<Shape> shapes() {
    std::vector<Shape> out;
    for (const auto& entry : catalog()) {
        Shape s{entry.type_id, entry.nodes, entry.edges.size(),
                std::vector<std::vector<bool>>(entry.nodes, std::vector<bool>(entry.nodes, false)),
                std::vector<int>(entry.nodes, 0), std::vector<bool>(entry.nodes, false)};
        for (auto [a, b] : entry.edges) {
            s.adjacent[a][b] = s.adjacent[b][a] = true;
            ++s.degrees_sorted[a];
            ++s.degrees_sorted[b];
        }
        std::sort(s.degrees_sorted.begin(), s.degrees_sorted.end());
        for (int r : entry.root_orbit) s.is_root[r] = true;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace oracle_detail

/// Brute-force census. Graphs above `max_nodes` are refused since the
/// enumeration is O(n^6).
inline CensusTable count_oracle(const LabeledGraph& graph, Label label_count = 0,
                                std::size_t max_nodes = kOracleMaxNodes) {
    const std::size_t n = graph.node_count;
    if (n > max_nodes) {
        throw ContractError("size guard: oracle census limited to " + std::to_string(max_nodes) +
                            " nodes, graph '" + graph.id + "' has " + std::to_string(n));
    }
    if (label_count == 0) label_count = std::max<Label>(1, label_count_of(graph));
    CensusTable table(graph.id, label_count);

    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (const Edge& e : graph.edges) adj[e.u][e.v] = adj[e.v][e.u] = true;
    const auto shapes = oracle_detail::shapes();

    std::vector<Node> subset;
    auto visit = [&](const std::vector<Node>& s) {
        const std::size_t k = s.size();
        // connectivity by flood fill
        std::vector<bool> seen(k, false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        std::size_t reached = 1;
        while (!stack.empty()) {
            std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < k; ++j) {
                if (!seen[j] && adj[s[i]][s[j]]) {
                    seen[j] = true;
                    ++reached;
                    stack.push_back(j);
                }
            }
        }
        if (reached != k) return;

        std::size_t edges = 0;
        std::vector<int> degrees(k, 0);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                if (adj[s[i]][s[j]]) {
                    ++edges;
                    ++degrees[i];
                    ++degrees[j];
                }
            }
        }
        std::sort(degrees.begin(), degrees.end());

        for (const auto& shape : shapes) {
            if (shape.nodes != k || shape.edges != edges || shape.degrees_sorted != degrees) continue;
            // position p of the shape is played by s[order[p]]
            std::vector<std::size_t> order(k);
            std::iota(order.begin(), order.end(), 0);
            std::set<Node> roots;
            do {
                bool match = true;
                for (std::size_t p = 0; p < k && match; ++p)
                    for (std::size_t q = p + 1; q < k && match; ++q)
                        if (shape.adjacent[p][q] != adj[s[order[p]]][s[order[q]]]) match = false;
                if (!match) continue;
                for (std::size_t p = 0; p < k; ++p)
                    if (shape.is_root[p]) roots.insert(s[order[p]]);
            } while (std::next_permutation(order.begin(), order.end()));
            for (Node r : roots) ++table.at(shape.type_id, graph.labels[r]);
        }
    };

    auto extend = [&](auto&& self, Node start) -> void {
        if (subset.size() >= 3) visit(subset);
        if (subset.size() == 6) return;
        for (Node v = start; v < n; ++v) {
            subset.push_back(v);
            self(self, v + 1);
            subset.pop_back();
        }
    };
    extend(extend, 0);
    return table;
}

}  // namespace lsek
