#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "catalog.hpp"
#include "error.hpp"
#include "graph.hpp"

namespace lsek {

using Count = std::int64_t;

/// Occurrence counts per (topology, root label) for one graph.
struct CensusTable {
    std::string graph_id;
    Label label_count = 0;
    std::vector<Count> counts;  // row-major: topology index, then label

    CensusTable() = default;
    CensusTable(std::string id, Label labels)
        : graph_id(std::move(id)), label_count(labels), counts(kTopologyCount * labels, 0) {}

    Count& at(int type_id, Label label) { return counts[index(type_id, label)]; }
    Count at(int type_id, Label label) const { return counts[index(type_id, label)]; }

    /// Unlabeled rooted count of one topology (labels summed out).
    Count total(int type_id) const {
        Count sum = 0;
        for (Label l = 0; l < label_count; ++l) sum += at(type_id, l);
        return sum;
    }

    friend bool operator==(const CensusTable&, const CensusTable&) = default;

private:
    std::size_t index(int type_id, Label label) const {
        return static_cast<std::size_t>(type_id - 1) * label_count + label;
    }
};

// ---------------------------------------------------------------------------
// Hop composition
// ---------------------------------------------------------------------------

inline constexpr int kMaxHops = 5;

/// A simple path stored as its node sequence (at most kMaxHops + 1 nodes).
struct SimplePath {
    std::array<Node, kMaxHops + 1> nodes{};
    std::uint8_t size = 0;

    Node front() const { return nodes[0]; }
    Node back() const { return nodes[size - 1]; }
    bool contains(Node x) const { return std::find(nodes.begin(), nodes.begin() + size, x) != nodes.begin() + size; }
};

/// All simple paths with a fixed hop count, bucketed by start node.
struct PathTable {
    int hops = 0;
    std::vector<std::vector<SimplePath>> by_start;

    std::size_t size() const {
        std::size_t n = 0;
        for (const auto& bucket : by_start) n += bucket.size();
        return n;
    }
};

namespace detail {

inline PathTable single_hop_paths(const Adjacency& adjacency) {
    PathTable table{1, std::vector<std::vector<SimplePath>>(adjacency.node_count())};
    for (Node u = 0; u < adjacency.node_count(); ++u) {
        for (Node v : adjacency.neighbors(u)) {
            SimplePath p;
            p.nodes[0] = u;
            p.nodes[1] = v;
            p.size = 2;
            table.by_start[u].push_back(p);
        }
    }
    return table;
}

/// Glues every path of `head` to every path of `tail` starting where it ends,
/// keeping only joins whose node sets meet at the midpoint alone.
inline PathTable join_at_midpoint(const PathTable& head, const PathTable& tail) {
    PathTable joined{head.hops + tail.hops, std::vector<std::vector<SimplePath>>(head.by_start.size())};
    for (std::size_t u = 0; u < head.by_start.size(); ++u) {
        auto& out = joined.by_start[u];
        for (const SimplePath& p : head.by_start[u]) {
            for (const SimplePath& q : tail.by_start[p.back()]) {
                bool disjoint = true;
                for (std::uint8_t i = 1; i < q.size && disjoint; ++i) disjoint = !p.contains(q.nodes[i]);
                if (!disjoint) continue;
                SimplePath r = p;
                for (std::uint8_t i = 1; i < q.size; ++i) r.nodes[r.size++] = q.nodes[i];
                out.push_back(r);
            }
        }
    }
    return joined;
}

/// Memoized hop tables: h is built from floor(h/2) and ceil(h/2).
class PathTables {
public:
    explicit PathTables(const Adjacency& adjacency) : adjacency_(adjacency) {}

    const PathTable& get(int hops) {
        if (hops < 1 || hops > kMaxHops)
            throw ContractError("hop count " + std::to_string(hops) + " outside 1.." + std::to_string(kMaxHops));
        auto& slot = tables_[static_cast<std::size_t>(hops)];
        if (slot.hops == 0) {
            if (hops == 1) {
                slot = single_hop_paths(adjacency_);
            } else {
                const int low = hops / 2;
                const int high = hops - low;
                // get() may touch other slots; the array never reallocates.
                const PathTable& head = get(low);
                const PathTable& tail = get(high);
                slot = join_at_midpoint(head, tail);
            }
        }
        return slot;
    }

private:
    const Adjacency& adjacency_;
    std::array<PathTable, kMaxHops + 1> tables_{};
};

}  // namespace detail

/// Vertex sets of all simple h-edge paths, keyed by ordered (start, end).
using PathSets = std::map<std::pair<Node, Node>, std::vector<std::vector<Node>>>;

/// Simple paths with exactly `hops` edges, built by joining half-length hop
/// tables. Each entry is the sorted vertex set of one directed path; lists
/// are sorted so the result is canonical.
inline PathSets compose_path_sets(const LabeledGraph& graph, int hops) {
    if (hops < 1 || hops > kMaxHops)
        throw ContractError("hop count " + std::to_string(hops) + " outside 1.." + std::to_string(kMaxHops));
    const Adjacency adjacency(graph);
    detail::PathTables tables(adjacency);
    PathSets sets;
    for (const auto& bucket : tables.get(hops).by_start) {
        for (const SimplePath& p : bucket) {
            std::vector<Node> nodes(p.nodes.begin(), p.nodes.begin() + p.size);
            std::sort(nodes.begin(), nodes.end());
            sets[{p.front(), p.back()}].push_back(std::move(nodes));
        }
    }
    for (auto& [ends, list] : sets) std::sort(list.begin(), list.end());
    return sets;
}

// ---------------------------------------------------------------------------
// Rooted counting
// ---------------------------------------------------------------------------

namespace detail {

inline Count choose2(Count n) { return n < 2 ? 0 : n * (n - 1) / 2; }
inline Count choose3(Count n) { return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6; }

/// True when consecutive nodes are the only adjacent pairs of the path,
/// optionally allowing the first-last pair (closing a cycle).
inline bool chordless(const Adjacency& adjacency, const SimplePath& p, bool allow_closure) {
    for (std::uint8_t i = 0; i + 2 < p.size; ++i) {
        for (std::uint8_t j = i + 2; j < p.size; ++j) {
            if (allow_closure && i == 0 && j == p.size - 1) continue;
            if (adjacency.adjacent(p.nodes[i], p.nodes[j])) return false;
        }
    }
    return true;
}

/// Rooted counts of every catalog topology at every node; row u holds the
/// counts for root u in catalog order.
class RootedCounter {
public:
    RootedCounter(const LabeledGraph& graph, const TopologyMask& mask)
        : graph_(graph), adjacency_(graph), mask_(mask), n_(graph.node_count) {}

    std::vector<std::array<Count, kTopologyCount>> run() {
        std::vector<std::array<Count, kTopologyCount>> rooted(n_, std::array<Count, kTopologyCount>{});
        if (n_ < 3) return rooted;
        const bool needs_small = any_of({1, 2, 3, 4, 5, 6, 7, 8});
        if (needs_small) {
            edge_triangles();
            for (Node u = 0; u < n_; ++u) small_orbits(u, rooted[u]);
        }
        if (mask_.contains(10)) {
            for (Node u = 0; u < n_; ++u) rooted[u][9] = independent_quadruples(u);
        }
        if (mask_.contains(9) || mask_.contains(11) || mask_.contains(12)) long_paths(rooted);
        for (auto& row : rooted) {
            for (int id = 1; id <= static_cast<int>(kTopologyCount); ++id)
                if (!mask_.contains(id)) row[static_cast<std::size_t>(id - 1)] = 0;
        }
        return rooted;
    }

private:
    bool any_of(std::initializer_list<int> ids) const {
        return std::any_of(ids.begin(), ids.end(), [&](int id) { return mask_.contains(id); });
    }

    // Per-arc common-neighbor counts |N(a) ∩ N(b)| and per-node triangle counts.
    void edge_triangles() {
        common_.assign(adjacency_.arc_count(), 0);
        triangles_.assign(n_, 0);
        for (const Edge& e : graph_.edges) {
            auto nu = adjacency_.neighbors(e.u);
            auto nv = adjacency_.neighbors(e.v);
            Count shared = 0;
            for (auto i = nu.begin(), j = nv.begin(); i != nu.end() && j != nv.end();) {
                if (*i < *j) {
                    ++i;
                } else if (*j < *i) {
                    ++j;
                } else {
                    ++shared;
                    ++i;
                    ++j;
                }
            }
            common_[adjacency_.arc(e.u, e.v)] = shared;
            common_[adjacency_.arc(e.v, e.u)] = shared;
        }
        for (Node u = 0; u < n_; ++u) {
            Count twice = 0;
            for (std::size_t i = 0; i < adjacency_.degree(u); ++i) twice += common_[adjacency_.first_arc(u) + i];
            triangles_[u] = twice / 2;
        }
    }

    // Topologies 1..8 at root u from edge-local quantities. Each orbit is a
    // non-induced local count minus the denser shapes it over-counts.
    void small_orbits(Node u, std::array<Count, kTopologyCount>& out) {
        if (in_u_.size() != n_) {
            in_u_.assign(n_, kUnset);
            in_a_.assign(n_, kUnset);
            walks_.assign(n_, 0);
        }
        const auto nu = adjacency_.neighbors(u);
        const Count d = static_cast<Count>(nu.size());
        for (Node a : nu) in_u_[a] = u;

        Count triangles_twice = 0;   // Σ_a c(u,a)
        Count wedges_in_nbhd = 0;    // Σ_a C(c(u,a), 2)
        Count path3_ends = 0;        // Σ_a (deg a − 1 − c(u,a))
        Count nbr_triangles = 0;     // Σ_a t(a)
        Count three_walks = 0;       // simple 3-edge paths starting at u
        Count common_ordered = 0;    // Σ over ordered adjacent (a,b) in N(u) of c(a,b)
        Count k4_ordered = 0;        // Σ over ordered adjacent (a,b) in N(u) of |N(u)∩N(a)∩N(b)|
        Count paw_side = 0;          // Σ over ordered adjacent (a,b) in N(u) of deg a − c(a,u) − c(a,b)

        touched_.clear();
        for (std::size_t i = 0; i < nu.size(); ++i) {
            const Node a = nu[i];
            const Count c_ua = common_[adjacency_.first_arc(u) + i];
            const Count deg_a = static_cast<Count>(adjacency_.degree(a));
            triangles_twice += c_ua;
            wedges_in_nbhd += choose2(c_ua);
            path3_ends += deg_a - 1 - c_ua;
            nbr_triangles += triangles_[a];

            const auto na = adjacency_.neighbors(a);
            for (Node x : na) in_a_[x] = a;
            for (std::size_t j = 0; j < na.size(); ++j) {
                const Node b = na[j];
                if (b == u) continue;
                three_walks += static_cast<Count>(adjacency_.degree(b)) - 1;
                if (walks_[b]++ == 0) touched_.push_back(b);
                if (in_u_[b] != u) continue;
                const Count c_ab = common_[adjacency_.first_arc(a) + j];
                common_ordered += c_ab;
                paw_side += deg_a - c_ua - c_ab;
                for (Node x : adjacency_.neighbors(b))
                    if (in_u_[x] == u && in_a_[x] == a) ++k4_ordered;
            }
            for (Node x : na) in_a_[x] = kUnset;
        }
        three_walks -= triangles_twice;

        Count opposite_pairs = 0;  // Σ_{b≠u} C(#common neighbors of u and b, 2)
        for (Node b : touched_) {
            opposite_pairs += choose2(walks_[b]);
            walks_[b] = 0;
        }
        for (Node a : nu) in_u_[a] = kUnset;

        const Count tri = triangles_twice / 2;
        const Count k4 = k4_ordered / 6;
        const Count diamond_hub = wedges_in_nbhd - 3 * k4;
        const Count diamond_side = common_ordered / 2 - tri - 3 * k4;
        const Count paw_tail = nbr_triangles - common_ordered + 3 * k4;
        const Count paw_rim = paw_side + 6 * k4;
        const Count claw_center = choose3(d) - (d - 2) * tri + wedges_in_nbhd - k4;
        const Count square = opposite_pairs - diamond_side - diamond_hub - 3 * k4;
        const Count path4_end = three_walks - 2 * square - 2 * paw_tail - paw_rim - 4 * diamond_side -
                                2 * diamond_hub - 6 * k4;

        out[0] = tri;
        out[1] = path3_ends;
        out[2] = path4_end;
        out[3] = claw_center;
        out[4] = square;
        out[5] = paw_tail;
        out[6] = diamond_hub;
        out[7] = k4;
    }

    // Induced star-5 centered at u: independent 4-subsets of N(u). The last
    // leaf is counted in bulk by clearing every position adjacent to the
    // first three leaves.
    Count independent_quadruples(Node u) {
        const auto nu = adjacency_.neighbors(u);
        const std::size_t d = nu.size();
        if (d < 4) return 0;
        const std::size_t words = (d + 63) / 64;
        std::vector<std::uint64_t> rows(d * words, 0);
        auto row = [&](std::size_t i) { return rows.data() + i * words; };
        auto test = [&](std::size_t i, std::size_t j) { return (row(i)[j / 64] >> (j % 64)) & 1u; };
        for (std::size_t i = 0; i < d; ++i) {
            for (Node x : adjacency_.neighbors(nu[i])) {
                std::size_t j = adjacency_.slot(u, x);
                if (j < d) row(i)[j / 64] |= std::uint64_t{1} << (j % 64);
            }
        }
        Count total = 0;
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = a + 1; b < d; ++b) {
                if (test(a, b)) continue;
                for (std::size_t c = b + 1; c + 1 < d; ++c) {
                    if (test(a, c) || test(b, c)) continue;
                    // positions e > c with no edge to a, b or c
                    for (std::size_t w = (c + 1) / 64; w < words; ++w) {
                        std::uint64_t free = ~(row(a)[w] | row(b)[w] | row(c)[w]);
                        if (w == (c + 1) / 64) free &= ~std::uint64_t{0} << ((c + 1) % 64);
                        if (w == words - 1 && d % 64 != 0) free &= (std::uint64_t{1} << (d % 64)) - 1;
                        total += std::popcount(free);
                    }
                }
            }
        }
        return total;
    }

    // Paths on 5 and 6 nodes and the 5-cycle, from the 4- and 5-hop tables.
    void long_paths(std::vector<std::array<Count, kTopologyCount>>& rooted) {
        PathTables tables(adjacency_);
        if (mask_.contains(9) || mask_.contains(11)) {
            const PathTable& four = tables.get(4);
            for (Node u = 0; u < n_; ++u) {
                Count open = 0;
                Count closed = 0;
                for (const SimplePath& p : four.by_start[u]) {
                    if (adjacency_.adjacent(p.front(), p.back())) {
                        if (chordless(adjacency_, p, true)) ++closed;
                    } else if (chordless(adjacency_, p, false)) {
                        ++open;
                    }
                }
                rooted[u][8] = open;
                rooted[u][10] = closed / 2;  // both directions around the cycle
            }
        }
        if (mask_.contains(12)) {
            const PathTable& five = tables.get(5);
            for (Node u = 0; u < n_; ++u) {
                Count open = 0;
                for (const SimplePath& p : five.by_start[u])
                    if (chordless(adjacency_, p, false)) ++open;
                rooted[u][11] = open;
            }
        }
    }

    static constexpr Node kUnset = static_cast<Node>(-1);

    const LabeledGraph& graph_;
    Adjacency adjacency_;
    TopologyMask mask_;
    std::size_t n_;
    std::vector<Count> common_;
    std::vector<Count> triangles_;
    std::vector<Node> in_u_;
    std::vector<Node> in_a_;
    std::vector<Count> walks_;
    std::vector<Node> touched_;
};

}  // namespace detail

/// Labeled rooted census of `graph` over the masked catalog entries.
///
/// counts[v][l] is the number of pairs (S, u) where S induces topology v, u
/// sits in a root-orbit position of S, and u carries label l. `label_count`
/// fixes the label axis (0 means "derive from the graph").
inline CensusTable count_labeled(const LabeledGraph& graph, const TopologyMask& mask = TopologyMask::all(),
                                 Label label_count = 0) {
    if (mask.empty()) throw ContractError("topology mask selects nothing");
    if (label_count == 0) label_count = std::max<Label>(1, label_count_of(graph));
    if (label_count_of(graph) > label_count)
        throw ContractError("graph '" + graph.id + "' uses labels beyond the label axis");
    CensusTable table(graph.id, label_count);
    const auto rooted = detail::RootedCounter(graph, mask).run();
    for (Node u = 0; u < graph.node_count; ++u) {
        for (std::size_t v = 0; v < kTopologyCount; ++v)
            table.at(static_cast<int>(v + 1), graph.labels[u]) += rooted[u][v];
    }
    return table;
}

}  // namespace lsek
