#pragma once

#include <array>
#include <bitset>
#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"

namespace lsek {

inline constexpr std::size_t kTopologyCount = 12;

/// One rooted graphlet topology. Positions are 0..nodes-1; `root_orbit` lists
/// the positions an occurrence may be marked by.
struct TopologyEntry {
    int type_id;  // 1-based, stable; defines embedding coordinate order
    std::string_view name;
    std::size_t nodes;  // l_v
    std::vector<std::pair<int, int>> edges;
    std::vector<int> root_orbit;
    std::string_view root_description;

    std::size_t edge_count() const { return edges.size(); }  // d_v
};

using TopologyCatalog = std::array<TopologyEntry, kTopologyCount>;

/// The fixed twelve-topology catalog: every connected shape on 3 and 4 nodes,
/// followed by the path, star and cycle on 5 nodes and the path on 6.
inline const TopologyCatalog& catalog() {
    static const TopologyCatalog entries{{
        {1, "triangle", 3, {{0, 1}, {1, 2}, {0, 2}}, {0, 1, 2}, "any node"},
        {2, "path-3", 3, {{0, 1}, {1, 2}}, {0, 2}, "an end node"},
        {3, "path-4", 4, {{0, 1}, {1, 2}, {2, 3}}, {0, 3}, "an end node"},
        {4, "star-4", 4, {{0, 1}, {0, 2}, {0, 3}}, {0}, "the center"},
        {5, "cycle-4", 4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {0, 1, 2, 3}, "any node"},
        {6, "tailed-triangle", 4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}}, {3}, "the end of the tail"},
        {7, "diamond", 4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}}, {0, 1}, "a degree-3 node"},
        {8, "clique-4", 4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, {0, 1, 2, 3}, "any node"},
        {9, "path-5", 5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}, {0, 4}, "an end node"},
        {10, "star-5", 5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, {0}, "the center"},
        {11, "cycle-5", 5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}}, {0, 1, 2, 3, 4}, "any node"},
        {12, "path-6", 6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}}, {0, 5}, "an end node"},
    }};
    return entries;
}

inline const TopologyEntry& topology(int type_id) {
    if (type_id < 1 || type_id > static_cast<int>(kTopologyCount))
        throw ContractError("topology id " + std::to_string(type_id) + " outside 1..12");
    return catalog()[static_cast<std::size_t>(type_id - 1)];
}

/// Subset of catalog entries to count. Masked-out topologies report zero.
class TopologyMask {
public:
    TopologyMask() = default;

    static TopologyMask all() { return TopologyMask(std::bitset<kTopologyCount>().set()); }
    static TopologyMask none() { return TopologyMask(); }
    /// Entries 1..8: all shapes on at most four nodes.
    static TopologyMask up_to_four_nodes() {
        TopologyMask mask;
        for (int id = 1; id <= 8; ++id) mask.set(id);
        return mask;
    }
    static TopologyMask only(int type_id) {
        TopologyMask mask;
        mask.set(type_id);
        return mask;
    }
    static TopologyMask excluding(int type_id) {
        TopologyMask mask = all();
        mask.set(type_id, false);
        return mask;
    }

    /// Accepts `all`, `small` (ids 1..8), `include=1,3,5`, `exclude=4`, or a
    /// bare id list `1,3,5`.
    static TopologyMask parse(std::string_view text) {
        if (text == "all") return all();
        if (text == "small") return up_to_four_nodes();
        bool exclude = false;
        if (text.starts_with("include=")) {
            text.remove_prefix(8);
        } else if (text.starts_with("exclude=")) {
            text.remove_prefix(8);
            exclude = true;
        }
        TopologyMask listed;
        while (!text.empty()) {
            auto comma = text.find(',');
            auto token = text.substr(0, comma);
            int id = 0;
            auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), id);
            if (token.empty() || ec != std::errc() || end != token.data() + token.size() || id < 1 ||
                id > static_cast<int>(kTopologyCount)) {
                throw ContractError("bad topology id '" + std::string(token) + "' (expected 1..12)");
            }
            listed.set(id);
            if (comma == std::string_view::npos) break;
            text.remove_prefix(comma + 1);
        }
        TopologyMask mask = exclude ? TopologyMask(~listed.bits_) : listed;
        if (mask.empty()) throw ContractError("topology mask selects nothing");
        return mask;
    }

    void set(int type_id, bool on = true) {
        (void)topology(type_id);
        bits_.set(static_cast<std::size_t>(type_id - 1), on);
    }
    bool contains(int type_id) const { return bits_.test(static_cast<std::size_t>(type_id - 1)); }
    bool empty() const { return bits_.none(); }
    std::size_t count() const { return bits_.count(); }

    std::vector<int> ids() const {
        std::vector<int> out;
        for (int id = 1; id <= static_cast<int>(kTopologyCount); ++id)
            if (contains(id)) out.push_back(id);
        return out;
    }

    /// Canonical text form, e.g. "1,2,3".
    std::string to_string() const {
        std::string out;
        for (int id : ids()) out += (out.empty() ? "" : ",") + std::to_string(id);
        return out;
    }

    friend bool operator==(const TopologyMask&, const TopologyMask&) = default;

private:
    explicit TopologyMask(std::bitset<kTopologyCount> bits) : bits_(bits) {}
    std::bitset<kTopologyCount> bits_;
};

}  // namespace lsek
