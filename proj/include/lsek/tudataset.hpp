#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "graph.hpp"

namespace lsek {

/// Ordered collection of labeled graphs sharing one dense node-label axis.
///
/// Node labels inside `graphs` are dense ids 0..label_count()-1; `label_values`
/// maps each dense id back to the raw value read from disk (sorted ascending).
struct GraphDataset {
    std::string name;
    std::vector<LabeledGraph> graphs;
    std::vector<long long> class_labels;
    std::vector<long long> label_values;

    std::size_t size() const { return graphs.size(); }
    Label label_count() const { return static_cast<Label>(label_values.size()); }

    friend bool operator==(const GraphDataset&, const GraphDataset&) = default;
};

/// Wraps graphs built in memory (labels already dense) into a dataset whose
/// raw label values equal the dense ids.
inline GraphDataset make_dataset(std::vector<LabeledGraph> graphs,
                                 std::vector<long long> class_labels, std::string name = {}) {
    if (class_labels.size() != graphs.size())
        throw ContractError("class label count does not match graph count");
    Label labels = 0;
    for (const auto& g : graphs) labels = std::max(labels, label_count_of(g));
    GraphDataset dataset{std::move(name), std::move(graphs), std::move(class_labels), {}};
    for (Label l = 0; l < labels; ++l) dataset.label_values.push_back(l);
    return dataset;
}

namespace detail {

struct IntegerRows {
    std::filesystem::path path;
    std::vector<std::vector<long long>> rows;
};

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Reads a comma-separated integer table, skipping blank lines.
inline IntegerRows read_integer_rows(const std::filesystem::path& path, std::size_t columns) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path.string());
    IntegerRows table{path, {}};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view rest = trim(line);
        if (rest.empty()) continue;
        std::vector<long long> row;
        for (;;) {
            auto comma = rest.find(',');
            std::string_view token = trim(rest.substr(0, comma));
            long long value = 0;
            auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
            if (token.empty() || ec != std::errc() || end != token.data() + token.size()) {
                throw FormatError(path.string() + ":" + std::to_string(line_no) +
                                  ": non-integer token '" + std::string(token) + "'");
            }
            row.push_back(value);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (row.size() != columns) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(columns) + " column(s), found " +
                              std::to_string(row.size()));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline std::filesystem::path dataset_file(const std::filesystem::path& dir, const std::string& name,
                                          const char* suffix) {
    return dir / (name + suffix);
}

}  // namespace detail

/// Loads `dir/NAME_{A,graph_indicator,graph_labels,node_labels}.txt`.
///
/// Both directions of an edge are merged into one undirected edge; the same
/// directed entry listed twice is treated as corruption. Edge labels, if
/// present, are ignored.
inline GraphDataset parse_tudataset(const std::filesystem::path& dir, const std::string& name) {
    using detail::dataset_file;
    using detail::read_integer_rows;
    if (!std::filesystem::is_directory(dir)) throw IngestError("not a directory: " + dir.string());

    // Open everything up front so a missing file is reported before any
    // format complaint about another file.
    for (const char* suffix : {"_A.txt", "_graph_indicator.txt", "_graph_labels.txt", "_node_labels.txt"}) {
        auto path = dataset_file(dir, name, suffix);
        if (!std::filesystem::exists(path)) throw IngestError("missing file " + path.string());
    }

    const auto indicator = read_integer_rows(dataset_file(dir, name, "_graph_indicator.txt"), 1);
    const auto class_rows = read_integer_rows(dataset_file(dir, name, "_graph_labels.txt"), 1);
    const auto node_rows = read_integer_rows(dataset_file(dir, name, "_node_labels.txt"), 1);
    const auto edge_rows = read_integer_rows(dataset_file(dir, name, "_A.txt"), 2);

    const std::size_t graph_total = class_rows.rows.size();
    const std::size_t node_total = indicator.rows.size();
    if (node_rows.rows.size() != node_total) {
        throw FormatError(node_rows.path.string() + ": " + std::to_string(node_rows.rows.size()) +
                          " node labels for " + std::to_string(node_total) + " nodes");
    }

    // Global node id (0-based) -> (graph, local index).
    std::vector<std::size_t> owner(node_total);
    std::vector<Node> local(node_total);
    std::vector<std::size_t> sizes(graph_total, 0);
    for (std::size_t i = 0; i < node_total; ++i) {
        long long g = indicator.rows[i][0];
        if (g < 1 || static_cast<std::size_t>(g) > graph_total) {
            throw FormatError(indicator.path.string() + ":" + std::to_string(i + 1) +
                              ": graph id " + std::to_string(g) + " outside 1.." +
                              std::to_string(graph_total));
        }
        owner[i] = static_cast<std::size_t>(g - 1);
        local[i] = static_cast<Node>(sizes[owner[i]]++);
    }

    std::set<long long> raw_labels;
    for (const auto& row : node_rows.rows) raw_labels.insert(row[0]);
    std::vector<long long> label_values(raw_labels.begin(), raw_labels.end());
    auto dense_label = [&](long long raw) {
        return static_cast<Label>(std::lower_bound(label_values.begin(), label_values.end(), raw) -
                                  label_values.begin());
    };

    std::vector<std::vector<Label>> labels(graph_total);
    for (std::size_t g = 0; g < graph_total; ++g) labels[g].reserve(sizes[g]);
    for (std::size_t i = 0; i < node_total; ++i)
        labels[owner[i]].push_back(dense_label(node_rows.rows[i][0]));

    std::vector<std::set<std::pair<Node, Node>>> arcs(graph_total);
    std::size_t line = 0;
    for (const auto& row : edge_rows.rows) {
        ++line;
        const long long a = row[0];
        const long long b = row[1];
        auto where = edge_rows.path.string() + " entry " + std::to_string(line);
        if (a < 1 || b < 1 || static_cast<std::size_t>(a) > node_total ||
            static_cast<std::size_t>(b) > node_total) {
            throw FormatError(where + ": node id outside 1.." + std::to_string(node_total));
        }
        const std::size_t ga = owner[static_cast<std::size_t>(a - 1)];
        const std::size_t gb = owner[static_cast<std::size_t>(b - 1)];
        if (ga != gb) {
            throw FormatError(where + ": edge (" + std::to_string(a) + "," + std::to_string(b) +
                              ") crosses graphs " + std::to_string(ga + 1) + " and " +
                              std::to_string(gb + 1));
        }
        if (a == b) throw FormatError(where + ": self-loop on node " + std::to_string(a));
        const Node u = local[static_cast<std::size_t>(a - 1)];
        const Node v = local[static_cast<std::size_t>(b - 1)];
        if (!arcs[ga].insert({u, v}).second) {
            throw FormatError(where + ": duplicated edge entry (" + std::to_string(a) + "," +
                              std::to_string(b) + ")");
        }
    }

    GraphDataset dataset;
    dataset.name = name;
    dataset.label_values = std::move(label_values);
    dataset.graphs.reserve(graph_total);
    for (std::size_t g = 0; g < graph_total; ++g) {
        std::vector<Edge> edges;
        for (auto [u, v] : arcs[g]) {
            if (u < v || !arcs[g].contains({v, u})) edges.push_back(normalized({u, v}));
        }
        dataset.graphs.push_back(
            make_graph(sizes[g], std::move(edges), std::move(labels[g]), std::to_string(g + 1)));
        dataset.class_labels.push_back(class_rows.rows[g][0]);
    }
    return dataset;
}

/// Name inferred from the directory basename (`.../MUTAG` -> "MUTAG").
inline GraphDataset parse_tudataset(const std::filesystem::path& dir) {
    auto clean = dir.lexically_normal();
    if (!clean.has_filename()) clean = clean.parent_path();
    return parse_tudataset(dir, clean.filename().string());
}

/// Writes the dataset in the same layout, listing each edge in both directions.
inline void write_tudataset(const GraphDataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* suffix) {
        auto path = detail::dataset_file(dir, dataset.name, suffix);
        std::ofstream out(path);
        if (!out) throw IngestError("cannot write " + path.string());
        return out;
    };
    auto edges_out = open("_A.txt");
    auto indicator_out = open("_graph_indicator.txt");
    auto class_out = open("_graph_labels.txt");
    auto node_out = open("_node_labels.txt");
    std::size_t base = 1;
    for (std::size_t g = 0; g < dataset.graphs.size(); ++g) {
        const auto& graph = dataset.graphs[g];
        class_out << dataset.class_labels[g] << '\n';
        for (std::size_t i = 0; i < graph.node_count; ++i) {
            indicator_out << g + 1 << '\n';
            node_out << dataset.label_values.at(graph.labels[i]) << '\n';
        }
        for (const Edge& e : graph.edges) {
            edges_out << base + e.u << ", " << base + e.v << '\n';
            edges_out << base + e.v << ", " << base + e.u << '\n';
        }
        base += graph.node_count;
    }
}

}  // namespace lsek
