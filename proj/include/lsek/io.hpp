#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "catalog.hpp"
#include "census.hpp"
#include "cross_validation.hpp"
#include "embedding.hpp"
#include "error.hpp"
#include "finnet.hpp"
#include "kernel.hpp"
#include "kpca.hpp"

namespace lsek::io {

/// Shortest text that reads back to the same double ("%.17g").
inline std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string hex(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << v;
    return s.str();
}

/// `graph_id,type_id,label,count`, one row per (graph, topology in mask, label).
/// Labels are written as their raw dataset values.
inline void write_census_csv(std::ostream& out, const std::vector<CensusTable>& tables,
                             const std::vector<long long>& label_values, const TopologyMask& mask) {
    out << "graph_id,type_id,label,count\n";
    for (const auto& t : tables)
        for (int v : mask.ids())
            for (Label l = 0; l < t.label_count; ++l)
                out << t.graph_id << ',' << v << ',' << label_values.at(l) << ',' << t.at(v, l) << '\n';
}

inline std::string embedding_column(int type_id, long long label) {
    return "S_v" + std::to_string(type_id) + "_l" + std::to_string(label);
}

inline void write_embeddings_csv(std::ostream& out, const std::vector<EntropyEmbedding>& embeddings,
                                 const std::vector<long long>& label_values) {
    out << "graph_id";
    for (const auto& entry : catalog())
        for (long long l : label_values) out << ',' << embedding_column(entry.type_id, l);
    out << '\n';
    for (const auto& e : embeddings) {
        out << e.graph_id;
        for (double v : e.values) out << ',' << number(v);
        out << '\n';
    }
}

inline nlohmann::ordered_json to_json(const BaseKernelSpec& spec) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(spec.kind);
    switch (spec.kind) {
        case KernelKind::linear: break;
        case KernelKind::rbf: j["gamma"] = spec.gamma; break;
        case KernelKind::polynomial:
            j["degree"] = spec.degree;
            j["coef0"] = spec.coef0;
            break;
        case KernelKind::sigmoid:
            j["alpha"] = spec.alpha;
            j["coef0"] = spec.coef0;
            break;
    }
    return j;
}

inline nlohmann::ordered_json to_json(const ThermoParams& p) {
    return {{"beta", p.beta},       {"prefactor", p.prefactor}, {"r_min", p.r_min},          {"r_max", p.r_max},
            {"delta_r", p.delta_r}, {"sigma", p.sigma},         {"well_depth", p.well_depth}};
}

inline void write_gram_csv(std::ostream& out, const GramMatrix& g) {
    out << "graph_id";
    for (const auto& id : g.graph_ids) out << ',' << id;
    out << '\n';
    for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
        out << g.graph_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < g.values.cols(); ++j) out << ',' << number(g.values(i, j));
        out << '\n';
    }
}

inline void write_gram_json(std::ostream& out, const GramMatrix& g) {
    nlohmann::ordered_json j;
    j["graph_ids"] = g.graph_ids;
    j["kernel"] = to_json(g.kernel_spec);
    j["params_hash"] = hex(g.params_hash);
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(g.values.cols()));
        for (Eigen::Index c = 0; c < g.values.cols(); ++c) row[static_cast<std::size_t>(c)] = g.values(i, c);
        rows.push_back(row);
    }
    j["values"] = std::move(rows);
    out << j.dump(1) << '\n';
}

/// Precomputed-kernel text format: `label 0:<row> 1:<k> 2:<k> ...`.
inline void write_gram_libsvm(std::ostream& out, const GramMatrix& g, const std::vector<long long>& labels) {
    if (labels.size() != g.size()) throw ContractError("libsvm output needs one class label per graph");
    for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
        out << labels[static_cast<std::size_t>(i)] << " 0:" << (i + 1);
        for (Eigen::Index j = 0; j < g.values.cols(); ++j) out << ' ' << (j + 1) << ':' << number(g.values(i, j));
        out << '\n';
    }
}

struct LabeledGram {
    Eigen::MatrixXd values;
    std::vector<long long> labels;
};

/// Reads the precomputed-kernel format back. Rows may come in any order;
/// the `0:` serial places them.
inline LabeledGram read_gram_libsvm(std::istream& in, const std::string& source = "gram") {
    struct Row {
        long long label;
        std::size_t serial;
        std::vector<std::pair<std::size_t, double>> cells;
    };
    std::vector<Row> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream tokens(line);
        std::string token;
        if (!(tokens >> token)) continue;
        auto fail = [&](const std::string& what) {
            throw FormatError(source + ":" + std::to_string(line_no) + ": " + what);
        };
        Row row{};
        {
            auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), row.label);
            if (ec != std::errc() || end != token.data() + token.size()) fail("bad class label '" + token + "'");
        }
        bool has_serial = false;
        while (tokens >> token) {
            const auto colon = token.find(':');
            if (colon == std::string::npos) fail("expected index:value, got '" + token + "'");
            std::size_t index = 0;
            double value = 0.0;
            auto [e1, c1] = std::from_chars(token.data(), token.data() + colon, index);
            auto [e2, c2] = std::from_chars(token.data() + colon + 1, token.data() + token.size(), value);
            if (c1 != std::errc() || e1 != token.data() + colon || c2 != std::errc() ||
                e2 != token.data() + token.size())
                fail("malformed cell '" + token + "'");
            if (index == 0) {
                row.serial = static_cast<std::size_t>(value);
                has_serial = true;
            } else {
                row.cells.emplace_back(index, value);
            }
        }
        if (!has_serial) fail("missing 0:<serial> cell");
        rows.push_back(std::move(row));
    }
    const std::size_t n = rows.size();
    if (n == 0) throw FormatError(source + ": no kernel rows");
    LabeledGram out{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                    std::vector<long long>(n)};
    std::vector<bool> seen(n, false);
    for (const auto& r : rows) {
        if (r.serial < 1 || r.serial > n || seen[r.serial - 1])
            throw FormatError(source + ": row serial " + std::to_string(r.serial) + " missing, repeated or out of range");
        seen[r.serial - 1] = true;
        out.labels[r.serial - 1] = r.label;
        for (auto [j, v] : r.cells) {
            if (j > n) throw FormatError(source + ": column " + std::to_string(j) + " beyond " + std::to_string(n) + " rows");
            out.values(static_cast<Eigen::Index>(r.serial - 1), static_cast<Eigen::Index>(j - 1)) = v;
        }
    }
    return out;
}

/// `graph_id,class,pc1,...`, plot ready.
inline void write_kpca_csv(std::ostream& out, const KpcaResult& r, const std::vector<long long>& classes) {
    const auto k = r.coordinates.cols();
    out << "graph_id,class";
    for (Eigen::Index c = 0; c < k; ++c) out << ",pc" << (c + 1);
    out << '\n';
    for (Eigen::Index i = 0; i < r.coordinates.rows(); ++i) {
        out << r.graph_ids[static_cast<std::size_t>(i)] << ',' << classes[static_cast<std::size_t>(i)];
        for (Eigen::Index c = 0; c < k; ++c) out << ',' << number(r.coordinates(i, c));
        out << '\n';
    }
}

inline nlohmann::ordered_json to_json(const CvReport& r) {
    nlohmann::ordered_json j;
    j["seed"] = r.seed;
    j["mean"] = r.mean;
    j["std_error"] = r.std_error;
    j["C"] = r.C;
    j["fold_accuracies"] = r.fold_accuracies;
    j["fold_C"] = r.fold_C;
    return j;
}

inline void write_cv_table(std::ostream& out, const std::vector<CvReport>& reports) {
    char line[160];
    out << "seed        mean   std_err        C  folds\n";
    for (const auto& r : reports) {
        std::snprintf(line, sizeof line, "%-8llu  %6.4f  %8.4f  %7g  %zu\n", static_cast<unsigned long long>(r.seed),
                      r.mean, r.std_error, r.C, r.fold_accuracies.size());
        out << line;
    }
}

/// `window_end_date,topology,subgraph_entropy,von_neumann_entropy,flagged`.
/// `flags[i]` belongs to series.type_ids[i]; an extra trailing entry, if
/// present, belongs to the summed series written with topology "all".
inline void write_entropy_series_csv(std::ostream& out, const EntropySeries& s,
                                     const std::vector<std::vector<bool>>& flags, bool with_total) {
    out << "window_end_date,topology,subgraph_entropy,von_neumann_entropy,flagged\n";
    const auto total = s.total();
    for (std::size_t w = 0; w < s.dates.size(); ++w) {
        for (std::size_t i = 0; i < s.type_ids.size(); ++i)
            out << s.dates[w] << ',' << s.type_ids[i] << ',' << number(s.subgraph[i][w]) << ','
                << number(s.von_neumann[w]) << ',' << (flags[i][w] ? 1 : 0) << '\n';
        if (with_total)
            out << s.dates[w] << ",all," << number(total[w]) << ',' << number(s.von_neumann[w]) << ','
                << (flags.back()[w] ? 1 : 0) << '\n';
    }
}

}  // namespace lsek::io
