#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "lsek/finnet.hpp"
#include "lsek/graph.hpp"

namespace lsek::testing {

inline std::filesystem::path data_dir() { return LSEK_TEST_DATA; }
inline std::filesystem::path mutag_dir() { return data_dir() / "MUTAG"; }

/// G(n, p) with labels drawn uniformly from [0, labels).
inline LabeledGraph random_graph(std::mt19937_64& rng, std::size_t n, double density, Label labels,
                                 std::string id = {}) {
    std::bernoulli_distribution coin(density);
    std::uniform_int_distribution<Label> pick(0, labels - 1);
    std::vector<Edge> edges;
    for (Node u = 0; u < n; ++u)
        for (Node v = u + 1; v < n; ++v)
            if (coin(rng)) edges.push_back({u, v});
    std::vector<Label> node_labels(n);
    for (auto& l : node_labels) l = pick(rng);
    return make_graph(n, std::move(edges), std::move(node_labels), std::move(id));
}

inline LabeledGraph complete_graph(std::size_t n, Label label = 0) {
    std::vector<Edge> edges;
    for (Node u = 0; u < n; ++u)
        for (Node v = u + 1; v < n; ++v) edges.push_back({u, v});
    return make_graph(n, std::move(edges), label);
}

inline LabeledGraph cycle_graph(std::size_t n, Label label = 0) {
    std::vector<Edge> edges;
    for (Node u = 0; u < n; ++u) edges.push_back({u, static_cast<Node>((u + 1) % n)});
    return make_graph(n, std::move(edges), label);
}

inline LabeledGraph path_graph(std::size_t n, Label label = 0) {
    std::vector<Edge> edges;
    for (Node u = 0; u + 1 < n; ++u) edges.push_back({u, u + 1});
    return make_graph(n, std::move(edges), label);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("lsek_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

struct RegimePanel {
    std::size_t tickers = 40;
    std::size_t days = 400;
    std::size_t switch_day = 200;  // first day whose return is block-correlated
    std::size_t block = 20;
    double rho = 0.8;
    double volatility = 0.01;
};

/// Log-normal price paths. Daily returns are iid Gaussian before the switch;
/// from the switch on the first `block` tickers share a common factor with
/// pairwise return correlation `rho`.
inline PriceMatrix regime_switch_prices(const RegimePanel& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    PriceMatrix p;
    for (std::size_t t = 0; t < spec.tickers; ++t) p.tickers.push_back("T" + std::to_string(t));
    std::vector<double> log_price(spec.tickers, std::log(100.0));
    for (std::size_t d = 0; d < spec.days; ++d) {
        char date[16];
        std::snprintf(date, sizeof date, "day%04zu", d);
        p.dates.emplace_back(date);
        if (d > 0) {
            const double factor = z(rng);
            for (std::size_t t = 0; t < spec.tickers; ++t) {
                const double own = z(rng);
                const bool linked = d >= spec.switch_day && t < spec.block;
                const double r = linked ? std::sqrt(spec.rho) * factor + std::sqrt(1.0 - spec.rho) * own : own;
                log_price[t] += spec.volatility * r;
            }
        }
        std::vector<double> row;
        for (double l : log_price) row.push_back(std::exp(l));
        p.prices.push_back(std::move(row));
    }
    return p;
}

inline std::string to_csv(const PriceMatrix& p) {
    std::string out = "date";
    for (const auto& t : p.tickers) out += "," + t;
    out += "\n";
    char cell[32];
    for (std::size_t d = 0; d < p.days(); ++d) {
        out += p.dates[d];
        for (double v : p.prices[d]) {
            std::snprintf(cell, sizeof cell, ",%.17g", v);
            out += cell;
        }
        out += "\n";
    }
    return out;
}

}  // namespace lsek::testing
