#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "catalog.hpp"
#include "census.hpp"
#include "embedding.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "log.hpp"
#include "parallel.hpp"
#include "tudataset.hpp"
#include "von_neumann.hpp"

namespace lsek {

enum class FillPolicy { reject, forward_fill };

inline const char* to_string(FillPolicy p) { return p == FillPolicy::reject ? "reject" : "forward_fill"; }

/// Daily closing prices, days x tickers, no gaps.
struct PriceMatrix {
    std::vector<std::string> tickers;
    std::vector<std::string> dates;
    std::vector<std::vector<double>> prices;  // prices[day][ticker]

    std::size_t days() const { return dates.size(); }
    std::size_t ticker_count() const { return tickers.size(); }
};

namespace finnet_detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> cells;
    for (;;) {
        auto comma = line.find(',');
        cells.push_back(detail::trim(line.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    return cells;
}

inline bool is_gap(std::string_view cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "null";
}

}  // namespace finnet_detail

/// Parses a price CSV: header `date,<ticker>...`, then one row per day.
/// Empty and NA cells are gaps; forward_fill copies the previous day's price
/// into them, reject refuses them. A gap on the first day is always an error.
inline PriceMatrix parse_prices(std::istream& in, FillPolicy policy, const std::string& source = "prices") {
    PriceMatrix out;
    std::string line;
    std::size_t line_no = 0;
    auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) break;
    }
    if (detail::trim(line).empty()) throw FormatError(source + ": empty price file");
    auto header = finnet_detail::split_csv(line);
    if (header.size() < 2) throw FormatError(where() + "header needs a date column and at least one ticker");
    for (std::size_t c = 1; c < header.size(); ++c) out.tickers.emplace_back(header[c]);

    std::set<std::string> seen_dates;
    std::vector<bool> has_value(out.tickers.size(), false);
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto cells = finnet_detail::split_csv(line);
        if (cells.size() != header.size())
            throw FormatError(where() + "expected " + std::to_string(header.size()) + " cells, found " +
                              std::to_string(cells.size()));
        std::string date(cells[0]);
        if (date.empty()) throw FormatError(where() + "empty date");
        if (!seen_dates.insert(date).second) throw FormatError(where() + "duplicate date " + date);
        std::vector<double> row(out.tickers.size());
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const std::size_t t = c - 1;
            if (finnet_detail::is_gap(cells[c])) {
                if (policy == FillPolicy::reject)
                    throw FormatError(where() + "missing price for " + out.tickers[t] + " under reject policy");
                if (!has_value[t]) throw FormatError(where() + "leading gap for " + out.tickers[t]);
                row[t] = out.prices.back()[t];
                continue;
            }
            double value = 0.0;
            auto [end, ec] = std::from_chars(cells[c].data(), cells[c].data() + cells[c].size(), value);
            if (ec != std::errc() || end != cells[c].data() + cells[c].size())
                throw FormatError(where() + "non-numeric cell '" + std::string(cells[c]) + "'");
            if (!(value > 0.0) || !std::isfinite(value))
                throw FormatError(where() + "price must be positive, got " + std::string(cells[c]));
            row[t] = value;
            has_value[t] = true;
        }
        out.dates.push_back(std::move(date));
        out.prices.push_back(std::move(row));
    }
    if (out.prices.empty()) throw FormatError(source + ": no price rows");
    return out;
}

inline PriceMatrix ingest_prices(const std::filesystem::path& path, FillPolicy policy = FillPolicy::reject) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path.string());
    return parse_prices(in, policy, path.string());
}

/// How a window is placed relative to the day it is reported under.
/// inclusive: days t-w+1..t, giving days - w + 1 windows.
/// preceding: the w days before t, giving days - w windows.
enum class WindowAlignment { inclusive, preceding };

inline const char* to_string(WindowAlignment a) { return a == WindowAlignment::inclusive ? "inclusive" : "preceding"; }

enum class NodeLabeling { uniform, degree_terciles };

inline const char* to_string(NodeLabeling l) { return l == NodeLabeling::uniform ? "uniform" : "degree_terciles"; }

struct WindowOptions {
    std::size_t window = 28;
    double quantile = 0.05;
    bool returns = false;  // correlate daily log returns instead of prices
    WindowAlignment alignment = WindowAlignment::inclusive;
    NodeLabeling labeling = NodeLabeling::uniform;
    std::size_t jobs = 0;
};

/// Number of windows over `days` days of prices. Returns consume one day.
inline std::size_t window_count(std::size_t days, std::size_t window, WindowAlignment alignment,
                                bool returns = false) {
    const std::size_t span = window + (alignment == WindowAlignment::preceding ? 1 : 0) + (returns ? 1 : 0);
    return days >= span ? days - span + 1 : 0;
}

struct WindowNetworkSeries {
    std::size_t window_size = 0;
    double threshold_quantile = 0.0;
    std::vector<LabeledGraph> graphs;
    std::vector<std::string> window_end_dates;
};

/// Pearson correlations of the columns of `rows` (observations x series).
/// A zero-variance column correlates 0 with everything.
inline std::vector<std::vector<double>> correlation_matrix(const std::vector<std::vector<double>>& rows,
                                                           std::vector<bool>* constant = nullptr) {
    const std::size_t m = rows.size(), n = m ? rows.front().size() : 0;
    std::vector<std::vector<double>> z(n, std::vector<double>(m));
    if (constant) constant->assign(n, false);
    for (std::size_t c = 0; c < n; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < m; ++r) mean += rows[r][c];
        mean /= static_cast<double>(m);
        double ss = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            z[c][r] = rows[r][c] - mean;
            ss += z[c][r] * z[c][r];
        }
        const double norm = std::sqrt(ss);
        const bool flat = !(norm > 0.0) || norm <= 1e-12 * std::abs(mean) * std::sqrt(static_cast<double>(m));
        if (constant) (*constant)[c] = flat;
        for (double& v : z[c]) v = flat ? 0.0 : v / norm;
    }
    std::vector<std::vector<double>> rho(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            double s = 0.0;
            for (std::size_t r = 0; r < m; ++r) s += z[a][r] * z[b][r];
            rho[a][b] = rho[b][a] = std::clamp(s, -1.0, 1.0);
        }
    }
    return rho;
}

/// Thresholded network: with k = floor(q * n(n-1)/2), connects every pair
/// whose |rho| reaches the k-th largest value (ties all join). Pairs with
/// rho = 0 never connect.
inline std::vector<Edge> threshold_edges(const std::vector<std::vector<double>>& rho, double quantile) {
    const std::size_t n = rho.size();
    std::vector<double> magnitudes;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) magnitudes.push_back(std::abs(rho[a][b]));
    const auto k = static_cast<std::size_t>(std::floor(quantile * static_cast<double>(magnitudes.size())));
    std::vector<Edge> edges;
    if (k == 0) return edges;
    std::nth_element(magnitudes.begin(), magnitudes.begin() + static_cast<std::ptrdiff_t>(k - 1), magnitudes.end(),
                     std::greater<>());
    const double tau = magnitudes[k - 1];
    for (Node a = 0; a < n; ++a)
        for (Node b = a + 1; b < n; ++b)
            if (std::abs(rho[a][b]) >= tau && rho[a][b] != 0.0) edges.push_back({a, b});
    return edges;
}

/// Three labels by within-graph degree terciles.
inline std::vector<Label> degree_tercile_labels(std::size_t n, const std::vector<Edge>& edges) {
    std::vector<std::size_t> degree(n, 0);
    for (const Edge& e : edges) {
        ++degree[e.u];
        ++degree[e.v];
    }
    std::vector<std::size_t> sorted = degree;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Label> labels(n, 0);
    if (n == 0) return labels;
    const std::size_t low = sorted[(n - 1) / 3], high = sorted[2 * (n - 1) / 3];
    for (std::size_t i = 0; i < n; ++i) labels[i] = degree[i] <= low ? 0 : degree[i] <= high ? 1 : 2;
    return labels;
}

/// Sliding-window correlation networks, one per day step.
inline WindowNetworkSeries build_windows(const PriceMatrix& prices, const WindowOptions& options) {
    if (options.window < 3) throw ContractError("window must be at least 3 days");
    if (!(options.quantile > 0.0 && options.quantile < 1.0)) throw ContractError("quantile must lie in (0, 1)");
    const std::size_t count = window_count(prices.days(), options.window, options.alignment, options.returns);
    if (count == 0)
        throw ContractError("window of " + std::to_string(options.window) + " days does not fit " +
                            std::to_string(prices.days()) + " days of prices");

    // observation rows; with returns, row r is the log return into day r + 1
    std::vector<std::vector<double>> obs;
    if (options.returns) {
        for (std::size_t d = 1; d < prices.days(); ++d) {
            std::vector<double> r(prices.ticker_count());
            for (std::size_t t = 0; t < r.size(); ++t) r[t] = std::log(prices.prices[d][t] / prices.prices[d - 1][t]);
            obs.push_back(std::move(r));
        }
    } else {
        obs = prices.prices;
    }
    const std::size_t offset = options.returns ? 1 : 0;  // day index of obs[0]
    const std::size_t lag = options.alignment == WindowAlignment::preceding ? 1 : 0;

    WindowNetworkSeries series;
    series.window_size = options.window;
    series.threshold_quantile = options.quantile;
    series.graphs.resize(count);
    series.window_end_dates.resize(count);
    const std::size_t n = prices.ticker_count();
    parallel_for(count, options.jobs, [&](std::size_t w) {
        const std::vector<std::vector<double>> rows(obs.begin() + static_cast<std::ptrdiff_t>(w),
                                                    obs.begin() + static_cast<std::ptrdiff_t>(w + options.window));
        std::vector<bool> flat;
        const auto rho = correlation_matrix(rows, &flat);
        const std::size_t day = w + options.window - 1 + offset + lag;
        for (std::size_t t = 0; t < n; ++t)
            if (flat[t]) log::info("window ending " + prices.dates[day] + ": ticker " + prices.tickers[t] + " has zero variance");
        auto edges = threshold_edges(rho, options.quantile);
        auto labels = options.labeling == NodeLabeling::uniform ? std::vector<Label>(n, 0) : degree_tercile_labels(n, edges);
        series.graphs[w] = make_graph(n, std::move(edges), std::move(labels), prices.dates[day]);
        series.window_end_dates[w] = prices.dates[day];
    });
    return series;
}

/// Per-window entropies. `subgraph[i][w]` is the entropy of topology
/// type_ids[i] summed over labels.
struct EntropySeries {
    std::vector<std::string> dates;
    std::vector<int> type_ids;
    std::vector<std::vector<double>> subgraph;
    std::vector<double> von_neumann;

    /// Sum over all topologies, per window.
    std::vector<double> total() const {
        std::vector<double> out(dates.size(), 0.0);
        for (const auto& s : subgraph)
            for (std::size_t w = 0; w < s.size(); ++w) out[w] += s[w];
        return out;
    }
};

inline EntropySeries entropy_series(const WindowNetworkSeries& series, const TopologyMask& mask,
                                    const EmbeddingOptions& options = {}, std::size_t jobs = 0) {
    options.params.validate();
    const double epsilon = edge_integral(options.params, options.mode);
    EntropySeries out;
    out.dates = series.window_end_dates;
    out.type_ids = mask.ids();
    const std::size_t windows = series.graphs.size();
    out.subgraph.assign(out.type_ids.size(), std::vector<double>(windows, 0.0));
    out.von_neumann.assign(windows, 0.0);
    parallel_for(windows, jobs, [&](std::size_t w) {
        const auto& g = series.graphs[w];
        const Label labels = std::max<Label>(1, label_count_of(g));
        const auto embedding = embed_census(count_labeled(g, mask, labels), options, epsilon);
        for (std::size_t i = 0; i < out.type_ids.size(); ++i) {
            double sum = 0.0;
            for (Label l = 0; l < labels; ++l) sum += embedding.at(out.type_ids[i], l);
            out.subgraph[i][w] = sum;
        }
        out.von_neumann[w] = von_neumann_entropy(g);
    });
    return out;
}

/// Trailing z-score change detector. Index t is flagged when
/// |x_t - mean| > z * sd over x_{t-b}..x_{t-1} (sample sd). The first b
/// indices are never flagged, and neither is any t whose baseline is flat.
inline std::vector<bool> flag_changes(const std::vector<double>& values, double z_threshold,
                                      std::size_t baseline_window) {
    if (baseline_window < 5) throw ContractError("baseline window must be at least 5");
    std::vector<bool> flagged(values.size(), false);
    for (std::size_t t = baseline_window; t < values.size(); ++t) {
        double mean = 0.0;
        for (std::size_t i = t - baseline_window; i < t; ++i) mean += values[i];
        mean /= static_cast<double>(baseline_window);
        double ss = 0.0;
        for (std::size_t i = t - baseline_window; i < t; ++i) ss += (values[i] - mean) * (values[i] - mean);
        const double sd = std::sqrt(ss / static_cast<double>(baseline_window - 1));
        if (!(sd > 0.0)) {
            log::info("index " + std::to_string(t) + ": flat baseline, not tested");
            continue;
        }
        flagged[t] = std::abs(values[t] - mean) > z_threshold * sd;
    }
    return flagged;
}

}  // namespace lsek
