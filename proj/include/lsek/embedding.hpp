#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "census.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "thermo.hpp"

namespace lsek {

struct EmbeddingOptions {
    ThermoParams params;
    EntropyMode mode = EntropyMode::closed;
    StirlingMode stirling = StirlingMode::leading;

    std::uint64_t fingerprint() const { return lsek::fingerprint(params, mode, stirling); }
};

/// Per-(topology, label) entropies of one graph, topology-major.
struct EntropyEmbedding {
    std::string graph_id;
    Label label_count = 0;
    std::vector<double> values;
    EmbeddingOptions options;

    double at(int type_id, Label label) const {
        return values[static_cast<std::size_t>(type_id - 1) * label_count + label];
    }
    std::size_t dimension() const { return values.size(); }
    std::uint64_t fingerprint() const { return options.fingerprint(); }
};

/// Embeds an already-counted graph with a precomputed edge integral.
inline EntropyEmbedding embed_census(const CensusTable& census, const EmbeddingOptions& options, double epsilon) {
    EntropyEmbedding out{census.graph_id, census.label_count,
                         std::vector<double>(kTopologyCount * census.label_count, 0.0), options};
    const double radial = options.params.radial_offset();
    for (const auto& entry : catalog()) {
        for (Label l = 0; l < census.label_count; ++l) {
            out.values[static_cast<std::size_t>(entry.type_id - 1) * census.label_count + l] =
                graphlet_entropy(census.at(entry.type_id, l), entry.nodes, entry.edge_count(), epsilon,
                                 options.params.beta, radial, options.stirling);
        }
    }
    return out;
}

/// Entropy embedding of `graph` from its census.
inline EntropyEmbedding embed(const LabeledGraph& graph, const CensusTable& census,
                              const EmbeddingOptions& options = {}) {
    if (census.graph_id != graph.id)
        throw ContractError("census '" + census.graph_id + "' does not belong to graph '" + graph.id + "'");
    options.params.validate();
    return embed_census(census, options, edge_integral(options.params, options.mode));
}

/// Rescales every coordinate to zero mean and unit variance across the
/// collection. Constant coordinates become 0.
inline void standardize(std::vector<EntropyEmbedding>& embeddings) {
    if (embeddings.empty()) return;
    const std::size_t dim = embeddings.front().dimension();
    const double n = static_cast<double>(embeddings.size());
    for (std::size_t j = 0; j < dim; ++j) {
        double mean = 0.0;
        for (const auto& e : embeddings) mean += e.values[j];
        mean /= n;
        double var = 0.0;
        for (const auto& e : embeddings) var += (e.values[j] - mean) * (e.values[j] - mean);
        const double sd = std::sqrt(var / n);
        for (auto& e : embeddings) e.values[j] = sd > 0.0 ? (e.values[j] - mean) / sd : 0.0;
    }
}

}  // namespace lsek
