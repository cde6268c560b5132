#pragma once

#include <vector>

#include "census.hpp"
#include "embedding.hpp"
#include "parallel.hpp"
#include "tudataset.hpp"

namespace lsek {

/// Census of every graph in the dataset, in dataset order.
inline std::vector<CensusTable> census_all(const GraphDataset& dataset, const TopologyMask& mask = TopologyMask::all(),
                                           std::size_t jobs = 0) {
    std::vector<CensusTable> tables(dataset.size());
    const Label labels = std::max<Label>(1, dataset.label_count());
    parallel_for(dataset.size(), jobs,
                 [&](std::size_t i) { tables[i] = count_labeled(dataset.graphs[i], mask, labels); });
    return tables;
}

/// Entropy embeddings from precomputed census tables; optionally
/// standardized across the collection.
inline std::vector<EntropyEmbedding> embed_all(const std::vector<CensusTable>& tables,
                                               const EmbeddingOptions& options = {}, bool standardized = false) {
    options.params.validate();
    const double epsilon = edge_integral(options.params, options.mode);
    std::vector<EntropyEmbedding> out;
    out.reserve(tables.size());
    for (const auto& t : tables) out.push_back(embed_census(t, options, epsilon));
    if (standardized) standardize(out);
    return out;
}

inline std::vector<EntropyEmbedding> embed_all(const GraphDataset& dataset, const TopologyMask& mask = TopologyMask::all(),
                                               const EmbeddingOptions& options = {}, bool standardized = false,
                                               std::size_t jobs = 0) {
    return embed_all(census_all(dataset, mask, jobs), options, standardized);
}

}  // namespace lsek
