#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "graph.hpp"

namespace lsek {

/// Normalized Laplacian I - D^{-1/2} A D^{-1/2}; rows and columns of
/// isolated nodes are zero.
inline Eigen::MatrixXd normalized_laplacian(const LabeledGraph& graph) {
    const auto n = static_cast<Eigen::Index>(graph.node_count);
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> degree(graph.node_count, 0.0);
    for (const Edge& e : graph.edges) {
        degree[e.u] += 1.0;
        degree[e.v] += 1.0;
    }
    for (Eigen::Index i = 0; i < n; ++i)
        if (degree[static_cast<std::size_t>(i)] > 0.0) lap(i, i) = 1.0;
    for (const Edge& e : graph.edges) {
        const double w = -1.0 / std::sqrt(degree[e.u] * degree[e.v]);
        lap(e.u, e.v) = w;
        lap(e.v, e.u) = w;
    }
    return lap;
}

/// Shannon entropy of the spectrum of L/|V|, with 0 ln 0 = 0.
inline double von_neumann_entropy(const LabeledGraph& graph) {
    if (graph.node_count == 0) return 0.0;
    const Eigen::MatrixXd scaled = normalized_laplacian(graph) / static_cast<double>(graph.node_count);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scaled, Eigen::EigenvaluesOnly);
    double entropy = 0.0;
    for (double lambda : solver.eigenvalues())
        if (lambda > 0.0) entropy -= lambda * std::log(lambda);
    return entropy;
}

}  // namespace lsek
