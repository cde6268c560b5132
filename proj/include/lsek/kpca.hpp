#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "kernel.hpp"

namespace lsek {

struct KpcaResult {
    Eigen::MatrixXd coordinates;           // n x k
    std::vector<double> eigenvalues;       // all n, descending, clamped at 0
    std::vector<double> explained_ratio;   // first k, eigenvalue / trace
    std::vector<std::string> graph_ids;
};

/// Kernel PCA: center, eigendecompose, keep the leading k eigenpairs.
///
/// Eigenvalues below n * machine epsilon * largest are treated as 0.
/// Each eigenvector is flipped so its largest-magnitude entry is positive
/// (the first such entry on ties); equal eigenvalues keep solver order.
inline KpcaResult kpca(const Eigen::MatrixXd& gram, std::size_t k) {
    const auto n = static_cast<std::size_t>(gram.rows());
    if (k > n) throw ContractError("kpca: " + std::to_string(k) + " components requested for " + std::to_string(n) + " graphs");
    KpcaResult out;
    out.coordinates = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    if (n == 0) return out;

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(center(gram));
    const Eigen::VectorXd& ev = solver.eigenvalues();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ev(static_cast<Eigen::Index>(a)) > ev(static_cast<Eigen::Index>(b));
    });
    const double top = std::max(0.0, ev(static_cast<Eigen::Index>(order.front())));
    const double floor = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * top;
    double trace = 0.0;
    for (std::size_t i : order) {
        const double lambda = ev(static_cast<Eigen::Index>(i));
        out.eigenvalues.push_back(lambda > floor ? lambda : 0.0);
        trace += out.eigenvalues.back();
    }
    for (std::size_t c = 0; c < k; ++c) {
        const double lambda = out.eigenvalues[c];
        out.explained_ratio.push_back(trace > 0.0 ? lambda / trace : 0.0);
        if (lambda == 0.0) continue;
        Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(order[c]));
        Eigen::Index arg = 0;
        for (Eigen::Index i = 1; i < v.size(); ++i)
            if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
        if (v(arg) < 0.0) v = -v;
        out.coordinates.col(static_cast<Eigen::Index>(c)) = v * std::sqrt(lambda);
    }
    return out;
}

inline KpcaResult kpca(const GramMatrix& gram, std::size_t k) {
    KpcaResult out = kpca(gram.values, k);
    out.graph_ids = gram.graph_ids;
    return out;
}

}  // namespace lsek
