#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "embedding.hpp"
#include "error.hpp"
#include "parallel.hpp"

namespace lsek {

enum class KernelKind { linear, rbf, polynomial, sigmoid };

inline const char* to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::linear: return "linear";
        case KernelKind::rbf: return "rbf";
        case KernelKind::polynomial: return "polynomial";
        case KernelKind::sigmoid: return "sigmoid";
    }
    return "unknown";
}

inline KernelKind parse_kernel_kind(const std::string& text) {
    if (text == "linear") return KernelKind::linear;
    if (text == "rbf") return KernelKind::rbf;
    if (text == "polynomial" || text == "poly") return KernelKind::polynomial;
    if (text == "sigmoid") return KernelKind::sigmoid;
    throw ContractError("unknown kernel '" + text + "' (expected linear, rbf, polynomial or sigmoid)");
}

/// Base kernel applied to entropy embeddings.
///
/// gamma = 0 means "1 / embedding dimension" and is resolved by gram().
/// The sigmoid kernel is not positive semidefinite in general.
struct BaseKernelSpec {
    KernelKind kind = KernelKind::linear;
    double gamma = 0.0;
    int degree = 3;
    double coef0 = 0.0;
    double alpha = 1.0;

    void validate() const {
        if (kind == KernelKind::rbf && !(gamma >= 0.0)) throw ContractError("rbf kernel needs gamma > 0");
        if (kind == KernelKind::polynomial && degree < 1) throw ContractError("polynomial kernel needs degree >= 1");
    }

    /// Copy with the default gamma replaced for `dimension`-long inputs.
    BaseKernelSpec resolved(std::size_t dimension) const {
        BaseKernelSpec out = *this;
        if (out.kind == KernelKind::rbf && out.gamma == 0.0)
            out.gamma = dimension > 0 ? 1.0 / static_cast<double>(dimension) : 1.0;
        return out;
    }

    friend bool operator==(const BaseKernelSpec&, const BaseKernelSpec&) = default;
};

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
    return sum;
}

/// k(x, y) for an already resolved spec.
inline double evaluate(const BaseKernelSpec& spec, const std::vector<double>& x, const std::vector<double>& y) {
    switch (spec.kind) {
        case KernelKind::linear: return dot(x, y);
        case KernelKind::rbf: {
            double sq = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) sq += (x[i] - y[i]) * (x[i] - y[i]);
            return std::exp(-spec.gamma * sq);
        }
        case KernelKind::polynomial: return std::pow(dot(x, y) + spec.coef0, spec.degree);
        case KernelKind::sigmoid: return std::tanh(spec.alpha * dot(x, y) + spec.coef0);
    }
    return 0.0;
}

struct GramMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> graph_ids;
    BaseKernelSpec kernel_spec;
    std::uint64_t params_hash = 0;

    std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
};

/// Kernel matrix over plain feature rows. Only the upper triangle is
/// evaluated; the lower one is mirrored, so the result is exactly symmetric.
inline Eigen::MatrixXd kernel_matrix(const std::vector<std::vector<double>>& rows, const BaseKernelSpec& spec,
                                     std::size_t jobs = 0) {
    const std::size_t n = rows.size();
    for (const auto& r : rows)
        if (r.size() != rows.front().size()) throw ContractError("kernel rows differ in dimension");
    const BaseKernelSpec k = spec.resolved(n ? rows.front().size() : 0);
    k.validate();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    parallel_for(n, jobs, [&](std::size_t i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = evaluate(k, rows[i], rows[j]);
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    });
    return out;
}

/// Gram matrix k_SE(G_i, G_j) = k(S(G_i), S(G_j)).
inline GramMatrix gram(const std::vector<EntropyEmbedding>& embeddings, const BaseKernelSpec& spec,
                       std::size_t jobs = 0) {
    GramMatrix out;
    if (embeddings.empty()) {
        out.kernel_spec = spec;
        return out;
    }
    const auto& first = embeddings.front();
    std::vector<std::vector<double>> rows;
    rows.reserve(embeddings.size());
    for (const auto& e : embeddings) {
        if (e.dimension() != first.dimension())
            throw ContractError("embedding '" + e.graph_id + "' has dimension " + std::to_string(e.dimension()) +
                                ", expected " + std::to_string(first.dimension()));
        if (e.fingerprint() != first.fingerprint())
            throw ContractError("embedding '" + e.graph_id + "' was computed with different thermo parameters");
        rows.push_back(e.values);
        out.graph_ids.push_back(e.graph_id);
    }
    out.values = kernel_matrix(rows, spec, jobs);
    out.kernel_spec = spec.resolved(first.dimension());
    out.params_hash = first.fingerprint();
    return out;
}

/// Double centering K - 1K/n - K1/n + 1K1/n^2.
inline Eigen::MatrixXd center(const Eigen::MatrixXd& k) {
    const Eigen::Index n = k.rows();
    if (n == 0) return k;
    const Eigen::VectorXd col_mean = k.colwise().mean().transpose();
    const Eigen::VectorXd row_mean = k.rowwise().mean();
    const double grand = k.mean();
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = k(i, j) - row_mean(i) - col_mean(j) + grand;
    // re-symmetrize so that rounding cannot break exact symmetry
    return (out + out.transpose()) * 0.5;
}

inline GramMatrix center(const GramMatrix& gram) {
    GramMatrix out = gram;
    out.values = center(gram.values);
    return out;
}

struct SpectrumBounds {
    double min = 0.0;
    double max = 0.0;

    /// min >= -tolerance * max.
    bool psd(double tolerance = 1e-8) const { return min >= -tolerance * std::max(max, 0.0); }
};

inline SpectrumBounds spectrum_bounds(const Eigen::MatrixXd& k) {
    if (k.rows() == 0) return {};
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

/// Entries k(rows[i], cols[j]).
inline Eigen::MatrixXd submatrix(const Eigen::MatrixXd& k, const std::vector<std::size_t>& rows,
                                 const std::vector<std::size_t>& cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                k(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    return out;
}

}  // namespace lsek
