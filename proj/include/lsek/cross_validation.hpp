#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "kernel.hpp"
#include "log.hpp"
#include "parallel.hpp"
#include "svm.hpp"

namespace lsek {

struct CvOptions {
    std::size_t folds = 10;
    std::vector<double> c_grid{0.01, 0.1, 1.0, 10.0, 100.0};
    std::uint64_t seed = 42;
    std::size_t inner_folds = 3;
    double tol = 1e-3;
    std::size_t jobs = 0;
};

struct CvReport {
    std::vector<double> fold_accuracies;
    std::vector<double> fold_C;  // C picked by the inner search in each fold
    double mean = 0.0;
    double std_error = 0.0;
    double C = 0.0;  // most frequently picked C, smaller grid index on ties
    std::uint64_t seed = 0;
};

/// Test folds of a stratified k-fold split. Each class is shuffled with a
/// seeded generator and dealt round-robin, continuing the deal position
/// across classes so fold sizes differ by at most one.
inline std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<long long>& labels, std::size_t k,
                                                              std::uint64_t seed) {
    if (k < 2) throw ContractError("cross-validation needs at least 2 folds");
    std::map<long long, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    for (const auto& [cls, members] : by_class) {
        if (members.size() < k)
            throw StratificationError("class " + std::to_string(cls) + " has " + std::to_string(members.size()) +
                                      " members, fewer than " + std::to_string(k) + " folds");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t deal = 0;
    for (auto& [cls, members] : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t i : members) folds[deal++ % k].push_back(i);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

namespace detail {

inline std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& excluded) {
    std::vector<bool> skip(n, false);
    for (std::size_t i : excluded) skip[i] = true;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (!skip[i]) out.push_back(i);
    return out;
}

inline std::vector<long long> pick(const std::vector<long long>& labels, const std::vector<std::size_t>& index) {
    std::vector<long long> out;
    out.reserve(index.size());
    for (std::size_t i : index) out.push_back(labels[i]);
    return out;
}

/// Accuracy of a classifier trained on `train` and scored on `test`.
inline double holdout_accuracy(const Eigen::MatrixXd& gram, const std::vector<long long>& labels,
                               const std::vector<std::size_t>& train, const std::vector<std::size_t>& test,
                               const SvmOptions& options) {
    const Classifier model = fit_classifier(submatrix(gram, train, train), pick(labels, train), options);
    const Eigen::MatrixXd cross = submatrix(gram, test, train);
    std::size_t correct = 0;
    for (std::size_t t = 0; t < test.size(); ++t)
        correct += model.predict(cross.row(static_cast<Eigen::Index>(t)).transpose()) == labels[test[t]];
    return test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace detail

/// Grid index of the best inner-CV C for the rows `train`; earlier entries
/// win ties. A C whose inner fits do not converge is skipped with a warning;
/// ConvergenceError only if no grid entry converges.
inline std::size_t select_c(const Eigen::MatrixXd& gram, const std::vector<long long>& labels,
                            const std::vector<std::size_t>& train, const CvOptions& options, std::uint64_t seed) {
    if (options.c_grid.empty()) throw ContractError("empty C grid");
    if (options.c_grid.size() == 1) return 0;
    const auto inner = stratified_folds(detail::pick(labels, train), options.inner_folds, seed);
    std::size_t best = 0;
    double best_accuracy = -1.0;
    for (std::size_t c = 0; c < options.c_grid.size(); ++c) {
        double sum = 0.0;
        try {
            for (const auto& fold : inner) {
                std::vector<std::size_t> inner_test, inner_train;
                for (std::size_t i : fold) inner_test.push_back(train[i]);
                for (std::size_t i : detail::complement(train.size(), fold)) inner_train.push_back(train[i]);
                sum += detail::holdout_accuracy(gram, labels, inner_train, inner_test,
                                                {options.c_grid[c], options.tol});
            }
        } catch (const ConvergenceError& e) {
            std::ostringstream msg;
            msg << "inner C selection: C=" << options.c_grid[c] << " skipped, " << e.what();
            log::warn(msg.str());
            continue;
        }
        const double accuracy = sum / static_cast<double>(inner.size());
        if (accuracy > best_accuracy) {
            best_accuracy = accuracy;
            best = c;
        }
    }
    if (best_accuracy < 0.0) throw ConvergenceError("svm: no C in the grid converged during inner selection");
    return best;
}

/// Stratified k-fold cross-validation with nested selection of C.
inline CvReport cross_validate(const Eigen::MatrixXd& gram, const std::vector<long long>& labels,
                               const CvOptions& options = {}) {
    const std::size_t n = labels.size();
    if (static_cast<std::size_t>(gram.rows()) != n)
        throw ContractError("cross-validation: gram has " + std::to_string(gram.rows()) + " rows for " +
                            std::to_string(n) + " labels");
    if (options.c_grid.empty()) throw ContractError("empty C grid");
    const auto folds = stratified_folds(labels, options.folds, options.seed);

    CvReport report;
    report.seed = options.seed;
    report.fold_accuracies.assign(folds.size(), 0.0);
    std::vector<std::size_t> picked(folds.size(), 0);
    parallel_for(folds.size(), options.jobs, [&](std::size_t f) {
        const auto train = detail::complement(n, folds[f]);
        const std::uint64_t inner = std::mt19937_64(options.seed + 0x9e3779b97f4a7c15ull * (f + 1))();
        picked[f] = select_c(gram, labels, train, options, inner);
        report.fold_accuracies[f] = detail::holdout_accuracy(gram, labels, train, folds[f],
                                                             {options.c_grid[picked[f]], options.tol});
    });

    const double k = static_cast<double>(folds.size());
    for (double a : report.fold_accuracies) report.mean += a;
    report.mean /= k;
    double ss = 0.0;
    for (double a : report.fold_accuracies) ss += (a - report.mean) * (a - report.mean);
    report.std_error = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);

    std::vector<std::size_t> votes(options.c_grid.size(), 0);
    for (std::size_t p : picked) {
        ++votes[p];
        report.fold_C.push_back(options.c_grid[p]);
    }
    report.C = options.c_grid[static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin())];
    return report;
}

/// `repeats` cross-validations with seeds seed, seed + 1, ...
inline std::vector<CvReport> repeated_cross_validate(const Eigen::MatrixXd& gram, const std::vector<long long>& labels,
                                                     CvOptions options, std::size_t repeats) {
    std::vector<CvReport> out;
    const std::uint64_t base = options.seed;
    for (std::size_t r = 0; r < repeats; ++r) {
        options.seed = base + r;
        out.push_back(cross_validate(gram, labels, options));
    }
    return out;
}

}  // namespace lsek
