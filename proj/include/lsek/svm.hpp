#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace lsek {

struct SvmOptions {
    double C = 1.0;
    double tol = 1e-3;
    std::size_t max_iterations = 1'000'000;
};

/// Binary C-SVM in dual form over a precomputed kernel.
struct SvmModel {
    std::vector<std::size_t> support_indices;  // rows of the training Gram
    std::vector<double> dual_coefs;            // alpha_i * y_i
    double bias = 0.0;
    double C = 1.0;
    std::size_t iterations = 0;

    /// Decision value for a kernel row against all training rows.
    double decision(const Eigen::VectorXd& kernel_row) const {
        double sum = bias;
        for (std::size_t s = 0; s < support_indices.size(); ++s)
            sum += dual_coefs[s] * kernel_row(static_cast<Eigen::Index>(support_indices[s]));
        return sum;
    }
};

/// Trains on `gram` (training rows only) with labels in {-1, +1}.
///
/// SMO: i is the maximal KKT violator, j its partner with the largest
/// second-order objective decrease. Stops once the KKT gap
/// max_{I_up} -y G - min_{I_low} -y G falls below tol.
inline SvmModel train_svm(const Eigen::MatrixXd& gram, const std::vector<int>& y, const SvmOptions& options = {}) {
    const std::size_t n = y.size();
    if (static_cast<std::size_t>(gram.rows()) != n || static_cast<std::size_t>(gram.cols()) != n)
        throw ContractError("svm: gram is " + std::to_string(gram.rows()) + "x" + std::to_string(gram.cols()) +
                            " for " + std::to_string(n) + " labels");
    bool pos = false, neg = false;
    for (int v : y) {
        if (v == 1) pos = true;
        else if (v == -1) neg = true;
        else throw ContractError("svm: labels must be -1 or +1");
    }
    if (!pos || !neg) throw ContractError("svm: training labels contain a single class");
    if (!(options.C > 0.0)) throw ContractError("svm: C must be positive");

    const double C = options.C;
    constexpr double tau = 1e-12;
    auto q = [&](std::size_t i, std::size_t j) {
        return static_cast<double>(y[i] * y[j]) * gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    };
    std::vector<double> alpha(n, 0.0), grad(n, -1.0);
    auto in_up = [&](std::size_t t) { return (y[t] == 1 && alpha[t] < C) || (y[t] == -1 && alpha[t] > 0.0); };
    auto in_low = [&](std::size_t t) { return (y[t] == 1 && alpha[t] > 0.0) || (y[t] == -1 && alpha[t] < C); };

    SvmModel model;
    model.C = C;
    double gap = std::numeric_limits<double>::infinity();
    std::size_t iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        double g_max = -std::numeric_limits<double>::infinity(), g_min = std::numeric_limits<double>::infinity();
        std::size_t i = n, j = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * grad[t];
            if (in_up(t) && v > g_max) {
                g_max = v;
                i = t;
            }
        }
        // j: the violating partner with the largest second-order decrease
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n && i < n; ++t) {
            if (!in_low(t)) continue;
            const double v = -y[t] * grad[t];
            g_min = std::min(g_min, v);
            const double b = g_max - v;
            if (b <= 0.0) continue;
            const auto ii = static_cast<Eigen::Index>(i), tt = static_cast<Eigen::Index>(t);
            double a = gram(ii, ii) + gram(tt, tt) - 2.0 * gram(ii, tt);
            if (a <= 0.0) a = tau;
            if (-(b * b) / a < best) {
                best = -(b * b) / a;
                j = t;
            }
        }
        gap = g_max - g_min;
        if (i == n || j == n || gap < options.tol) break;

        const double old_i = alpha[i], old_j = alpha[j];
        const double qij = q(i, j);
        if (y[i] != y[j]) {
            double quad = q(i, i) + q(j, j) + 2.0 * qij;
            if (quad <= 0.0) quad = tau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            double quad = q(i, i) + q(j, j) - 2.0 * qij;
            if (quad <= 0.0) quad = tau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) grad[t] += q(t, i) * di + q(t, j) * dj;
    }
    if (iter == options.max_iterations && !(gap < options.tol)) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "svm: no convergence after " << iter << " iterations (KKT gap " << gap << ", tol " << options.tol << ")";
        throw ConvergenceError(msg.str());
    }
    model.iterations = iter;

    // rho from free vectors, else the midpoint of the feasible interval
    double free_sum = 0.0, upper = std::numeric_limits<double>::infinity(), lower = -upper;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] > 0.0 && alpha[t] < C) {
            free_sum += yg;
            ++free_count;
        } else if ((alpha[t] >= C && y[t] == -1) || (alpha[t] <= 0.0 && y[t] == 1)) {
            upper = std::min(upper, yg);
        } else {
            lower = std::max(lower, yg);
        }
    }
    const double rho = free_count ? free_sum / static_cast<double>(free_count) : (upper + lower) / 2.0;
    model.bias = -rho;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            model.support_indices.push_back(t);
            model.dual_coefs.push_back(alpha[t] * y[t]);
        }
    }
    return model;
}

/// sign of the decision value, with sign(0) = +1.
inline int predict(const SvmModel& model, const Eigen::VectorXd& kernel_row, std::size_t training_size) {
    if (static_cast<std::size_t>(kernel_row.size()) != training_size)
        throw ContractError("svm: kernel row has " + std::to_string(kernel_row.size()) + " entries, model was trained on " +
                            std::to_string(training_size));
    return model.decision(kernel_row) >= 0.0 ? 1 : -1;
}

/// Largest KKT violation of a trained model on its own training Gram:
/// y f >= 1 at alpha = 0, y f <= 1 at alpha = C, y f = 1 in between.
inline double kkt_residual(const SvmModel& model, const Eigen::MatrixXd& gram, const std::vector<int>& y) {
    std::vector<double> alpha(y.size(), 0.0);
    for (std::size_t s = 0; s < model.support_indices.size(); ++s)
        alpha[model.support_indices[s]] = model.dual_coefs[s] * y[model.support_indices[s]];
    double worst = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double margin = y[t] * model.decision(gram.row(static_cast<Eigen::Index>(t)).transpose());
        double violation = 0.0;
        if (alpha[t] <= 0.0) violation = std::max(0.0, 1.0 - margin);
        else if (alpha[t] >= model.C) violation = std::max(0.0, margin - 1.0);
        else violation = std::abs(margin - 1.0);
        worst = std::max(worst, violation);
    }
    return worst;
}

/// Binary or one-vs-rest classifier over arbitrary integer class values.
struct Classifier {
    std::vector<long long> classes;  // sorted
    std::vector<SvmModel> models;    // one for two classes, else one per class
    std::size_t training_size = 0;

    long long predict(const Eigen::VectorXd& kernel_row) const {
        if (static_cast<std::size_t>(kernel_row.size()) != training_size)
            throw ContractError("classifier: kernel row has " + std::to_string(kernel_row.size()) +
                                " entries, expected " + std::to_string(training_size));
        if (classes.size() == 1) return classes.front();
        if (models.size() == 1) return models.front().decision(kernel_row) >= 0.0 ? classes[1] : classes[0];
        std::size_t best = 0;
        double best_value = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < models.size(); ++c) {
            const double v = models[c].decision(kernel_row);
            if (v > best_value) {
                best_value = v;
                best = c;
            }
        }
        return classes[best];
    }
};

/// Two classes map the larger value to +1. More classes train one-vs-rest
/// and predict the argmax decision value (earlier class on ties).
inline Classifier fit_classifier(const Eigen::MatrixXd& gram, const std::vector<long long>& labels,
                                 const SvmOptions& options = {}) {
    Classifier out;
    out.training_size = labels.size();
    out.classes = labels;
    std::sort(out.classes.begin(), out.classes.end());
    out.classes.erase(std::unique(out.classes.begin(), out.classes.end()), out.classes.end());
    if (out.classes.empty()) throw ContractError("classifier: no training rows");
    if (out.classes.size() == 1) return out;
    auto one_vs = [&](long long positive) {
        std::vector<int> y(labels.size());
        for (std::size_t t = 0; t < labels.size(); ++t) y[t] = labels[t] == positive ? 1 : -1;
        return train_svm(gram, y, options);
    };
    if (out.classes.size() == 2) {
        out.models.push_back(one_vs(out.classes[1]));
    } else {
        for (long long c : out.classes) out.models.push_back(one_vs(c));
    }
    return out;
}

}  // namespace lsek
