#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "lsek/census.hpp"
#include "lsek/cross_validation.hpp"
#include "lsek/embedding.hpp"
#include "lsek/kernel.hpp"
#include "lsek/svm.hpp"
#include "lsek/tudataset.hpp"
#include "support.hpp"

using namespace lsek;

namespace {

struct Mutag {
    Eigen::MatrixXd linear;
    std::vector<long long> labels;
};

const Mutag& mutag() {
    static const Mutag data = [] {
        auto ds = parse_tudataset(lsek::testing::mutag_dir());
        std::vector<EntropyEmbedding> es;
        for (const auto& g : ds.graphs) es.push_back(embed(g, count_labeled(g, TopologyMask::all(), ds.label_count())));
        standardize(es);
        return Mutag{gram(es, {}).values, ds.class_labels};
    }();
    return data;
}

double training_accuracy(const SvmModel& m, const Eigen::MatrixXd& k, const std::vector<int>& y) {
    std::size_t ok = 0;
    for (std::size_t t = 0; t < y.size(); ++t) ok += predict(m, k.row(static_cast<Eigen::Index>(t)).transpose(), y.size()) == y[t];
    return static_cast<double>(ok) / static_cast<double>(y.size());
}

void expect_dual_feasible(const SvmModel& m, const Eigen::MatrixXd& k, const std::vector<int>& y, double tol) {
    double balance = 0.0;
    for (double c : m.dual_coefs) {
        EXPECT_LE(std::abs(c), m.C + 1e-12);
        balance += c;
    }
    EXPECT_NEAR(balance, 0.0, 1e-6);
    EXPECT_LE(kkt_residual(m, k, y), tol + 1e-9);
}

Eigen::MatrixXd linear_gram(const std::vector<std::vector<double>>& pts) { return kernel_matrix(pts, {}); }

}  // namespace

TEST(Svm, TwoPointProblem) {
    Eigen::MatrixXd k = Eigen::MatrixXd::Identity(2, 2) * 4.0 + Eigen::MatrixXd::Ones(2, 2);
    std::vector<int> y{1, -1};
    auto m = train_svm(k, y);
    EXPECT_EQ(training_accuracy(m, k, y), 1.0);
    expect_dual_feasible(m, k, y, 1e-3);
}

TEST(Svm, XorIsNotLinearlySeparable) {
    std::vector<std::vector<double>> pts{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    std::vector<int> y{1, 1, -1, -1};
    auto k = linear_gram(pts);
    for (double c : {0.1, 1.0, 100.0}) {
        auto m = train_svm(k, y, {c});
        EXPECT_LE(training_accuracy(m, k, y), 0.75);
        expect_dual_feasible(m, k, y, 1e-3);
    }
}

TEST(Svm, SeparableGaussianCloud) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    std::vector<std::vector<double>> pts;
    std::vector<int> y;
    for (int i = 0; i < 60; ++i) {
        const int label = i % 2 ? 1 : -1;
        pts.push_back({z(rng) + 4.0 * label, z(rng)});
        y.push_back(label);
    }
    auto k = linear_gram(pts);
    for (double c : {0.01, 1.0, 100.0}) {
        auto m = train_svm(k, y, {c});
        expect_dual_feasible(m, k, y, 1e-3);
        if (c >= 1.0) {
            EXPECT_EQ(training_accuracy(m, k, y), 1.0);
        }
    }
}

TEST(Svm, FreeSupportVectorPredictsItsOwnLabel) {
    std::vector<std::vector<double>> pts{{-2, 0}, {-1, 0.5}, {1, -0.5}, {2, 0}, {-1.5, -1}, {1.5, 1}};
    std::vector<int> y{-1, -1, 1, 1, -1, 1};
    auto k = linear_gram(pts);
    auto m = train_svm(k, y, {10.0});
    std::size_t free = 0;
    for (std::size_t s = 0; s < m.support_indices.size(); ++s) {
        if (std::abs(m.dual_coefs[s]) < m.C) {
            ++free;
            const std::size_t i = m.support_indices[s];
            EXPECT_EQ(predict(m, k.row(static_cast<Eigen::Index>(i)).transpose(), y.size()), y[i]);
        }
    }
    EXPECT_GT(free, 0u);
}

TEST(Svm, PredictTieAndErrors) {
    SvmModel m;
    m.support_indices = {0, 1};
    m.dual_coefs = {1.0, -1.0};
    m.bias = 0.5;
    EXPECT_EQ(predict(m, Eigen::VectorXd::Zero(2), 2), 1);
    m.bias = 0.0;
    EXPECT_EQ(predict(m, Eigen::VectorXd::Zero(2), 2), 1);
    m.bias = -0.5;
    EXPECT_EQ(predict(m, Eigen::VectorXd::Zero(2), 2), -1);
    EXPECT_THROW(predict(m, Eigen::VectorXd::Zero(3), 2), ContractError);
}

TEST(Svm, TrainingErrors) {
    Eigen::MatrixXd k = Eigen::MatrixXd::Identity(3, 3);
    EXPECT_THROW(train_svm(k, {1, 1, 1}), ContractError);
    EXPECT_THROW(train_svm(k, {1, -1}), ContractError);
    EXPECT_THROW(train_svm(k, {1, -1, 2}), ContractError);
    SvmOptions capped;
    capped.max_iterations = 1;
    std::vector<std::vector<double>> pts{{0, 0}, {1, 1}, {0, 1}, {1, 0}, {0.5, 0.2}};
    try {
        train_svm(linear_gram(pts), {1, 1, -1, -1, 1}, capped);
        FAIL();
    } catch (const ConvergenceError& e) {
        EXPECT_NE(std::string(e.what()).find("KKT gap"), std::string::npos);
    }
}

TEST(Svm, MutagTrainingBeatsMajority) {
    const auto& d = mutag();
    std::vector<int> y;
    for (long long c : d.labels) y.push_back(c == 1 ? 1 : -1);
    auto m = train_svm(d.linear, y, {1.0});
    expect_dual_feasible(m, d.linear, y, 1e-3);
    EXPECT_GT(training_accuracy(m, d.linear, y), 125.0 / 188.0);
}

TEST(Classifier, OneVsRestOnThreeBlocks) {
    std::vector<long long> labels{5, 5, 5, 7, 7, 7, 9, 9, 9};
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(9, 9);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j)
            if (labels[i] == labels[j]) k(i, j) = 1.0;
    auto c = fit_classifier(k, labels);
    EXPECT_EQ(c.models.size(), 3u);
    for (int i = 0; i < 9; ++i) EXPECT_EQ(c.predict(k.row(i).transpose()), labels[i]);
}

TEST(Folds, PartitionAndStratification) {
    const auto& labels = mutag().labels;
    auto folds = stratified_folds(labels, 10, 42);
    std::vector<int> seen(labels.size(), 0);
    for (const auto& f : folds) {
        std::size_t pos = 0;
        for (std::size_t i : f) {
            ++seen[i];
            pos += labels[i] == 1;
        }
        EXPECT_GE(pos, 12u);
        EXPECT_LE(pos, 13u);
        EXPECT_GE(f.size(), 18u);
        EXPECT_LE(f.size(), 19u);
    }
    for (int s : seen) EXPECT_EQ(s, 1);
    EXPECT_EQ(folds, stratified_folds(labels, 10, 42));
    EXPECT_NE(folds, stratified_folds(labels, 10, 43));
}

TEST(Folds, Errors) {
    EXPECT_THROW(stratified_folds({1, 1, 1, -1, -1}, 3, 0), StratificationError);
    EXPECT_THROW(stratified_folds({1, -1}, 1, 0), ContractError);
}

TEST(CrossValidation, BlockDiagonalGramIsPerfect) {
    std::vector<long long> labels;
    for (int i = 0; i < 40; ++i) labels.push_back(i % 3 == 0 ? -1 : 1);
    Eigen::MatrixXd k(40, 40);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j) k(i, j) = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
    CvOptions options;
    options.folds = 5;
    auto r = cross_validate(k, labels, options);
    EXPECT_EQ(r.mean, 1.0);
    EXPECT_EQ(r.fold_accuracies.size(), 5u);
}

TEST(CrossValidation, StructurelessGramStaysNearMajority) {
    std::vector<long long> labels;
    for (int i = 0; i < 90; ++i) labels.push_back(i < 60 ? 1 : 0);
    std::shuffle(labels.begin(), labels.end(), std::mt19937_64(11));
    auto r = cross_validate(Eigen::MatrixXd::Identity(90, 90), labels);
    EXPECT_LE(std::abs(r.mean - 60.0 / 90.0), 3.0 * std::max(r.std_error, 1e-3));
}

TEST(CrossValidation, ReportArithmeticAndReproducibility) {
    const auto& d = mutag();
    CvOptions options;
    options.c_grid = {1.0};
    auto a = cross_validate(d.linear, d.labels, options);
    options.jobs = 1;
    auto b = cross_validate(d.linear, d.labels, options);
    EXPECT_EQ(a.fold_accuracies, b.fold_accuracies);
    double mean = std::accumulate(a.fold_accuracies.begin(), a.fold_accuracies.end(), 0.0) / 10.0;
    double ss = 0.0;
    for (double x : a.fold_accuracies) ss += (x - mean) * (x - mean);
    EXPECT_DOUBLE_EQ(a.mean, mean);
    EXPECT_DOUBLE_EQ(a.std_error, std::sqrt(ss / 9.0) / std::sqrt(10.0));
    EXPECT_EQ(a.C, 1.0);
    EXPECT_EQ(a.seed, 42u);

    // held-out accuracy of fold 0, recomputed by hand
    auto folds = stratified_folds(d.labels, 10, 42);
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < d.labels.size(); ++i)
        if (!std::binary_search(folds[0].begin(), folds[0].end(), i)) train.push_back(i);
    std::vector<long long> train_labels;
    for (std::size_t i : train) train_labels.push_back(d.labels[i]);
    auto model = fit_classifier(submatrix(d.linear, train, train), train_labels, {1.0});
    std::size_t ok = 0;
    for (std::size_t i : folds[0]) ok += model.predict(submatrix(d.linear, {i}, train).row(0).transpose()) == d.labels[i];
    EXPECT_DOUBLE_EQ(a.fold_accuracies[0], static_cast<double>(ok) / static_cast<double>(folds[0].size()));
}

TEST(CrossValidation, MutagSanityBand) {
    const auto& d = mutag();
    auto r = cross_validate(d.linear, d.labels);
    EXPECT_GE(r.mean, 0.80);
    EXPECT_EQ(r.fold_C.size(), 10u);
}
