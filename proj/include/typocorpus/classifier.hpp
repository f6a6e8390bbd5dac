#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "typocorpus/corpus.hpp"

namespace typocorpus {

struct ClassifierWeights {
    double w_ppl = 0.0;
    double w_dist = 0.0;
    double w_num = 0.0;
    double bias = 0.0;

    bool operator==(const ClassifierWeights&) const = default;
};

struct LabeledExample {
    FeatureVector features;
    bool label = false;  // true = typo
};

struct TrainOptions {
    std::size_t max_iter = 10'000;
    double tol = 1e-8;
};

struct TrainReport {
    std::size_t iterations = 0;
    bool hit_max_iter = false;
    double final_loss = 0.0;
    double gradient_norm = 0.0;
    // Loss after every accepted step, starting with the loss at zero weights.
    std::vector<double> loss_history;
};

double sigmoid(double z);

/// σ(w·f + bias), kept within [2^-53, 1 - 2^-53].
double predict(const ClassifierWeights& w, const FeatureVector& f);

/// Mean negative log-likelihood of the data.
double log_loss(const ClassifierWeights& w, const std::vector<LabeledExample>& data);

/// Analytic gradient of log_loss as {w_ppl, w_dist, w_num, bias}.
std::array<double, 4> log_loss_gradient(const ClassifierWeights& w, const std::vector<LabeledExample>& data);

/// Unregularized maximum likelihood from zero weights. Each step searches
/// along the Newton direction (the steepest-descent direction when the
/// Hessian is not safely positive definite) with Armijo backtracking, and
/// training stops once the loss improves by less than tol or after max_iter
/// steps. Throws DataError for fewer than 10 examples, a single class, or a
/// non-finite loss.
ClassifierWeights train(const std::vector<LabeledExample>& data, const TrainOptions& opts = {},
                        TrainReport* report = nullptr);

struct PrfScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

using Predictor = std::function<bool(const FeatureVector&)>;
using Trainer = std::function<Predictor(const std::vector<LabeledExample>&)>;

/// Stratified assignment of example indices to k folds after a seeded
/// shuffle. Each index appears in exactly one fold.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<LabeledExample>& data, std::size_t k,
                                                       std::uint64_t seed);

/// Trains on all folds but one, scores the held-out fold for the typo class
/// and averages precision, recall and F1 over folds.
PrfScores evaluate_folds(const std::vector<LabeledExample>& data, const std::vector<std::vector<std::size_t>>& folds,
                         const Trainer& trainer);

inline constexpr std::uint64_t kDefaultSeed = 20200511;

/// k-fold cross-validation of the logistic classifier. A fold whose training
/// part holds a single class triggers one retry with a derived seed, then a
/// DataError.
PrfScores cross_validate(const std::vector<LabeledExample>& data, std::size_t k = 10,
                         std::uint64_t seed = kDefaultSeed, const TrainOptions& opts = {});

struct WeightsFile {
    ClassifierWeights weights;
    std::string trained_on;
    std::uint64_t seed = kDefaultSeed;
};

void save_weights(const WeightsFile& w, const std::filesystem::path& file);
WeightsFile load_weights(const std::filesystem::path& file);

struct LabelStats {
    std::size_t edits = 0;
    std::size_t labeled = 0;
    std::size_t unlabeled = 0;
};

/// Sets prob_typo and is_typo (prob >= 0.5) on every edit that carries
/// features (or perplexities to rebuild them from); other edits are left as
/// they are and counted.
void label_record(CommitRecord& rec, const ClassifierWeights& w, LabelStats* stats = nullptr);

}  // namespace typocorpus
