#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "porosity/cart.h"
#include "porosity/dataset.h"
#include "porosity/forest.h"
#include "porosity/table.h"

namespace porosity {

struct BoostParams {
  int n_trees = 100;
  double learning_rate = 0.1;
  int max_splits = 10;
  int min_leaf = 5;
  // Enforce the tuning ranges (trees [10, 500], rate [0.001, 1], splits
  // [1, 20], leaf [1, 90]). When false only structural validity is checked.
  bool enforce_search_ranges = true;

  void validate() const;
};

class BoostedModel {
 public:
  BoostedModel() = default;
  BoostedModel(std::vector<RegressionTree> trees, BoostParams params, std::uint64_t seed);

  // sum_b learning_rate * tree_b(x), starting from zero.
  double predict(std::span<const double> x) const;
  double predict(const MixRecord& record) const { return predict(to_features(record)); }
  // Prediction after each of the first 1..B trees.
  std::vector<double> staged_predict(std::span<const double> x) const;

  const std::vector<RegressionTree>& trees() const { return trees_; }
  const BoostParams& params() const { return params_; }
  double learning_rate() const { return params_.learning_rate; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::vector<RegressionTree> trees_;
  BoostParams params_;
  std::uint64_t seed_ = 0;
};

struct BoostingFitTrace {
  std::vector<double> fitted;             // final fitted values per training row
  std::vector<double> train_rss;          // training RSS after each round
};

// Least-squares boosting with a zero initial function: each round fits a
// depth-capped tree (all predictors) to the residuals and adds it with
// shrinkage `learning_rate`.
BoostedModel fit_lsboost(const Table& train, const BoostParams& params, std::uint64_t seed,
                         BoostingFitTrace* trace = nullptr);

// Training, k-fold CV and optional test MSE after each boosting round.
std::vector<TracePoint> boosting_error_trace(const Table& train, const BoostParams& params, int k,
                                             std::uint64_t seed, const Table* test = nullptr);

}  // namespace porosity
