#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "porosity/cart.h"
#include "porosity/dataset.h"
#include "porosity/table.h"

namespace porosity {

struct ForestParams {
  int n_trees = 300;
  int min_leaf = 5;
  int features_per_split = 3;
  std::optional<int> max_splits;  // defaults to n - 1
  int num_threads = 1;            // results do not depend on this

  void validate(std::size_t num_features) const;
  TreeParams tree_params(std::size_t n, std::size_t num_features) const;
};

class ForestModel {
 public:
  ForestModel() = default;
  // `in_bag[b][i]` is how often training row i was drawn for tree b.
  ForestModel(std::vector<RegressionTree> trees, std::vector<std::vector<std::uint32_t>> in_bag,
              ForestParams params, std::uint64_t seed);

  // Unweighted mean of the tree predictions.
  double predict(std::span<const double> x) const;
  double predict(const MixRecord& record) const { return predict(to_features(record)); }

  const std::vector<RegressionTree>& trees() const { return trees_; }
  const std::vector<std::vector<std::uint32_t>>& in_bag() const { return in_bag_; }
  const ForestParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t training_size() const { return in_bag_.empty() ? 0 : in_bag_.front().size(); }
  bool is_out_of_bag(std::size_t tree, std::size_t row) const { return in_bag_[tree][row] == 0; }

 private:
  std::vector<RegressionTree> trees_;
  std::vector<std::vector<std::uint32_t>> in_bag_;
  ForestParams params_;
  std::uint64_t seed_ = 0;
};

// Bootstrap of size n drawn uniformly with replacement; returns in-bag counts.
std::vector<std::uint32_t> draw_bootstrap(std::size_t n, Rng& rng);

// Random forest: per-tree bootstrap plus a fresh random feature subset at
// every node. Tree b uses stream b of `seed` only, so the model does not
// depend on the thread count.
ForestModel fit_random_forest(const Table& train, const ForestParams& params, std::uint64_t seed);

// Plain bagging: same bootstraps as fit_random_forest, every feature
// considered at every split. `params.features_per_split` is recorded as p.
ForestModel fit_bagging(const Table& train, const ForestParams& params, std::uint64_t seed);

// Mean over the trees for which row i is out of bag; nullopt when it is in
// every bootstrap. Throws ParamError when `train` does not match the model.
std::vector<std::optional<double>> oob_predictions(const ForestModel& model, const Table& train);

// Mean over eligible rows of the squared error of the averaged OOB
// prediction. Throws NumericalError when no row is eligible.
double oob_mse(const ForestModel& model, const Table& train);

struct TracePoint {
  int n_trees = 0;
  double train_mse = 0.0;
  std::optional<double> validation_mse;  // OOB (forest) or k-fold CV (boosting)
  std::optional<double> test_mse;
};

// Errors of the sub-ensembles made of the first 1..B trees.
std::vector<TracePoint> forest_error_trace(const ForestModel& model, const Table& train,
                                           const Table* test = nullptr);

}  // namespace porosity
