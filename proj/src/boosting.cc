#include "porosity/boosting.h"

#include <numeric>
#include <string>
#include <utility>

#include "porosity/cross_validation.h"
#include "porosity/errors.h"

namespace porosity {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ParamError(message);
}

TreeParams round_tree_params(const BoostParams& params, std::size_t num_features) {
  TreeParams tree;
  tree.max_splits = params.max_splits;
  tree.min_leaf = params.min_leaf;
  tree.features_per_split = static_cast<int>(num_features);
  return tree;
}

}  // namespace

void BoostParams::validate() const {
  if (enforce_search_ranges) {
    require(n_trees >= 10 && n_trees <= 500, "boosting n_trees must lie in [10, 500]");
    require(learning_rate >= 0.001 && learning_rate <= 1.0,
            "boosting learning_rate must lie in [0.001, 1]");
    require(max_splits >= 1 && max_splits <= 20, "boosting max_splits must lie in [1, 20]");
    require(min_leaf >= 1 && min_leaf <= 90, "boosting min_leaf must lie in [1, 90]");
  } else {
    require(n_trees >= 1, "boosting n_trees must be >= 1");
    require(learning_rate > 0.0 && learning_rate <= 1.0, "boosting learning_rate must lie in (0, 1]");
    require(max_splits >= 0, "boosting max_splits must be >= 0");
    require(min_leaf >= 1, "boosting min_leaf must be >= 1");
  }
}

BoostedModel::BoostedModel(std::vector<RegressionTree> trees, BoostParams params, std::uint64_t seed)
    : trees_(std::move(trees)), params_(params), seed_(seed) {
  if (trees_.empty()) throw ParamError("a boosted model needs at least one tree");
}

double BoostedModel::predict(std::span<const double> x) const {
  double f = 0.0;
  for (const auto& tree : trees_) f += params_.learning_rate * tree.predict(x);
  return f;
}

std::vector<double> BoostedModel::staged_predict(std::span<const double> x) const {
  std::vector<double> staged;
  staged.reserve(trees_.size());
  double f = 0.0;
  for (const auto& tree : trees_) {
    f += params_.learning_rate * tree.predict(x);
    staged.push_back(f);
  }
  return staged;
}

BoostedModel fit_lsboost(const Table& train, const BoostParams& params, std::uint64_t seed,
                         BoostingFitTrace* trace) {
  params.validate();
  if (train.rows() == 0) throw ParamError("cannot boost on an empty training set");
  const std::size_t n = train.rows();
  const TreeParams tree_params = round_tree_params(params, train.cols());
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::vector<double> residual(train.responses().begin(), train.responses().end());
  std::vector<double> fitted(n, 0.0);
  std::vector<RegressionTree> trees;
  trees.reserve(params.n_trees);
  if (trace) trace->train_rss.clear();
  for (int b = 0; b < params.n_trees; ++b) {
    RegressionTree tree = fit_tree(train, residual, rows, tree_params);
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double step = params.learning_rate * tree.predict(train.row(i));
      fitted[i] += step;
      residual[i] -= step;
      const double e = train.response(i) - fitted[i];
      rss += e * e;
    }
    if (trace) trace->train_rss.push_back(rss);
    trees.push_back(std::move(tree));
  }
  if (trace) trace->fitted = fitted;
  return BoostedModel(std::move(trees), params, seed);
}

std::vector<TracePoint> boosting_error_trace(const Table& train, const BoostParams& params, int k,
                                             std::uint64_t seed, const Table* test) {
  BoostingFitTrace fit_trace;
  const BoostedModel full = fit_lsboost(train, params, seed, &fit_trace);
  const auto rounds = static_cast<std::size_t>(params.n_trees);
  std::vector<TracePoint> trace(rounds);
  for (std::size_t b = 0; b < rounds; ++b) {
    trace[b].n_trees = static_cast<int>(b + 1);
    trace[b].train_mse = fit_trace.train_rss[b] / static_cast<double>(train.rows());
  }

  std::vector<double> cv_sum(rounds, 0.0);
  const auto folds = kfold_partition(train.rows(), k, seed);
  std::vector<char> held_out(train.rows());
  for (const auto& fold : folds) {
    std::fill(held_out.begin(), held_out.end(), 0);
    for (std::size_t i : fold) held_out[i] = 1;
    std::vector<std::size_t> fit_rows;
    for (std::size_t i = 0; i < train.rows(); ++i) {
      if (!held_out[i]) fit_rows.push_back(i);
    }
    const BoostedModel model = fit_lsboost(train.select(fit_rows), params, seed);
    std::vector<double> sse(rounds, 0.0);
    for (std::size_t i : fold) {
      const auto staged = model.staged_predict(train.row(i));
      for (std::size_t b = 0; b < rounds; ++b) {
        const double e = train.response(i) - staged[b];
        sse[b] += e * e;
      }
    }
    for (std::size_t b = 0; b < rounds; ++b) cv_sum[b] += sse[b] / static_cast<double>(fold.size());
  }
  for (std::size_t b = 0; b < rounds; ++b) trace[b].validation_mse = cv_sum[b] / k;

  if (test && test->rows() > 0) {
    std::vector<double> sse(rounds, 0.0);
    for (std::size_t i = 0; i < test->rows(); ++i) {
      const auto staged = full.staged_predict(test->row(i));
      for (std::size_t b = 0; b < rounds; ++b) {
        const double e = test->response(i) - staged[b];
        sse[b] += e * e;
      }
    }
    for (std::size_t b = 0; b < rounds; ++b) {
      trace[b].test_mse = sse[b] / static_cast<double>(test->rows());
    }
  }
  return trace;
}

}  // namespace porosity
