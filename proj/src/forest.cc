#include "porosity/forest.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "porosity/errors.h"
#include "porosity/random.h"

namespace porosity {
namespace {

std::vector<std::size_t> expand_counts(const std::vector<std::uint32_t>& counts) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < counts.size(); ++i) rows.insert(rows.end(), counts[i], i);
  return rows;
}

template <typename FitOne>
ForestModel fit_forest(const Table& train, const ForestParams& params, std::uint64_t seed,
                       FitOne fit_one) {
  if (train.rows() == 0) throw ParamError("cannot fit a forest on an empty training set");
  params.validate(train.cols());
  const auto n_trees = static_cast<std::size_t>(params.n_trees);
  std::vector<RegressionTree> trees(n_trees);
  std::vector<std::vector<std::uint32_t>> in_bag(n_trees);

  auto work = [&](std::size_t b) {
    Rng rng = make_stream(seed, stream_id(StreamDomain::kTree, b));
    in_bag[b] = draw_bootstrap(train.rows(), rng);
    trees[b] = fit_one(expand_counts(in_bag[b]), rng);
  };
  const auto threads = std::min<std::size_t>(std::max(params.num_threads, 1), n_trees);
  if (threads <= 1) {
    for (std::size_t b = 0; b < n_trees; ++b) work(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < n_trees; b = next++) {
          try {
            work(b);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }
  return ForestModel(std::move(trees), std::move(in_bag), params, seed);
}

}  // namespace

void ForestParams::validate(std::size_t num_features) const {
  if (n_trees < 1) throw ParamError("n_trees must be >= 1");
  if (min_leaf < 1) throw ParamError("min_leaf must be >= 1");
  if (features_per_split < 1 || static_cast<std::size_t>(features_per_split) > num_features) {
    throw ParamError("features_per_split must lie in [1, " + std::to_string(num_features) + "]");
  }
  if (max_splits && *max_splits < 0) throw ParamError("max_splits must be >= 0");
  if (num_threads < 1) throw ParamError("num_threads must be >= 1");
}

TreeParams ForestParams::tree_params(std::size_t n, std::size_t) const {
  TreeParams p;
  p.max_splits = max_splits.value_or(static_cast<int>(n) - 1);
  p.min_leaf = min_leaf;
  p.features_per_split = features_per_split;
  return p;
}

ForestModel::ForestModel(std::vector<RegressionTree> trees,
                         std::vector<std::vector<std::uint32_t>> in_bag, ForestParams params,
                         std::uint64_t seed)
    : trees_(std::move(trees)), in_bag_(std::move(in_bag)), params_(std::move(params)), seed_(seed) {
  if (trees_.empty()) throw ParamError("a forest needs at least one tree");
  if (in_bag_.size() != trees_.size()) throw ParamError("one in-bag mask per tree required");
  for (const auto& mask : in_bag_) {
    if (mask.size() != in_bag_.front().size()) throw ParamError("in-bag masks differ in length");
  }
}

double ForestModel::predict(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.predict(x);
  return sum / static_cast<double>(trees_.size());
}

std::vector<std::uint32_t> draw_bootstrap(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> counts(n, 0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t draw = 0; draw < n; ++draw) ++counts[pick(rng)];
  return counts;
}

ForestModel fit_random_forest(const Table& train, const ForestParams& params, std::uint64_t seed) {
  const TreeParams tree = params.tree_params(train.rows(), train.cols());
  return fit_forest(train, params, seed, [&](const std::vector<std::size_t>& rows, Rng& rng) {
    return fit_tree(train, train.responses(), rows, tree, rng);
  });
}

ForestModel fit_bagging(const Table& train, const ForestParams& params, std::uint64_t seed) {
  ForestParams all = params;
  all.features_per_split = static_cast<int>(train.cols());
  const TreeParams tree = all.tree_params(train.rows(), train.cols());
  return fit_forest(train, all, seed, [&](const std::vector<std::size_t>& rows, Rng&) {
    return fit_tree(train, train.responses(), rows, tree);
  });
}

std::vector<std::optional<double>> oob_predictions(const ForestModel& model, const Table& train) {
  if (train.rows() != model.training_size()) {
    throw ParamError("training table has " + std::to_string(train.rows()) +
                     " rows but the forest was fitted on " + std::to_string(model.training_size()));
  }
  std::vector<std::optional<double>> out(train.rows());
  for (std::size_t i = 0; i < train.rows(); ++i) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t b = 0; b < model.trees().size(); ++b) {
      if (!model.is_out_of_bag(b, i)) continue;
      sum += model.trees()[b].predict(train.row(i));
      ++count;
    }
    if (count > 0) out[i] = sum / count;
  }
  return out;
}

double oob_mse(const ForestModel& model, const Table& train) {
  const auto predictions = oob_predictions(model, train);
  double sse = 0.0;
  std::size_t eligible = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!predictions[i]) continue;
    const double e = train.response(i) - *predictions[i];
    sse += e * e;
    ++eligible;
  }
  if (eligible == 0) {
    throw NumericalError("no observation is out of bag for any tree; OOB MSE undefined");
  }
  return sse / static_cast<double>(eligible);
}

std::vector<TracePoint> forest_error_trace(const ForestModel& model, const Table& train,
                                           const Table* test) {
  if (train.rows() != model.training_size()) {
    throw ParamError("training table does not match the forest");
  }
  const std::size_t n = train.rows();
  std::vector<double> all_sum(n, 0.0);
  std::vector<double> oob_sum(n, 0.0);
  std::vector<int> oob_count(n, 0);
  std::vector<double> test_sum(test ? test->rows() : 0, 0.0);
  std::vector<TracePoint> trace;
  for (std::size_t b = 0; b < model.trees().size(); ++b) {
    const auto& tree = model.trees()[b];
    for (std::size_t i = 0; i < n; ++i) {
      const double p = tree.predict(train.row(i));
      all_sum[i] += p;
      if (model.is_out_of_bag(b, i)) {
        oob_sum[i] += p;
        ++oob_count[i];
      }
    }
    for (std::size_t i = 0; i < test_sum.size(); ++i) test_sum[i] += tree.predict(test->row(i));

    const double trees = static_cast<double>(b + 1);
    TracePoint point;
    point.n_trees = static_cast<int>(b + 1);
    double sse = 0.0;
    double oob_sse = 0.0;
    std::size_t eligible = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = train.response(i) - all_sum[i] / trees;
      sse += e * e;
      if (oob_count[i] > 0) {
        const double o = train.response(i) - oob_sum[i] / oob_count[i];
        oob_sse += o * o;
        ++eligible;
      }
    }
    point.train_mse = sse / static_cast<double>(n);
    if (eligible > 0) point.validation_mse = oob_sse / static_cast<double>(eligible);
    if (test && test->rows() > 0) {
      double tse = 0.0;
      for (std::size_t i = 0; i < test->rows(); ++i) {
        const double e = test->response(i) - test_sum[i] / trees;
        tse += e * e;
      }
      point.test_mse = tse / static_cast<double>(test->rows());
    }
    trace.push_back(point);
  }
  return trace;
}

}  // namespace porosity
