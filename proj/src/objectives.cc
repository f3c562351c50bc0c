#include "porosity/objectives.h"

#include <algorithm>
#include <cmath>
#include <memory>

#include "porosity/cross_validation.h"
#include "porosity/errors.h"

namespace porosity {

ForestParams forest_params_from(const HyperparamPoint& point) {
  forest_search_space().validate(point);
  ForestParams params;
  params.n_trees = kTuningForestTrees;
  params.min_leaf = static_cast<int>(point["min_leaf"]);
  params.features_per_split = static_cast<int>(point["features_per_split"]);
  return params;
}

BoostParams boost_params_from(const HyperparamPoint& point, int min_leaf_upper) {
  boosting_search_space(min_leaf_upper).validate(point);
  BoostParams params;
  params.n_trees = static_cast<int>(point["n_trees"]);
  params.learning_rate = point["learning_rate"];
  params.max_splits = static_cast<int>(point["max_splits"]);
  params.min_leaf = static_cast<int>(point["min_leaf"]);
  return params;
}

double objective_rf(const Table& train, const HyperparamPoint& point, std::uint64_t seed) {
  const ForestParams params = forest_params_from(point);
  return oob_mse(fit_random_forest(train, params, seed), train);
}

double objective_gbt(const Table& train, const HyperparamPoint& point, std::uint64_t seed, int k,
                     int min_leaf_upper) {
  const BoostParams params = boost_params_from(point, min_leaf_upper);
  const Learner learner = [&](const Table& fold) -> Predictor {
    auto model = std::make_shared<BoostedModel>(fit_lsboost(fold, params, seed));
    return [model](std::span<const double> x) { return model->predict(x); };
  };
  return std::log1p(kfold_cv_loss(train, learner, k, seed));
}

int boosting_min_leaf_upper(std::size_t n, int k) {
  if (k < 2 || static_cast<std::size_t>(k) > n) throw ParamError("need 2 <= k <= n");
  const std::size_t largest_fold = (n + static_cast<std::size_t>(k) - 1) / static_cast<std::size_t>(k);
  const auto smallest_train = static_cast<int>(n - largest_fold);
  return std::clamp(smallest_train, 2, 90);
}

ForestTuning tune_random_forest(const Table& train, int budget, std::uint64_t seed) {
  const Objective objective = [&](const HyperparamPoint& p) { return objective_rf(train, p, seed); };
  ForestTuning out;
  out.search = bayes_optimize(forest_search_space(), objective, budget, seed);
  if (!std::isfinite(out.search.best_value)) throw NumericalError("every tuning evaluation failed");
  out.params = forest_params_from(out.search.best_point);
  out.model = fit_random_forest(train, out.params, seed);
  return out;
}

BoostingTuning tune_lsboost(const Table& train, int budget, std::uint64_t seed, int k) {
  const int upper = boosting_min_leaf_upper(train.rows(), k);
  const Objective objective = [&](const HyperparamPoint& p) {
    return objective_gbt(train, p, seed, k, upper);
  };
  BoostingTuning out;
  out.search = bayes_optimize(boosting_search_space(upper), objective, budget, seed);
  if (!std::isfinite(out.search.best_value)) throw NumericalError("every tuning evaluation failed");
  out.params = boost_params_from(out.search.best_point, upper);
  out.model = fit_lsboost(train, out.params, seed);
  return out;
}

}  // namespace porosity
