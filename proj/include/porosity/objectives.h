#pragma once

#include <cstdint>

#include "porosity/bayes_opt.h"
#include "porosity/boosting.h"
#include "porosity/forest.h"
#include "porosity/hyperparams.h"
#include "porosity/table.h"

namespace porosity {

inline constexpr int kTuningForestTrees = 300;
inline constexpr int kTuningFolds = 10;

// Point -> parameters. Both validate the point against the matching space.
ForestParams forest_params_from(const HyperparamPoint& point);
BoostParams boost_params_from(const HyperparamPoint& point, int min_leaf_upper = 90);

// OOB MSE of a 300-tree forest fitted with the point's parameters.
double objective_rf(const Table& train, const HyperparamPoint& point, std::uint64_t seed);

// log(1 + k-fold CV MSE) of LSBoost with the point's parameters. Folds are
// fixed by `seed`, so every point of one tuning run sees the same folds.
double objective_gbt(const Table& train, const HyperparamPoint& point, std::uint64_t seed,
                     int k = kTuningFolds, int min_leaf_upper = 90);

// Largest min_leaf that every CV training fold of `n` rows can accommodate,
// capped at 90.
int boosting_min_leaf_upper(std::size_t n, int k = kTuningFolds);

struct ForestTuning {
  TuneResult search;
  ForestParams params;
  ForestModel model;  // refitted on all of `train` with the best point
};

struct BoostingTuning {
  TuneResult search;
  BoostParams params;
  BoostedModel model;
};

ForestTuning tune_random_forest(const Table& train, int budget, std::uint64_t seed);
BoostingTuning tune_lsboost(const Table& train, int budget, std::uint64_t seed,
                            int k = kTuningFolds);

}  // namespace porosity
