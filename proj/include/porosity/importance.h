#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "porosity/forest.h"
#include "porosity/table.h"

namespace porosity {

struct PredictorImportance {
  std::string name;
  double mean_increase = 0.0;  // mean over trees of the OOB MSE increase
  double std_increase = 0.0;   // sample std of that increase over trees
  double importance = 0.0;     // mean / std, 0 when std is 0
};

struct ImportanceReport {
  std::vector<PredictorImportance> predictors;  // schema order
  int trees_used = 0;                           // trees with a non-empty OOB set
};

// Out-of-bag permutation importance: for each tree, the increase in its OOB
// MSE when one predictor is shuffled among that tree's OOB rows. With
// n_repeats > 1 the per-tree increase is averaged over repeated shuffles.
ImportanceReport permutation_importance(const ForestModel& model, const Table& train,
                                        int n_repeats, std::uint64_t seed);

}  // namespace porosity
