#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "porosity/table.h"

namespace porosity {

using Predictor = std::function<double(std::span<const double>)>;
// Fits on a training table and returns the fitted predictor.
using Learner = std::function<Predictor(const Table&)>;

// Shuffles 0..n-1 with `seed` and deals the indices round-robin into k folds,
// so fold sizes differ by at most one. Throws ParamError unless 2 <= k <= n.
std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, int k, std::uint64_t seed);

// Mean over folds of the hold-out MSE.
double kfold_cv_loss(const Table& train, const Learner& learner, int k, std::uint64_t seed);

}  // namespace porosity
