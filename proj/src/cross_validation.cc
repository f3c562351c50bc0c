#include "porosity/cross_validation.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "porosity/errors.h"
#include "porosity/random.h"

namespace porosity {

std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2 || static_cast<std::size_t>(k) > n) {
    throw ParamError("k-fold CV needs 2 <= k <= n (k = " + std::to_string(k) +
                     ", n = " + std::to_string(n) + ")");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_stream(seed, stream_id(StreamDomain::kFolds, 0));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

double kfold_cv_loss(const Table& train, const Learner& learner, int k, std::uint64_t seed) {
  const auto folds = kfold_partition(train.rows(), k, seed);
  double total = 0.0;
  std::vector<char> held_out(train.rows());
  for (const auto& fold : folds) {
    std::fill(held_out.begin(), held_out.end(), 0);
    for (std::size_t i : fold) held_out[i] = 1;
    std::vector<std::size_t> fit_rows;
    for (std::size_t i = 0; i < train.rows(); ++i) {
      if (!held_out[i]) fit_rows.push_back(i);
    }
    const Predictor predict = learner(train.select(fit_rows));
    double sse = 0.0;
    for (std::size_t i : fold) {
      const double e = train.response(i) - predict(train.row(i));
      sse += e * e;
    }
    total += sse / static_cast<double>(fold.size());
  }
  return total / static_cast<double>(k);
}

}  // namespace porosity
