#include "porosity/importance.h"

#include <algorithm>
#include <cmath>

#include "porosity/errors.h"
#include "porosity/random.h"

namespace porosity {
namespace {

double tree_mse(const RegressionTree& tree, const Table& train,
                const std::vector<std::size_t>& rows, std::size_t feature,
                const std::vector<double>& feature_values, std::vector<double>& buffer) {
  double sse = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto x = train.row(rows[r]);
    std::copy(x.begin(), x.end(), buffer.begin());
    buffer[feature] = feature_values[r];
    const double e = train.response(rows[r]) - tree.predict(buffer);
    sse += e * e;
  }
  return sse / static_cast<double>(rows.size());
}

}  // namespace

ImportanceReport permutation_importance(const ForestModel& model, const Table& train,
                                        int n_repeats, std::uint64_t seed) {
  if (model.trees().size() < 2) {
    throw ParamError("permutation importance needs at least two trees");
  }
  if (n_repeats < 1) throw ParamError("n_repeats must be >= 1");
  if (train.rows() != model.training_size()) {
    throw ParamError("training table does not match the forest");
  }
  const std::size_t p = train.cols();
  std::vector<std::vector<double>> increases(p);  // [feature][used tree]
  std::vector<double> buffer(p);

  for (std::size_t b = 0; b < model.trees().size(); ++b) {
    std::vector<std::size_t> oob;
    for (std::size_t i = 0; i < train.rows(); ++i) {
      if (model.is_out_of_bag(b, i)) oob.push_back(i);
    }
    if (oob.empty()) continue;
    const auto& tree = model.trees()[b];
    Rng rng = make_stream(seed, stream_id(StreamDomain::kImportance, b));
    for (std::size_t j = 0; j < p; ++j) {
      std::vector<double> original(oob.size());
      for (std::size_t r = 0; r < oob.size(); ++r) original[r] = train.at(oob[r], j);
      const double base = tree_mse(tree, train, oob, j, original, buffer);
      double delta = 0.0;
      for (int rep = 0; rep < n_repeats; ++rep) {
        std::vector<double> shuffled = original;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        delta += tree_mse(tree, train, oob, j, shuffled, buffer) - base;
      }
      increases[j].push_back(delta / n_repeats);
    }
  }
  if (increases.front().empty()) {
    throw NumericalError("no tree has an out-of-bag observation; importance undefined");
  }

  ImportanceReport report;
  report.trees_used = static_cast<int>(increases.front().size());
  for (std::size_t j = 0; j < p; ++j) {
    const auto& d = increases[j];
    const double n = static_cast<double>(d.size());
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : d) ss += (v - mean) * (v - mean);
    PredictorImportance entry;
    entry.name = train.feature(j).name;
    entry.mean_increase = mean;
    entry.std_increase = d.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    entry.importance = entry.std_increase > 0.0 ? mean / entry.std_increase : 0.0;
    report.predictors.push_back(std::move(entry));
  }
  return report;
}

}  // namespace porosity
