#include "porosity/metrics.h"

#include <cmath>
#include <string>

#include "porosity/errors.h"

namespace porosity {
namespace {

EvalReport compute(std::span<const double> actual, std::span<const double> predicted,
                   bool require_r2) {
  if (actual.size() != predicted.size()) {
    throw ParamError("actual and predicted lengths differ (" + std::to_string(actual.size()) +
                     " vs " + std::to_string(predicted.size()) + ")");
  }
  if (actual.empty()) throw ParamError("cannot evaluate zero observations");
  const double m = static_cast<double>(actual.size());
  double sse = 0.0;
  double ape = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0.0) throw DataError("MAPE undefined: actual value 0 at index " + std::to_string(i));
    const double e = actual[i] - predicted[i];
    sse += e * e;
    ape += std::abs(e / actual[i]);
    mean += actual[i];
  }
  mean /= m;
  double sst = 0.0;
  for (double y : actual) sst += (y - mean) * (y - mean);

  EvalReport report;
  report.m = actual.size();
  report.rmse = std::sqrt(sse / m);
  report.mape = ape / m * 100.0;
  if (actual.size() >= 2 && sst > 0.0) {
    report.r2 = 1.0 - sse / sst;
  } else if (require_r2) {
    throw DataError("R^2 undefined: actual values need at least two distinct entries");
  }
  return report;
}

}  // namespace

EvalReport evaluate(std::span<const double> actual, std::span<const double> predicted) {
  return compute(actual, predicted, true);
}

EvalReport evaluate_partial(std::span<const double> actual, std::span<const double> predicted) {
  return compute(actual, predicted, false);
}

}  // namespace porosity
