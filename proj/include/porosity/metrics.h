#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace porosity {

struct EvalReport {
  double rmse = 0.0;  // response units
  double mape = 0.0;  // percent, e.g. 5.77 for 5.77 %
  std::optional<double> r2;
  std::size_t m = 0;
};

// RMSE, MAPE and R^2 (with the mean of `actual` as the baseline).
// Throws ParamError on length mismatch or empty input, DataError when an
// actual value is 0 (MAPE) or when `actual` has zero variance (R^2).
EvalReport evaluate(std::span<const double> actual, std::span<const double> predicted);

// As evaluate(), but leaves r2 empty instead of failing when it is undefined.
EvalReport evaluate_partial(std::span<const double> actual, std::span<const double> predicted);

}  // namespace porosity
