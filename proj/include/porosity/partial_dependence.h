#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "porosity/cross_validation.h"
#include "porosity/table.h"

namespace porosity {

struct PDPCurve {
  std::string feature;
  std::vector<double> grid;
  std::vector<std::string> labels;  // category labels for categorical features
  std::vector<double> values;
  std::size_t data_size = 0;
};

struct PDPSurface {
  std::string feature_a;
  std::string feature_b;
  std::vector<double> grid_a;
  std::vector<double> grid_b;
  std::vector<std::vector<double>> values;  // values[i][j] at (grid_a[i], grid_b[j])
  std::size_t data_size = 0;
};

inline constexpr std::size_t kDefaultGridPoints = 50;

// Numeric: evenly spaced over the observed range (one point when the feature
// is constant). Categorical: every category code. Throws ParamError for an
// unknown feature, DataError for empty data.
std::vector<double> default_grid(const Table& data, std::string_view feature,
                                 std::size_t points = kDefaultGridPoints);

// Mean prediction over all rows of `data` with the feature clamped to each
// grid value. Throws ParamError for an unknown feature or an empty grid.
PDPCurve partial_dependence(const Predictor& model, const Table& data, std::string_view feature,
                            std::vector<double> grid);
PDPCurve partial_dependence(const Predictor& model, const Table& data, std::string_view feature);

// Throws ParamError when both features are the same.
PDPSurface partial_dependence_2d(const Predictor& model, const Table& data,
                                 std::string_view feature_a, std::string_view feature_b,
                                 std::vector<double> grid_a, std::vector<double> grid_b);

}  // namespace porosity
