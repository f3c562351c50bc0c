#include "porosity/partial_dependence.h"

#include <algorithm>

#include "porosity/errors.h"

namespace porosity {
namespace {

void check_categories(const FeatureSpec& spec, const std::vector<double>& grid) {
  if (!spec.is_categorical()) return;
  for (double v : grid) {
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)) ||
        static_cast<std::size_t>(v) >= spec.categories.size()) {
      throw ParamError("grid value is not a category code of " + spec.name);
    }
  }
}

// Mean prediction with the given columns overwritten. Rows are summed in
// their sorted order so the result does not depend on record order.
double clamped_mean(const Predictor& model, const Table& data, std::size_t ja, double va,
                    std::size_t jb, double vb, bool two) {
  std::vector<double> x(data.cols());
  std::vector<double> predictions(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto row = data.row(i);
    std::copy(row.begin(), row.end(), x.begin());
    x[ja] = va;
    if (two) x[jb] = vb;
    predictions[i] = model(x);
  }
  std::sort(predictions.begin(), predictions.end());
  double sum = 0.0;
  for (double p : predictions) sum += p;
  return sum / static_cast<double>(predictions.size());
}

void check_data(const Table& data) {
  if (data.rows() == 0) throw DataError("partial dependence needs at least one record");
}

}  // namespace

std::vector<double> default_grid(const Table& data, std::string_view feature, std::size_t points) {
  const std::size_t j = data.feature_index(feature);
  const FeatureSpec& spec = data.feature(j);
  if (spec.is_categorical()) {
    std::vector<double> grid(spec.categories.size());
    for (std::size_t c = 0; c < grid.size(); ++c) grid[c] = static_cast<double>(c);
    return grid;
  }
  check_data(data);
  if (points == 0) throw ParamError("grid needs at least one point");
  double lo = data.at(0, j);
  double hi = lo;
  for (std::size_t i = 1; i < data.rows(); ++i) {
    lo = std::min(lo, data.at(i, j));
    hi = std::max(hi, data.at(i, j));
  }
  if (lo == hi || points == 1) return {lo};
  std::vector<double> grid(points);
  for (std::size_t g = 0; g < points; ++g) {
    grid[g] = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(points - 1);
  }
  grid.back() = hi;
  return grid;
}

PDPCurve partial_dependence(const Predictor& model, const Table& data, std::string_view feature,
                            std::vector<double> grid) {
  const std::size_t j = data.feature_index(feature);
  if (grid.empty()) throw ParamError("partial dependence grid is empty");
  check_data(data);
  const FeatureSpec& spec = data.feature(j);
  check_categories(spec, grid);
  if (!spec.is_categorical()) std::sort(grid.begin(), grid.end());

  PDPCurve curve;
  curve.feature = spec.name;
  curve.data_size = data.rows();
  for (double v : grid) {
    curve.values.push_back(clamped_mean(model, data, j, v, j, v, false));
    if (spec.is_categorical()) curve.labels.push_back(spec.categories[static_cast<std::size_t>(v)]);
  }
  curve.grid = std::move(grid);
  return curve;
}

PDPCurve partial_dependence(const Predictor& model, const Table& data, std::string_view feature) {
  return partial_dependence(model, data, feature, default_grid(data, feature));
}

PDPSurface partial_dependence_2d(const Predictor& model, const Table& data,
                                 std::string_view feature_a, std::string_view feature_b,
                                 std::vector<double> grid_a, std::vector<double> grid_b) {
  const std::size_t ja = data.feature_index(feature_a);
  const std::size_t jb = data.feature_index(feature_b);
  if (ja == jb) throw ParamError("partial dependence needs two distinct features");
  if (grid_a.empty() || grid_b.empty()) throw ParamError("partial dependence grid is empty");
  check_data(data);
  check_categories(data.feature(ja), grid_a);
  check_categories(data.feature(jb), grid_b);
  if (!data.feature(ja).is_categorical()) std::sort(grid_a.begin(), grid_a.end());
  if (!data.feature(jb).is_categorical()) std::sort(grid_b.begin(), grid_b.end());

  PDPSurface surface;
  surface.feature_a = data.feature(ja).name;
  surface.feature_b = data.feature(jb).name;
  surface.data_size = data.rows();
  surface.values.assign(grid_a.size(), std::vector<double>(grid_b.size()));
  for (std::size_t a = 0; a < grid_a.size(); ++a) {
    for (std::size_t b = 0; b < grid_b.size(); ++b) {
      surface.values[a][b] = clamped_mean(model, data, ja, grid_a[a], jb, grid_b[b], true);
    }
  }
  surface.grid_a = std::move(grid_a);
  surface.grid_b = std::move(grid_b);
  return surface;
}

}  // namespace porosity
