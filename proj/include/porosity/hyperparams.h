#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace porosity {

enum class ParamKind { kInteger, kContinuous };
enum class ParamScale { kLinear, kLog };

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::kContinuous;
  double lower = 0.0;
  double upper = 1.0;
  ParamScale scale = ParamScale::kLinear;
};

struct HyperparamPoint {
  std::vector<std::string> names;
  std::vector<double> values;

  // Throws ParamError for unknown names.
  double operator[](std::string_view name) const;
  bool operator==(const HyperparamPoint&) const = default;
};

// Box of tunable parameters. Integer parameters cover every integer in
// [lower, upper]; log-scaled parameters are searched uniformly in log space.
class HyperparamSpace {
 public:
  // Throws ParamError for empty, non-finite or inverted bounds, or a log
  // scale with a non-positive lower bound.
  explicit HyperparamSpace(std::vector<ParamSpec> params);

  std::size_t dimensions() const { return params_.size(); }
  const std::vector<ParamSpec>& params() const { return params_; }

  // Maps a unit-box coordinate to a point, rounding integer dimensions.
  HyperparamPoint from_unit(std::span<const double> u) const;
  std::vector<double> to_unit(const HyperparamPoint& point) const;

  // Throws ParamError naming the first out-of-range or non-integral value.
  void validate(const HyperparamPoint& point) const;

 private:
  std::vector<ParamSpec> params_;
};

// min_leaf in [1, 20], features_per_split in [1, 8].
HyperparamSpace forest_search_space();
// n_trees [10, 500], learning_rate [0.001, 1] (log), max_splits [1, 20],
// min_leaf [1, min_leaf_upper] with min_leaf_upper <= 90.
HyperparamSpace boosting_search_space(int min_leaf_upper = 90);

}  // namespace porosity
