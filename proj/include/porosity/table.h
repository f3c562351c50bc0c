#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace porosity {

enum class FeatureKind { kNumeric, kCategorical };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  std::string unit;
  // Category labels for categorical features; a value v is encoded as the
  // double `v` indexing this list.
  std::vector<std::string> categories;

  bool is_categorical() const { return kind == FeatureKind::kCategorical; }
};

// Dense row-major design matrix with one response per row. This is the
// representation every learner works on; domain records are converted once.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<FeatureSpec> schema);

  void add_row(std::span<const double> features, double response);

  std::size_t rows() const { return response_.size(); }
  std::size_t cols() const { return schema_.size(); }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols(), cols()};
  }
  double at(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }
  void set(std::size_t i, std::size_t j, double v) { values_[i * cols() + j] = v; }

  double response(std::size_t i) const { return response_[i]; }
  std::span<const double> responses() const { return response_; }

  const std::vector<FeatureSpec>& schema() const { return schema_; }
  const FeatureSpec& feature(std::size_t j) const { return schema_[j]; }

  std::optional<std::size_t> find_feature(std::string_view name) const;
  // Throws ParamError for unknown names.
  std::size_t feature_index(std::string_view name) const;

  // Rows in the given order; duplicates allowed.
  Table select(std::span<const std::size_t> rows) const;

 private:
  std::vector<FeatureSpec> schema_;
  std::vector<double> values_;
  std::vector<double> response_;
};

}  // namespace porosity
