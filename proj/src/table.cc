#include "porosity/table.h"

#include <utility>

#include "porosity/errors.h"

namespace porosity {

Table::Table(std::vector<FeatureSpec> schema) : schema_(std::move(schema)) {}

void Table::add_row(std::span<const double> features, double response) {
  if (features.size() != cols()) {
    throw ParamError("row has " + std::to_string(features.size()) +
                     " features, table expects " + std::to_string(cols()));
  }
  values_.insert(values_.end(), features.begin(), features.end());
  response_.push_back(response);
}

std::optional<std::size_t> Table::find_feature(std::string_view name) const {
  for (std::size_t j = 0; j < schema_.size(); ++j) {
    if (schema_[j].name == name) return j;
  }
  return std::nullopt;
}

std::size_t Table::feature_index(std::string_view name) const {
  if (auto j = find_feature(name)) return *j;
  throw ParamError("unknown feature '" + std::string(name) + "'");
}

Table Table::select(std::span<const std::size_t> rows) const {
  Table out(schema_);
  out.values_.reserve(rows.size() * cols());
  out.response_.reserve(rows.size());
  for (std::size_t i : rows) out.add_row(row(i), response_[i]);
  return out;
}

}  // namespace porosity
