#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "porosity/boosting.h"
#include "porosity/cross_validation.h"
#include "porosity/forest.h"

namespace porosity {

using Model = std::variant<ForestModel, BoostedModel>;

inline constexpr int kModelFormatVersion = 1;

std::string_view model_kind(const Model& model);  // "forest" | "boosted"
double predict(const Model& model, std::span<const double> x);
Predictor make_predictor(Model model);

// JSON document: {format_version, model_kind, features, params, seed, trees,
// in_bag (forest) | learning_rate (boosted)}. Doubles are written in
// shortest round-trip form, so a reloaded model predicts bit-identically.
std::string serialize_model(const Model& model);
// Throws DataError for malformed documents or unsupported versions.
Model deserialize_model(std::string_view json);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace porosity
