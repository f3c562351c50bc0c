#include "porosity/model_io.h"

#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "porosity/dataset.h"
#include "porosity/errors.h"

namespace porosity {
namespace {

using nlohmann::json;

json node_to_json(const TreeNode& node) {
  json j;
  switch (node.kind) {
    case SplitKind::kLeaf:
      j["kind"] = "leaf";
      break;
    case SplitKind::kNumeric:
      j["kind"] = "numeric";
      j["threshold"] = node.threshold;
      break;
    case SplitKind::kCategorical: {
      j["kind"] = "categorical";
      json codes = json::array();
      for (int c = 0; c < 64; ++c) {
        if ((node.left_categories >> c) & 1U) codes.push_back(c);
      }
      j["left_categories"] = codes;
      break;
    }
  }
  if (!node.is_leaf()) {
    j["feature"] = node.feature;
    j["left"] = node.left;
    j["right"] = node.right;
  }
  j["value"] = node.value;
  j["count"] = node.count;
  j["rss"] = node.rss;
  return j;
}

TreeNode node_from_json(const json& j) {
  TreeNode node;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "leaf") {
    node.kind = SplitKind::kLeaf;
  } else if (kind == "numeric") {
    node.kind = SplitKind::kNumeric;
    node.threshold = j.at("threshold").get<double>();
  } else if (kind == "categorical") {
    node.kind = SplitKind::kCategorical;
    for (int c : j.at("left_categories").get<std::vector<int>>()) {
      if (c < 0 || c >= 64) throw DataError("category code out of range in model file");
      node.left_categories |= std::uint64_t{1} << c;
    }
  } else {
    throw DataError("unknown node kind '" + kind + "'");
  }
  if (!node.is_leaf()) {
    node.feature = j.at("feature").get<int>();
    node.left = j.at("left").get<int>();
    node.right = j.at("right").get<int>();
    if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= feature::kCount) {
      throw DataError("split feature index out of range in model file");
    }
  }
  node.value = j.at("value").get<double>();
  node.count = j.at("count").get<int>();
  node.rss = j.at("rss").get<double>();
  return node;
}

json trees_to_json(const std::vector<RegressionTree>& trees) {
  json out = json::array();
  for (const auto& tree : trees) {
    json nodes = json::array();
    for (const auto& node : tree.nodes()) nodes.push_back(node_to_json(node));
    out.push_back(json{{"nodes", nodes}});
  }
  return out;
}

std::vector<RegressionTree> trees_from_json(const json& j) {
  std::vector<RegressionTree> trees;
  for (const auto& t : j) {
    std::vector<TreeNode> nodes;
    for (const auto& n : t.at("nodes")) nodes.push_back(node_from_json(n));
    try {
      trees.emplace_back(std::move(nodes));
    } catch (const ParamError& e) {
      throw DataError(std::string("invalid tree in model file: ") + e.what());
    }
  }
  return trees;
}

json feature_names() {
  json names = json::array();
  for (const auto& spec : mix_schema()) names.push_back(spec.name);
  return names;
}

}  // namespace

std::string_view model_kind(const Model& model) {
  return std::holds_alternative<ForestModel>(model) ? "forest" : "boosted";
}

double predict(const Model& model, std::span<const double> x) {
  return std::visit([x](const auto& m) { return m.predict(x); }, model);
}

Predictor make_predictor(Model model) {
  auto shared = std::make_shared<const Model>(std::move(model));
  return [shared](std::span<const double> x) { return predict(*shared, x); };
}

std::string serialize_model(const Model& model) {
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["model_kind"] = std::string(model_kind(model));
  doc["features"] = feature_names();
  if (const auto* forest = std::get_if<ForestModel>(&model)) {
    const auto& p = forest->params();
    doc["params"] = {{"n_trees", p.n_trees},
                     {"min_leaf", p.min_leaf},
                     {"features_per_split", p.features_per_split}};
    if (p.max_splits) doc["params"]["max_splits"] = *p.max_splits;
    doc["seed"] = forest->seed();
    doc["trees"] = trees_to_json(forest->trees());
    doc["in_bag"] = forest->in_bag();
  } else {
    const auto& boosted = std::get<BoostedModel>(model);
    const auto& p = boosted.params();
    doc["params"] = {{"n_trees", p.n_trees},
                     {"learning_rate", p.learning_rate},
                     {"max_splits", p.max_splits},
                     {"min_leaf", p.min_leaf},
                     {"enforce_search_ranges", p.enforce_search_ranges}};
    doc["seed"] = boosted.seed();
    doc["learning_rate"] = p.learning_rate;
    doc["trees"] = trees_to_json(boosted.trees());
  }
  return doc.dump(1);
}

Model deserialize_model(std::string_view text) {
  try {
    const json doc = json::parse(text);
    const int version = doc.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw DataError("unsupported model format_version " + std::to_string(version));
    }
    if (doc.contains("features") && doc.at("features") != feature_names()) {
      throw DataError("model was trained on a different feature schema");
    }
    const auto kind = doc.at("model_kind").get<std::string>();
    const auto& params = doc.at("params");
    const auto seed = doc.at("seed").get<std::uint64_t>();
    auto trees = trees_from_json(doc.at("trees"));
    if (kind == "forest") {
      ForestParams p;
      p.n_trees = params.at("n_trees").get<int>();
      p.min_leaf = params.at("min_leaf").get<int>();
      p.features_per_split = params.at("features_per_split").get<int>();
      if (params.contains("max_splits")) p.max_splits = params.at("max_splits").get<int>();
      auto in_bag = doc.at("in_bag").get<std::vector<std::vector<std::uint32_t>>>();
      return ForestModel(std::move(trees), std::move(in_bag), p, seed);
    }
    if (kind == "boosted") {
      BoostParams p;
      p.n_trees = params.at("n_trees").get<int>();
      p.learning_rate = doc.at("learning_rate").get<double>();
      p.max_splits = params.at("max_splits").get<int>();
      p.min_leaf = params.at("min_leaf").get<int>();
      p.enforce_search_ranges = params.value("enforce_search_ranges", true);
      return BoostedModel(std::move(trees), p, seed);
    }
    throw DataError("unknown model_kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model document: ") + e.what());
  } catch (const ParamError& e) {
    throw DataError(std::string("inconsistent model document: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << serialize_model(model) << '\n';
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return deserialize_model(buffer.str());
}

}  // namespace porosity
