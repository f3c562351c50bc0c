#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "porosity/dataset.h"
#include "porosity/random.h"
#include "porosity/table.h"

namespace porosity {

// Splits whose RSS reduction does not exceed this are not made.
inline constexpr double kMinRssReduction = 1e-12;

struct TreeParams {
  int max_splits = 0;          // internal nodes per tree
  int min_leaf = 1;            // observations per terminal node
  int features_per_split = 1;  // predictors drawn at each node

  // Throws ParamError when a field is outside its domain for `num_features`.
  void validate(std::size_t num_features) const;
};

enum class SplitKind : std::uint8_t { kLeaf, kNumeric, kCategorical };

struct TreeNode {
  SplitKind kind = SplitKind::kLeaf;
  int feature = -1;
  double threshold = 0.0;              // numeric: left iff x <= threshold
  std::uint64_t left_categories = 0;   // categorical: bit c set => code c goes left
  int left = -1;
  int right = -1;
  double value = 0.0;  // mean training response reaching the node
  int count = 0;       // training rows reaching the node, with multiplicity
  double rss = 0.0;    // training RSS of the node around `value`

  bool is_leaf() const { return kind == SplitKind::kLeaf; }
  bool goes_left(double x) const;

  bool operator==(const TreeNode&) const = default;
};

class RegressionTree {
 public:
  RegressionTree();  // single leaf predicting 0
  // Node 0 is the root. Throws ParamError for dangling or cyclic links.
  explicit RegressionTree(std::vector<TreeNode> nodes);

  double predict(std::span<const double> x) const { return nodes_[leaf_index(x)].value; }
  int leaf_index(std::span<const double> x) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int num_leaves() const;
  int num_splits() const { return static_cast<int>(nodes_.size()) - num_leaves(); }
  bool uses_feature(std::size_t j) const;

  bool operator==(const RegressionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct SplitCandidate {
  int feature = -1;
  SplitKind kind = SplitKind::kNumeric;
  double threshold = 0.0;
  std::uint64_t left_categories = 0;
  double rss = 0.0;  // left RSS + right RSS
  int left_count = 0;
  int right_count = 0;
};

// RSS-minimizing binary split of `rows` over `features` (ascending order).
// Ties keep the lowest feature index, then the smallest threshold or the
// lexicographically smallest left category set; left sets always contain the
// smallest category code present. Returns nullopt when no admissible split
// reduces RSS by more than kMinRssReduction.
std::optional<SplitCandidate> best_split(const Table& data, std::span<const double> response,
                                         std::span<const std::size_t> rows,
                                         std::span<const int> features, int min_leaf);

// Greedy breadth-first growth; each node draws a fresh feature subset from `rng`.
RegressionTree fit_tree(const Table& data, std::span<const double> response,
                        std::span<const std::size_t> rows, const TreeParams& params, Rng& rng);

// Deterministic CART considering every feature at every node.
// `params.features_per_split` is ignored.
RegressionTree fit_tree(const Table& data, std::span<const double> response,
                        std::span<const std::size_t> rows, const TreeParams& params);

// Convenience: all rows, table responses.
RegressionTree fit_tree(const Table& data, const TreeParams& params, Rng& rng);

double predict_tree(const RegressionTree& tree, const MixRecord& record);

struct PruneStep {
  double alpha = 0.0;  // smallest penalty at which `tree` is optimal
  RegressionTree tree;
};

// Weakest-link cost-complexity sequence with node statistics recomputed
// from the given samples. The first step is the smallest subtree with the
// full tree's RSS (alpha 0); the last is the root leaf.
std::vector<PruneStep> cost_complexity_path(const RegressionTree& tree, const Table& data,
                                            std::span<const double> response,
                                            std::span<const std::size_t> rows);

// Subtree minimizing RSS + alpha * leaves. Throws ParamError for alpha < 0.
RegressionTree prune(const RegressionTree& tree, double alpha, const Table& data,
                     std::span<const double> response, std::span<const std::size_t> rows);

}  // namespace porosity
