#include "porosity/cart.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "porosity/errors.h"

namespace porosity {
namespace {

// Two candidate splits whose RSS differ by less than this fraction of the
// node RSS are considered tied.
constexpr double kRelativeTieTolerance = 1e-10;
constexpr int kMaxCategories = 64;
// Up to this many categories present at a node, every partition is tried.
constexpr std::size_t kExhaustiveCategoryLimit = 12;

struct NodeStats {
  double mean = 0.0;
  double rss = 0.0;
  int count = 0;
};

NodeStats node_stats(std::span<const double> response, std::span<const std::size_t> rows) {
  NodeStats s;
  if (rows.empty()) return s;
  double sum = 0.0;
  for (std::size_t i : rows) sum += response[i];
  s.count = static_cast<int>(rows.size());
  s.mean = sum / static_cast<double>(rows.size());
  for (std::size_t i : rows) s.rss += (response[i] - s.mean) * (response[i] - s.mean);
  return s;
}

TreeNode make_leaf(const NodeStats& s) {
  TreeNode node;
  node.value = s.mean;
  node.count = s.count;
  node.rss = s.rss;
  return node;
}

int category_code(double x) {
  const double r = std::round(x);
  if (r != x || r < 0 || r >= kMaxCategories) {
    throw DataError("categorical value " + std::to_string(x) +
                    " is not a category code in [0, 63]");
  }
  return static_cast<int>(r);
}

// Sorted code lists compared lexicographically; a proper prefix is smaller.
bool category_set_less(std::uint64_t a, std::uint64_t b) {
  for (int c = 0; c < kMaxCategories; ++c) {
    const bool in_a = (a >> c) & 1U;
    const bool in_b = (b >> c) & 1U;
    if (in_a == in_b) continue;
    const std::uint64_t above = c + 1 < kMaxCategories ? ~std::uint64_t{0} << (c + 1) : 0;
    // a continues with c; it is smaller unless b has already ended.
    if (in_a) return (b & above) != 0;
    return (a & above) == 0;
  }
  return false;
}

double child_rss(double sum, double sumsq, double n) {
  return std::max(0.0, sumsq - sum * sum / n);
}

void scan_numeric(const Table& data, std::span<const double> response,
                  std::span<const std::size_t> rows, int j, double node_mean, int min_leaf,
                  double tie, std::optional<SplitCandidate>& best) {
  std::vector<std::pair<double, double>> xy;
  xy.reserve(rows.size());
  for (std::size_t i : rows) xy.emplace_back(data.at(i, j), response[i] - node_mean);
  std::stable_sort(xy.begin(), xy.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  double total_sum = 0.0;
  double total_sq = 0.0;
  for (const auto& [x, r] : xy) {
    total_sum += r;
    total_sq += r * r;
  }
  const int n = static_cast<int>(xy.size());
  double left_sum = 0.0;
  double left_sq = 0.0;
  for (int k = 0; k + 1 < n; ++k) {
    left_sum += xy[k].second;
    left_sq += xy[k].second * xy[k].second;
    const int n_left = k + 1;
    const int n_right = n - n_left;
    if (xy[k].first == xy[k + 1].first) continue;
    if (n_left < min_leaf || n_right < min_leaf) continue;
    const double rss = child_rss(left_sum, left_sq, n_left) +
                       child_rss(total_sum - left_sum, total_sq - left_sq, n_right);
    if (best && !(rss < best->rss - tie)) continue;
    double threshold = std::midpoint(xy[k].first, xy[k + 1].first);
    if (threshold >= xy[k + 1].first) threshold = xy[k].first;
    best = SplitCandidate{j, SplitKind::kNumeric, threshold, 0, rss, n_left, n_right};
  }
}

void scan_categorical(const Table& data, std::span<const double> response,
                      std::span<const std::size_t> rows, int j, double node_mean, int min_leaf,
                      double tie, std::optional<SplitCandidate>& best) {
  struct Bucket {
    int code = 0;
    int count = 0;
    double sum = 0.0;
    double sumsq = 0.0;
  };
  std::vector<Bucket> buckets(kMaxCategories);
  for (std::size_t i : rows) {
    const int c = category_code(data.at(i, j));
    const double r = response[i] - node_mean;
    buckets[c].code = c;
    buckets[c].count += 1;
    buckets[c].sum += r;
    buckets[c].sumsq += r * r;
  }
  std::vector<Bucket> present;
  for (const auto& b : buckets) {
    if (b.count > 0) present.push_back(b);
  }
  if (present.size() < 2) return;
  std::uint64_t present_mask = 0;
  double total_sum = 0.0;
  double total_sq = 0.0;
  for (const auto& b : present) {
    present_mask |= std::uint64_t{1} << b.code;
    total_sum += b.sum;
    total_sq += b.sumsq;
  }
  const int lowest_code = present.front().code;
  const int n = static_cast<int>(rows.size());
  auto consider = [&](std::uint64_t group_mask, double g_sum, double g_sq, int g_count) {
    // The left set is whichever side holds the lowest code.
    const bool flip = !((group_mask >> lowest_code) & 1U);
    const std::uint64_t left_mask = flip ? present_mask & ~group_mask : group_mask;
    const int n_left = flip ? n - g_count : g_count;
    const int n_right = n - n_left;
    if (n_left < min_leaf || n_right < min_leaf) return;
    const double rss = child_rss(g_sum, g_sq, g_count) +
                       child_rss(total_sum - g_sum, total_sq - g_sq, n - g_count);
    if (best) {
      const bool better = rss < best->rss - tie;
      const bool tied_smaller = best->feature == j && std::abs(rss - best->rss) <= tie &&
                                category_set_less(left_mask, best->left_categories);
      if (!better && !tied_smaller) return;
    }
    best = SplitCandidate{j, SplitKind::kCategorical, 0.0, left_mask, rss, n_left, n_right};
  };

  const std::size_t m = present.size();
  if (m <= kExhaustiveCategoryLimit) {
    // Every left set containing the lowest code. Exact search also settles
    // ties between categories with equal mean response, which an ordering
    // cannot.
    for (std::uint64_t bits = 0; bits + 1 < (std::uint64_t{1} << (m - 1)); ++bits) {
      std::uint64_t mask = std::uint64_t{1} << lowest_code;
      double g_sum = present[0].sum;
      double g_sq = present[0].sumsq;
      int g_count = present[0].count;
      for (std::size_t k = 1; k < m; ++k) {
        if (!((bits >> (k - 1)) & 1U)) continue;
        mask |= std::uint64_t{1} << present[k].code;
        g_sum += present[k].sum;
        g_sq += present[k].sumsq;
        g_count += present[k].count;
      }
      consider(mask, g_sum, g_sq, g_count);
    }
    return;
  }

  // Ordering categories by mean response makes the prefix scan optimal for
  // squared error.
  std::stable_sort(present.begin(), present.end(), [](const Bucket& a, const Bucket& b) {
    return a.sum / a.count < b.sum / b.count;
  });
  double prefix_sum = 0.0;
  double prefix_sq = 0.0;
  int prefix_count = 0;
  std::uint64_t prefix_mask = 0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    prefix_sum += present[k].sum;
    prefix_sq += present[k].sumsq;
    prefix_count += present[k].count;
    prefix_mask |= std::uint64_t{1} << present[k].code;
    consider(prefix_mask, prefix_sum, prefix_sq, prefix_count);
  }
}

using FeatureSelector = std::function<std::vector<int>()>;

RegressionTree grow(const Table& data, std::span<const double> response,
                    std::span<const std::size_t> rows, const TreeParams& params,
                    const FeatureSelector& select_features) {
  if (rows.empty()) throw ParamError("cannot fit a tree on zero observations");
  if (response.size() < data.rows()) throw ParamError("response shorter than table");
  if (static_cast<int>(rows.size()) < params.min_leaf) {
    throw ParamError("min_leaf " + std::to_string(params.min_leaf) + " exceeds the " +
                     std::to_string(rows.size()) + " available observations");
  }
  std::vector<TreeNode> nodes;
  nodes.push_back(make_leaf(node_stats(response, rows)));
  std::deque<std::pair<int, std::vector<std::size_t>>> queue;
  queue.emplace_back(0, std::vector<std::size_t>(rows.begin(), rows.end()));
  int splits = 0;
  while (!queue.empty() && splits < params.max_splits) {
    auto [id, node_rows] = std::move(queue.front());
    queue.pop_front();
    if (static_cast<int>(node_rows.size()) < 2 * params.min_leaf) continue;
    const auto features = select_features();
    const auto split = best_split(data, response, node_rows, features, params.min_leaf);
    if (!split) continue;

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    TreeNode& node = nodes[id];
    node.kind = split->kind;
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.left_categories = split->left_categories;
    for (std::size_t i : node_rows) {
      (node.goes_left(data.at(i, split->feature)) ? left_rows : right_rows).push_back(i);
    }
    const int left_id = static_cast<int>(nodes.size());
    nodes[id].left = left_id;
    nodes[id].right = left_id + 1;
    nodes.push_back(make_leaf(node_stats(response, left_rows)));
    nodes.push_back(make_leaf(node_stats(response, right_rows)));
    ++splits;
    queue.emplace_back(left_id, std::move(left_rows));
    queue.emplace_back(left_id + 1, std::move(right_rows));
  }
  return RegressionTree(std::move(nodes));
}

}  // namespace

void TreeParams::validate(std::size_t num_features) const {
  if (max_splits < 0) throw ParamError("max_splits must be >= 0");
  if (min_leaf < 1) throw ParamError("min_leaf must be >= 1");
  if (features_per_split < 1 || static_cast<std::size_t>(features_per_split) > num_features) {
    throw ParamError("features_per_split must lie in [1, " + std::to_string(num_features) + "]");
  }
}

bool TreeNode::goes_left(double x) const {
  if (kind == SplitKind::kNumeric) return x <= threshold;
  const double r = std::round(x);
  if (r != x || r < 0 || r >= kMaxCategories) return false;
  return (left_categories >> static_cast<int>(r)) & 1U;
}

RegressionTree::RegressionTree() : nodes_(1) {}

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ParamError("a tree needs at least one node");
  const int n = static_cast<int>(nodes_.size());
  std::vector<int> parents(n, 0);
  for (const auto& node : nodes_) {
    if (node.is_leaf()) continue;
    for (int child : {node.left, node.right}) {
      if (child <= 0 || child >= n) throw ParamError("tree node links outside the node array");
      ++parents[child];
    }
  }
  for (int i = 1; i < n; ++i) {
    if (parents[i] != 1) throw ParamError("tree node " + std::to_string(i) + " is not reachable exactly once");
  }
  // Every non-root node has one parent and the root none, so the structure is
  // a tree iff it is connected from the root.
  std::vector<int> stack = {0};
  int visited = 0;
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (++visited > n) throw ParamError("tree contains a cycle");
    if (!nodes_[id].is_leaf()) {
      stack.push_back(nodes_[id].left);
      stack.push_back(nodes_[id].right);
    }
  }
  if (visited != n) throw ParamError("tree contains unreachable nodes");
}

int RegressionTree::leaf_index(std::span<const double> x) const {
  int id = 0;
  while (!nodes_[id].is_leaf()) {
    const auto& node = nodes_[id];
    id = node.goes_left(x[node.feature]) ? node.left : node.right;
  }
  return id;
}

int RegressionTree::num_leaves() const {
  return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(),
                                        [](const TreeNode& n) { return n.is_leaf(); }));
}

bool RegressionTree::uses_feature(std::size_t j) const {
  return std::any_of(nodes_.begin(), nodes_.end(), [j](const TreeNode& n) {
    return !n.is_leaf() && static_cast<std::size_t>(n.feature) == j;
  });
}

std::optional<SplitCandidate> best_split(const Table& data, std::span<const double> response,
                                         std::span<const std::size_t> rows,
                                         std::span<const int> features, int min_leaf) {
  if (rows.empty()) throw ParamError("best_split needs at least one observation");
  if (min_leaf < 1) throw ParamError("min_leaf must be >= 1");
  if (rows.size() < 2) return std::nullopt;
  const NodeStats stats = node_stats(response, rows);
  if (stats.rss <= kMinRssReduction) return std::nullopt;
  const double tie = kRelativeTieTolerance * stats.rss;
  std::optional<SplitCandidate> best;
  for (int j : features) {
    if (j < 0 || static_cast<std::size_t>(j) >= data.cols()) {
      throw ParamError("feature index " + std::to_string(j) + " out of range");
    }
    if (data.feature(j).is_categorical()) {
      scan_categorical(data, response, rows, j, stats.mean, min_leaf, tie, best);
    } else {
      scan_numeric(data, response, rows, j, stats.mean, min_leaf, tie, best);
    }
  }
  if (best && stats.rss - best->rss <= kMinRssReduction) return std::nullopt;
  return best;
}

RegressionTree fit_tree(const Table& data, std::span<const double> response,
                        std::span<const std::size_t> rows, const TreeParams& params, Rng& rng) {
  params.validate(data.cols());
  const int p = static_cast<int>(data.cols());
  const int k = params.features_per_split;
  std::vector<int> pool(p);
  auto select = [&]() {
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
      std::uniform_int_distribution<int> pick(i, p - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    std::vector<int> chosen(pool.begin(), pool.begin() + k);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  };
  return grow(data, response, rows, params, select);
}

RegressionTree fit_tree(const Table& data, std::span<const double> response,
                        std::span<const std::size_t> rows, const TreeParams& params) {
  TreeParams all = params;
  all.features_per_split = static_cast<int>(data.cols());
  all.validate(data.cols());
  std::vector<int> every(data.cols());
  std::iota(every.begin(), every.end(), 0);
  return grow(data, response, rows, all, [&every] { return every; });
}

RegressionTree fit_tree(const Table& data, const TreeParams& params, Rng& rng) {
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit_tree(data, data.responses(), rows, params, rng);
}

double predict_tree(const RegressionTree& tree, const MixRecord& record) {
  return tree.predict(to_features(record));
}

namespace {

// Mutable view used by weakest-link pruning.
struct PruneState {
  std::vector<TreeNode> nodes;
  std::vector<char> collapsed;

  bool is_leaf(int id) const { return nodes[id].is_leaf() || collapsed[id]; }

  // (sum of leaf RSS, leaf count) of the current subtree rooted at id.
  std::pair<double, int> subtree(int id) const {
    if (is_leaf(id)) return {nodes[id].rss, 1};
    auto [lr, ln] = subtree(nodes[id].left);
    auto [rr, rn] = subtree(nodes[id].right);
    return {lr + rr, ln + rn};
  }

  void internal_nodes(int id, std::vector<int>& out) const {
    if (is_leaf(id)) return;
    out.push_back(id);
    internal_nodes(nodes[id].left, out);
    internal_nodes(nodes[id].right, out);
  }

  RegressionTree materialize() const {
    std::vector<TreeNode> out;
    std::function<int(int)> copy = [&](int id) -> int {
      const int at = static_cast<int>(out.size());
      out.push_back(nodes[id]);
      if (is_leaf(id)) {
        out[at].kind = SplitKind::kLeaf;
        out[at].feature = -1;
        out[at].threshold = 0.0;
        out[at].left_categories = 0;
        out[at].left = out[at].right = -1;
        return at;
      }
      const int l = copy(nodes[id].left);
      const int r = copy(nodes[id].right);
      out[at].left = l;
      out[at].right = r;
      return at;
    };
    copy(0);
    return RegressionTree(std::move(out));
  }
};

}  // namespace

std::vector<PruneStep> cost_complexity_path(const RegressionTree& tree, const Table& data,
                                            std::span<const double> response,
                                            std::span<const std::size_t> rows) {
  PruneState state{tree.nodes(), std::vector<char>(tree.nodes().size(), 0)};
  // Route the samples to recompute each node's mean, count and RSS.
  std::vector<std::vector<std::size_t>> routed(state.nodes.size());
  for (std::size_t i : rows) {
    int id = 0;
    while (true) {
      routed[id].push_back(i);
      const auto& node = state.nodes[id];
      if (node.is_leaf()) break;
      id = node.goes_left(data.at(i, node.feature)) ? node.left : node.right;
    }
  }
  for (std::size_t id = 0; id < state.nodes.size(); ++id) {
    if (routed[id].empty()) {
      state.nodes[id].count = 0;
      state.nodes[id].rss = 0.0;
      continue;
    }
    const NodeStats s = node_stats(response, routed[id]);
    state.nodes[id].value = s.mean;
    state.nodes[id].count = s.count;
    state.nodes[id].rss = s.rss;
  }

  const double tol = 1e-12 * (1.0 + state.nodes[0].rss);
  auto link_strength = [&](int id) {
    auto [leaf_rss, leaves] = state.subtree(id);
    return (state.nodes[id].rss - leaf_rss) / static_cast<double>(leaves - 1);
  };
  auto collapse_at_most = [&](double level) {
    std::vector<int> internal;
    state.internal_nodes(0, internal);
    std::vector<int> weak;
    for (int id : internal) {
      if (link_strength(id) <= level + tol) weak.push_back(id);
    }
    for (int id : weak) state.collapsed[id] = 1;
    return !weak.empty();
  };

  std::vector<PruneStep> path;
  while (collapse_at_most(0.0)) {
  }
  path.push_back({0.0, state.materialize()});
  while (!state.is_leaf(0)) {
    std::vector<int> internal;
    state.internal_nodes(0, internal);
    double weakest = std::numeric_limits<double>::infinity();
    for (int id : internal) weakest = std::min(weakest, link_strength(id));
    collapse_at_most(weakest);
    path.push_back({std::max(weakest, 0.0), state.materialize()});
  }
  return path;
}

RegressionTree prune(const RegressionTree& tree, double alpha, const Table& data,
                     std::span<const double> response, std::span<const std::size_t> rows) {
  if (!(alpha >= 0.0)) throw ParamError("pruning penalty alpha must be >= 0");
  const auto path = cost_complexity_path(tree, data, response, rows);
  const PruneStep* chosen = &path.front();
  for (const auto& step : path) {
    if (step.alpha <= alpha) chosen = &step;
  }
  return chosen->tree;
}

}  // namespace porosity
