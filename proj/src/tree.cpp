/*
 * Copyright 2026 The distforest Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "distforest/tree.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace distforest {

void TreeConfig::validate() const {
  if (min_leaf_size < 1) throw std::invalid_argument("min_leaf_size must be >= 1");
  if (mtry < 1 || mtry > kNumFeatures) throw std::invalid_argument("mtry must be in [1, 9]");
}

std::optional<SplitDecision> best_split(std::span<const std::size_t> rows, const Dataset& data,
                                        std::span<const std::size_t> candidate_features,
                                        const TreeConfig& config) {
  const std::size_t n = rows.size();
  const std::size_t min_leaf = std::max<std::size_t>(config.min_leaf_size, 1);
  if (n < 2 * min_leaf) return std::nullopt;

  double mean = 0.0;
  for (std::size_t r : rows) mean += data.response(r);
  mean /= static_cast<double>(n);
  double parent_sse = 0.0;
  for (std::size_t r : rows) {
    const double d = data.response(r) - mean;
    parent_sse += d * d;
  }
  if (parent_sse <= 0.0) return std::nullopt;
  const double parent_var = parent_sse / static_cast<double>(n);
  const double tolerance = kRelativeGainTolerance * parent_var;

  std::vector<std::size_t> features(candidate_features.begin(), candidate_features.end());
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());

  // (feature value, centred response), sorted by value then by position
  std::vector<std::pair<double, double>> column(n);
  std::optional<SplitDecision> best;

  for (std::size_t f : features) {
    for (std::size_t k = 0; k < n; ++k) {
      column[k] = {data.feature(rows[k], f), data.response(rows[k]) - mean};
    }
    std::stable_sort(column.begin(), column.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    if (column.front().first == column.back().first) continue;

    double total_sum = 0.0, total_sq = 0.0;
    for (const auto& [v, y] : column) {
      total_sum += y;
      total_sq += y * y;
    }

    double left_sum = 0.0, left_sq = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      left_sum += column[k].second;
      left_sq += column[k].second * column[k].second;
      if (column[k].first == column[k + 1].first) continue;
      const std::size_t n_left = k + 1;
      const std::size_t n_right = n - n_left;
      if (n_left < min_leaf) continue;
      if (n_right < min_leaf) break;

      const double right_sum = total_sum - left_sum;
      const double right_sq = total_sq - left_sq;
      const double left_sse = left_sq - left_sum * left_sum / static_cast<double>(n_left);
      const double right_sse = right_sq - right_sum * right_sum / static_cast<double>(n_right);
      const double gain = (parent_sse - left_sse - right_sse) / static_cast<double>(n);

      if (gain <= tolerance) continue;
      if (best && gain <= best->criterion_gain + tolerance) continue;
      best = SplitDecision{f, 0.5 * (column[k].first + column[k + 1].first), gain, n_left,
                           n_right};
    }
  }
  return best;
}

Tree::Tree(std::vector<TreeNode> nodes, std::vector<std::size_t> subsample)
    : nodes_(std::move(nodes)), subsample_(std::move(subsample)) {
  if (nodes_.empty()) throw std::invalid_argument("tree has no nodes");
  if (!std::is_sorted(subsample_.begin(), subsample_.end())) {
    throw std::invalid_argument("tree subsample is not sorted");
  }
  // Every node must be reached exactly once from the root.
  std::vector<int> seen(nodes_.size(), 0);
  std::vector<std::size_t> stack = {0};
  std::vector<std::size_t> leaf_rows;
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    if (seen[id]++) throw std::invalid_argument("tree node reached twice");
    const TreeNode& node = nodes_[id];
    if (node.is_leaf()) {
      if (node.members.empty()) throw std::invalid_argument("empty leaf");
      leaf_rows.insert(leaf_rows.end(), node.members.begin(), node.members.end());
      continue;
    }
    if (static_cast<std::size_t>(node.feature) >= kNumFeatures) {
      throw std::invalid_argument("split feature out of range");
    }
    for (std::int32_t child : {node.left, node.right}) {
      if (child <= 0 || static_cast<std::size_t>(child) >= nodes_.size()) {
        throw std::invalid_argument("child id out of range");
      }
      stack.push_back(static_cast<std::size_t>(child));
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw std::invalid_argument("unreachable tree node");
  }
  std::sort(leaf_rows.begin(), leaf_rows.end());
  if (leaf_rows != subsample_) throw std::invalid_argument("leaves do not partition subsample");
}

std::size_t Tree::leaf_of(const FeatureVector& x) const {
  std::size_t id = 0;
  while (!nodes_[id].is_leaf()) {
    const TreeNode& node = nodes_[id];
    id = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold
                                      ? node.left
                                      : node.right);
  }
  return id;
}

bool Tree::in_bag(std::size_t row) const {
  return std::binary_search(subsample_.begin(), subsample_.end(), row);
}

std::size_t Tree::num_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t Tree::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack = {{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes_[id].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes_[id].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes_[id].right), d + 1);
    }
  }
  return deepest;
}

Tree fit_tree(const Dataset& data, std::vector<std::size_t> subsample, const TreeConfig& config,
              Rng& rng) {
  if (subsample.empty()) throw std::invalid_argument("empty training subsample");
  config.validate();
  std::sort(subsample.begin(), subsample.end());

  Tree tree;
  tree.subsample_ = subsample;
  tree.nodes_.push_back(TreeNode{});

  struct Pending {
    std::size_t node;
    std::size_t depth;
    std::vector<std::size_t> rows;
  };
  std::vector<Pending> stack;
  stack.push_back({0, 0, std::move(subsample)});

  std::array<std::size_t, kNumFeatures> pool{};
  std::iota(pool.begin(), pool.end(), std::size_t{0});

  while (!stack.empty()) {
    Pending cur = std::move(stack.back());
    stack.pop_back();

    auto make_leaf = [&] { tree.nodes_[cur.node].members = std::move(cur.rows); };

    if (cur.rows.size() < 2 * config.min_leaf_size ||
        (config.max_depth && cur.depth >= *config.max_depth)) {
      make_leaf();
      continue;
    }

    // Partial Fisher-Yates: the first mtry slots become the candidates.
    for (std::size_t k = 0; k < config.mtry; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, kNumFeatures - 1);
      std::swap(pool[k], pool[pick(rng)]);
    }
    const auto split = best_split(cur.rows, data, std::span(pool.data(), config.mtry), config);
    if (!split) {
      make_leaf();
      continue;
    }

    std::vector<std::size_t> left, right;
    left.reserve(split->left_count);
    right.reserve(split->right_count);
    for (std::size_t r : cur.rows) {
      (data.feature(r, split->feature) <= split->threshold ? left : right).push_back(r);
    }

    const auto left_id = static_cast<std::int32_t>(tree.nodes_.size());
    tree.nodes_.push_back(TreeNode{});
    tree.nodes_.push_back(TreeNode{});
    TreeNode& node = tree.nodes_[cur.node];
    node.feature = static_cast<std::int32_t>(split->feature);
    node.threshold = split->threshold;
    node.left = left_id;
    node.right = left_id + 1;

    stack.push_back({static_cast<std::size_t>(left_id + 1), cur.depth + 1, std::move(right)});
    stack.push_back({static_cast<std::size_t>(left_id), cur.depth + 1, std::move(left)});
  }
  return tree;
}

double tree_predict_mean(const Tree& tree, const FeatureVector& x, const Dataset& data) {
  const auto rows = tree.members(tree.leaf_of(x));
  double sum = 0.0;
  for (std::size_t r : rows) sum += data.response(r);
  return sum / static_cast<double>(rows.size());
}

}  // namespace distforest
