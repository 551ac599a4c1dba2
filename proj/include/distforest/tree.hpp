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

#ifndef DISTFOREST_TREE_HPP
#define DISTFOREST_TREE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "distforest/dataset.hpp"
#include "distforest/rng.hpp"

namespace distforest {

enum class SplitCriterion { variance_reduction };

struct TreeConfig {
  std::size_t min_leaf_size = 5;
  std::optional<std::size_t> max_depth;  // unbounded when empty
  std::size_t mtry = 3;
  SplitCriterion split_criterion = SplitCriterion::variance_reduction;

  /// Throws std::invalid_argument when min_leaf_size or mtry is out of range.
  void validate() const;
};

struct SplitDecision {
  std::size_t feature = 0;
  double threshold = 0.0;
  double criterion_gain = 0.0;  // Var(parent) - nL/n Var(L) - nR/n Var(R)
  std::size_t left_count = 0;
  std::size_t right_count = 0;
};

/// Gains closer than this (relative to the parent variance) are treated as
/// ties, and a split must beat it to count as positive.
inline constexpr double kRelativeGainTolerance = 1e-12;

/// Best variance-reduction split of `rows` over `candidate_features`, with
/// thresholds at midpoints between consecutive distinct values. Ties go to
/// the lowest feature index, then the lowest threshold.
std::optional<SplitDecision> best_split(std::span<const std::size_t> rows, const Dataset& data,
                                        std::span<const std::size_t> candidate_features,
                                        const TreeConfig& config);

/// Arena node. Internal nodes route x to `left` iff x[feature] <= threshold;
/// leaves carry the (sorted) training rows that reached them.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::vector<std::size_t> members;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

class Tree {
 public:
  Tree() = default;

  /// Assembles a tree from stored parts; throws std::invalid_argument if the
  /// arena is malformed or the leaves do not partition `subsample`.
  Tree(std::vector<TreeNode> nodes, std::vector<std::size_t> subsample);

  std::size_t leaf_of(const FeatureVector& x) const;

  const TreeNode& node(std::size_t id) const { return nodes_[id]; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::span<const std::size_t> members(std::size_t leaf) const { return nodes_[leaf].members; }

  /// Sorted; contains repeats when drawn with replacement.
  const std::vector<std::size_t>& subsample() const { return subsample_; }
  bool in_bag(std::size_t row) const;

  std::size_t num_leaves() const;
  std::size_t depth() const;

  bool operator==(const Tree&) const = default;

 private:
  friend Tree fit_tree(const Dataset&, std::vector<std::size_t>, const TreeConfig&, Rng&);

  std::vector<TreeNode> nodes_;
  std::vector<std::size_t> subsample_;
};

/// Grows one tree on `subsample` (row indices into `data`, repeats allowed).
/// Throws std::invalid_argument("empty training subsample") if empty.
Tree fit_tree(const Dataset& data, std::vector<std::size_t> subsample, const TreeConfig& config,
              Rng& rng);

/// Mean response over the leaf that contains x.
double tree_predict_mean(const Tree& tree, const FeatureVector& x, const Dataset& data);

}  // namespace distforest

#endif  // DISTFOREST_TREE_HPP
