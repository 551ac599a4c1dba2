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

#ifndef DISTFOREST_FOREST_HPP
#define DISTFOREST_FOREST_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "distforest/dataset.hpp"
#include "distforest/tree.hpp"

namespace distforest {

struct Resampling {
  enum class Kind { bootstrap_with_replacement, subsample_without_replacement };
  Kind kind = Kind::subsample_without_replacement;
  double fraction = 0.5;  // only used for subsampling, in (0, 1]

  static Resampling bootstrap() { return {Kind::bootstrap_with_replacement, 1.0}; }
  static Resampling subsample(double fraction) {
    return {Kind::subsample_without_replacement, fraction};
  }
  bool operator==(const Resampling&) const = default;
};

struct ForestConfig {
  std::size_t num_trees = 2000;
  Resampling resampling;
  TreeConfig tree;
  std::uint64_t seed = 42;

  void validate() const;
};

class Forest {
 public:
  Forest(ForestConfig config, std::vector<Tree> trees, std::string dataset_fingerprint,
         std::size_t num_rows);

  const ForestConfig& config() const { return config_; }
  const std::vector<Tree>& trees() const { return trees_; }
  std::size_t num_trees() const { return trees_.size(); }
  /// Number of rows of the training set the trees index into.
  std::size_t num_rows() const { return num_rows_; }
  const std::string& dataset_fingerprint() const { return fingerprint_; }

 private:
  ForestConfig config_;
  std::vector<Tree> trees_;
  std::string fingerprint_;
  std::size_t num_rows_ = 0;
};

/// Row indices for one tree's training set, sorted; consumes `rng`.
std::vector<std::size_t> draw_resample(std::size_t n, const Resampling& resampling, Rng& rng);

/// Independent stream for one tree, a pure function of (seed, tree_index).
Rng tree_rng(std::uint64_t seed, std::size_t tree_index);

/// Fits the trees concurrently (OpenMP). Identical output to fit_forest_serial.
Forest fit_forest(const Dataset& data, const ForestConfig& config);
/// Reference implementation, one tree after another.
Forest fit_forest_serial(const Dataset& data, const ForestConfig& config);

struct WeightMode {
  enum class Kind { all_trees, oob };
  Kind kind = Kind::all_trees;
  std::size_t excluded_index = 0;

  static WeightMode all_trees() { return {}; }
  static WeightMode oob(std::size_t row) { return {Kind::oob, row}; }
  bool operator==(const WeightMode&) const = default;
};

struct WeightEntry {
  std::size_t row;
  double weight;
  bool operator==(const WeightEntry&) const = default;
};

/// Sparse forest weights w_i(x), sorted by row, all strictly positive.
struct WeightVector {
  std::vector<WeightEntry> entries;
  FeatureVector query;
  WeightMode mode;
  std::size_t trees_used = 0;

  double total() const;
  double weight_of(std::size_t row) const;
  bool operator==(const WeightVector&) const = default;
};

/// Called once per tree that contributes to a weight vector.
using TreeVisitor = std::function<void(std::size_t tree, std::size_t leaf)>;

/// Throws std::runtime_error("no out-of-bag trees for observation") in oob
/// mode when every tree holds the excluded row.
WeightVector forest_weights(const Forest& forest, const FeatureVector& x, WeightMode mode,
                            const TreeVisitor& visit = {});

/// Average of the per-tree leaf means.
double predict_mean(const Forest& forest, const Dataset& data, const FeatureVector& x);

/// Sum of w_i * Y_i.
double weighted_mean(const WeightVector& weights, const Dataset& data);

/// Out-of-bag weights for every training row; rows without any out-of-bag
/// tree are left empty. Rows are processed concurrently.
std::vector<std::optional<WeightVector>> oob_weights_all(const Forest& forest, const Dataset& data);
std::vector<std::optional<WeightVector>> oob_weights_all_serial(const Forest& forest,
                                                                const Dataset& data);

}  // namespace distforest

#endif  // DISTFOREST_FOREST_HPP
