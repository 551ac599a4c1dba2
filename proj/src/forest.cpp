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

#include "distforest/forest.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>

namespace distforest {

void ForestConfig::validate() const {
  if (num_trees < 1) throw std::invalid_argument("num_trees must be >= 1");
  if (resampling.kind == Resampling::Kind::subsample_without_replacement &&
      !(resampling.fraction > 0.0 && resampling.fraction <= 1.0)) {
    throw std::invalid_argument("subsample fraction must be in (0, 1]");
  }
  tree.validate();
}

Forest::Forest(ForestConfig config, std::vector<Tree> trees, std::string dataset_fingerprint,
               std::size_t num_rows)
    : config_(std::move(config)),
      trees_(std::move(trees)),
      fingerprint_(std::move(dataset_fingerprint)),
      num_rows_(num_rows) {
  if (trees_.size() != config_.num_trees) {
    throw std::invalid_argument("forest tree count does not match its config");
  }
  for (const Tree& t : trees_) {
    if (!t.subsample().empty() && t.subsample().back() >= num_rows_) {
      throw std::invalid_argument("tree subsample indexes past the training set");
    }
  }
}

Rng tree_rng(std::uint64_t seed, std::size_t tree_index) {
  const auto b = static_cast<std::uint64_t>(tree_index);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

std::vector<std::size_t> draw_resample(std::size_t n, const Resampling& resampling, Rng& rng) {
  std::vector<std::size_t> rows;
  if (resampling.kind == Resampling::Kind::bootstrap_with_replacement) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    rows.resize(n);
    for (auto& r : rows) r = pick(rng);
  } else {
    const auto m = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(resampling.fraction * static_cast<double>(n))), 1, n);
    rows.resize(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    for (std::size_t k = 0; k < m; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, n - 1);
      std::swap(rows[k], rows[pick(rng)]);
    }
    rows.resize(m);
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

namespace {

Tree fit_one(const Dataset& data, const ForestConfig& config, std::size_t b) {
  Rng rng = tree_rng(config.seed, b);
  auto rows = draw_resample(data.size(), config.resampling, rng);
  return fit_tree(data, std::move(rows), config.tree, rng);
}

void check_fit_inputs(const Dataset& data, const ForestConfig& config) {
  if (data.empty()) throw std::invalid_argument("empty dataset");
  config.validate();
}

}  // namespace

Forest fit_forest_serial(const Dataset& data, const ForestConfig& config) {
  check_fit_inputs(data, config);
  std::vector<Tree> trees;
  trees.reserve(config.num_trees);
  for (std::size_t b = 0; b < config.num_trees; ++b) trees.push_back(fit_one(data, config, b));
  return Forest(config, std::move(trees), data.fingerprint(), data.size());
}

Forest fit_forest(const Dataset& data, const ForestConfig& config) {
  check_fit_inputs(data, config);
  std::vector<Tree> trees(config.num_trees);
  const auto num_trees = static_cast<std::int64_t>(config.num_trees);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t b = 0; b < num_trees; ++b) {
    try {
      trees[static_cast<std::size_t>(b)] = fit_one(data, config, static_cast<std::size_t>(b));
    } catch (...) {
#pragma omp critical(distforest_fit_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return Forest(config, std::move(trees), data.fingerprint(), data.size());
}

double WeightVector::total() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.weight;
  return s;
}

double WeightVector::weight_of(std::size_t row) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), row,
                             [](const WeightEntry& e, std::size_t r) { return e.row < r; });
  return (it != entries.end() && it->row == row) ? it->weight : 0.0;
}

WeightVector forest_weights(const Forest& forest, const FeatureVector& x, WeightMode mode,
                            const TreeVisitor& visit) {
  std::vector<long double> acc(forest.num_rows(), 0.0L);
  std::size_t used = 0;
  const auto& trees = forest.trees();
  for (std::size_t b = 0; b < trees.size(); ++b) {
    const Tree& tree = trees[b];
    if (mode.kind == WeightMode::Kind::oob && tree.in_bag(mode.excluded_index)) continue;
    const std::size_t leaf = tree.leaf_of(x);
    const auto members = tree.members(leaf);
    const long double share = 1.0L / static_cast<long double>(members.size());
    for (std::size_t r : members) acc[r] += share;
    ++used;
    if (visit) visit(b, leaf);
  }
  if (used == 0) throw std::runtime_error("no out-of-bag trees for observation");

  WeightVector out;
  out.query = x;
  out.mode = mode;
  out.trees_used = used;
  const long double scale = 1.0L / static_cast<long double>(used);
  for (std::size_t r = 0; r < acc.size(); ++r) {
    if (acc[r] > 0.0L) out.entries.push_back({r, static_cast<double>(acc[r] * scale)});
  }
  return out;
}

double predict_mean(const Forest& forest, const Dataset& data, const FeatureVector& x) {
  double sum = 0.0;
  for (const Tree& tree : forest.trees()) sum += tree_predict_mean(tree, x, data);
  return sum / static_cast<double>(forest.num_trees());
}

double weighted_mean(const WeightVector& weights, const Dataset& data) {
  double sum = 0.0;
  for (const auto& e : weights.entries) sum += e.weight * data.response(e.row);
  return sum;
}

namespace {

std::optional<WeightVector> oob_row(const Forest& forest, const Dataset& data, std::size_t i) {
  const bool any_oob = std::any_of(forest.trees().begin(), forest.trees().end(),
                                   [i](const Tree& t) { return !t.in_bag(i); });
  if (!any_oob) return std::nullopt;
  return forest_weights(forest, data.features(i), WeightMode::oob(i));
}

}  // namespace

std::vector<std::optional<WeightVector>> oob_weights_all_serial(const Forest& forest,
                                                                const Dataset& data) {
  std::vector<std::optional<WeightVector>> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = oob_row(forest, data, i);
  return out;
}

std::vector<std::optional<WeightVector>> oob_weights_all(const Forest& forest, const Dataset& data) {
  std::vector<std::optional<WeightVector>> out(data.size());
  const auto n = static_cast<std::int64_t>(data.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = oob_row(forest, data, static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace distforest
