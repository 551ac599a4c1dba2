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

#ifndef DISTFOREST_NEIGHBORS_HPP
#define DISTFOREST_NEIGHBORS_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "distforest/dataset.hpp"
#include "distforest/evaluation.hpp"
#include "distforest/forest.hpp"

namespace distforest {

inline constexpr std::size_t kDefaultNeighbors = 10;

struct Neighbor {
  std::size_t row;
  double weight;
  FeatureVector features;
  double odx_score;
};

struct NeighborList {
  std::vector<Neighbor> entries;  // weight descending, ties by row
  FeatureVector query;
  std::size_t k = kDefaultNeighbors;
};

/// The k heaviest rows of the weight support.
NeighborList top_neighbors(const WeightVector& weights, const Dataset& data,
                           std::size_t k = kDefaultNeighbors);

/// Weighted averages over the whole weight support.
struct NeighborhoodProfile {
  double odx_score = 0.0;
  double ki67 = 0.0;
  double p53 = 0.0;
  double er = 0.0;
  double pr = 0.0;
  double age = 0.0;
  double tumor_size = 0.0;
};

NeighborhoodProfile neighborhood_profile(const WeightVector& weights, const Dataset& data);

struct RowDivergence {
  std::size_t row;
  bool misclassified;
  double odx_score;  // |patient - neighborhood mean|
  double ki67;
  double p53;
};

struct DivergenceMeans {
  std::size_t count = 0;
  std::optional<double> odx_score;
  std::optional<double> ki67;
  std::optional<double> p53;
};

struct DivergenceReport {
  std::vector<RowDivergence> rows;

  /// Aggregates are recomputed from `rows` on every call.
  DivergenceMeans correct() const;
  DivergenceMeans misclassified() const;
};

/// `oob_weights` is indexed by training row, as returned by oob_weights_all.
/// Throws std::invalid_argument if a reported row has no weights.
DivergenceReport divergence_analysis(const CrpsReport& oob_report,
                                     const std::vector<std::optional<WeightVector>>& oob_weights,
                                     const Dataset& data);

}  // namespace distforest

#endif  // DISTFOREST_NEIGHBORS_HPP
