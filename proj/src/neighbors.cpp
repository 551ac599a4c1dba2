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

#include "distforest/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace distforest {

NeighborList top_neighbors(const WeightVector& weights, const Dataset& data, std::size_t k) {
  std::vector<WeightEntry> ranked;
  for (const auto& e : weights.entries) {
    if (e.weight > 0.0) ranked.push_back(e);
  }
  const std::size_t keep = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                    [](const WeightEntry& a, const WeightEntry& b) {
                      if (a.weight != b.weight) return a.weight > b.weight;
                      return a.row < b.row;
                    });
  NeighborList out;
  out.query = weights.query;
  out.k = k;
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t r = ranked[i].row;
    out.entries.push_back({r, ranked[i].weight, data.features(r), data.response(r)});
  }
  return out;
}

NeighborhoodProfile neighborhood_profile(const WeightVector& weights, const Dataset& data) {
  NeighborhoodProfile p;
  for (const auto& [row, w] : weights.entries) {
    const FeatureVector& x = data.features(row);
    p.odx_score += w * data.response(row);
    p.ki67 += w * x[Feature::ki67];
    p.p53 += w * x[Feature::p53];
    p.er += w * x[Feature::er];
    p.pr += w * x[Feature::pr];
    p.age += w * x[Feature::age];
    p.tumor_size += w * x[Feature::tumor_size];
  }
  return p;
}

namespace {

DivergenceMeans mean_of(const std::vector<RowDivergence>& rows, bool misclassified) {
  DivergenceMeans m;
  double odx = 0.0, ki67 = 0.0, p53 = 0.0;
  for (const auto& r : rows) {
    if (r.misclassified != misclassified) continue;
    ++m.count;
    odx += r.odx_score;
    ki67 += r.ki67;
    p53 += r.p53;
  }
  if (m.count > 0) {
    const auto n = static_cast<double>(m.count);
    m.odx_score = odx / n;
    m.ki67 = ki67 / n;
    m.p53 = p53 / n;
  }
  return m;
}

}  // namespace

DivergenceMeans DivergenceReport::correct() const { return mean_of(rows, false); }
DivergenceMeans DivergenceReport::misclassified() const { return mean_of(rows, true); }

DivergenceReport divergence_analysis(const CrpsReport& oob_report,
                                     const std::vector<std::optional<WeightVector>>& oob_weights,
                                     const Dataset& data) {
  DivergenceReport out;
  for (const auto& obs : oob_report.per_observation) {
    if (obs.row >= oob_weights.size() || !oob_weights[obs.row]) {
      throw std::invalid_argument("no out-of-bag weights for row " + obs.id);
    }
    const NeighborhoodProfile p = neighborhood_profile(*oob_weights[obs.row], data);
    const FeatureVector& x = data.features(obs.row);
    out.rows.push_back({obs.row, obs.misclassified, std::abs(data.response(obs.row) - p.odx_score),
                        std::abs(x[Feature::ki67] - p.ki67), std::abs(x[Feature::p53] - p.p53)});
  }
  return out;
}

}  // namespace distforest
