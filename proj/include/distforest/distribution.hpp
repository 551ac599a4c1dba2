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

#ifndef DISTFOREST_DISTRIBUTION_HPP
#define DISTFOREST_DISTRIBUTION_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "distforest/dataset.hpp"
#include "distforest/forest.hpp"

namespace distforest {

struct Atom {
  double value;
  double weight;
  bool operator==(const Atom&) const = default;
};

/// Weighted empirical distribution of training responses: atoms sorted by
/// strictly increasing value, weights summing to one.
class PredictiveDistribution {
 public:
  /// Sorts and merges equal values. Throws std::invalid_argument on an empty
  /// or negative-weight input.
  explicit PredictiveDistribution(std::vector<Atom> atoms, WeightMode source = {});

  const std::vector<Atom>& atoms() const { return atoms_; }
  const WeightMode& source_mode() const { return source_; }
  double total_mass() const;

 private:
  std::vector<Atom> atoms_;
  WeightMode source_;
};

PredictiveDistribution make_distribution(const WeightVector& weights, const Dataset& data);

/// P(Y <= y), right-continuous.
double cdf(const PredictiveDistribution& dist, double y);

/// Smallest atom value v with cdf(v) >= p. Throws std::invalid_argument
/// unless 0 <= p <= 1.
double quantile(const PredictiveDistribution& dist, double p);

/// Low / intermediate / high recurrence-score bands.
struct RiskClasses {
  double low_cut = 16.0;   // low: score < low_cut
  double high_cut = 25.0;  // high: score > high_cut; binary split is <= high_cut
};

struct ClassProbs {
  double low = 0.0;
  double intermediate = 0.0;
  double high = 0.0;
};

struct BinaryProbs {
  double at_or_below = 0.0;  // P(Y <= high_cut)
  double above = 0.0;
};

struct HistogramBin {
  double lo;
  double hi;
  double mass;
};

inline constexpr std::size_t kDefaultBins = 20;

struct DistributionSummary {
  double mean = 0.0;
  double median = 0.0;
  double std_error = 0.0;
  std::pair<double, double> credible_interval_90;
  ClassProbs class_probs;
  BinaryProbs binary_probs;
  std::vector<HistogramBin> histogram;
};

ClassProbs class_probabilities(const PredictiveDistribution& dist, const RiskClasses& classes);

/// Equal-width bins over [0, 100]; a value on an interior edge belongs to the
/// lower bin. Values outside the range are clamped into the end bins.
std::vector<HistogramBin> histogram(const PredictiveDistribution& dist, std::size_t bins);

/// Throws std::invalid_argument when bins == 0.
DistributionSummary summarize(const PredictiveDistribution& dist, const RiskClasses& classes = {},
                              std::size_t bins = kDefaultBins);

}  // namespace distforest

#endif  // DISTFOREST_DISTRIBUTION_HPP
