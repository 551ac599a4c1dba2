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

#ifndef DISTFOREST_EVALUATION_HPP
#define DISTFOREST_EVALUATION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distforest/dataset.hpp"
#include "distforest/distribution.hpp"
#include "distforest/forest.hpp"

namespace distforest {

/// Closed form over the atoms:
///   sum_i w_i |y_i - y| - sum_{i<j} w_i w_j |y_i - y_j|
/// evaluated in linear time on the sorted atoms.
double crps(const PredictiveDistribution& dist, double y);

/// Integral of (F(z) - 1{y <= z})^2 dz. The integrand is piecewise constant
/// between consecutive breakpoints (atom values and y), so the integral is
/// summed exactly interval by interval. `grid_step` must be positive; it is
/// kept for interface compatibility with grid-based oracles and does not
/// change the result.
double crps_integral_oracle(const PredictiveDistribution& dist, double y, double grid_step = 1.0);

/// Positive class is "score <= high_cut".
struct ConfusionMatrix {
  std::uint64_t tp = 0;  // true <= cut, predicted <= cut
  std::uint64_t fp = 0;  // true > cut, predicted <= cut
  std::uint64_t fn = 0;  // true <= cut, predicted > cut
  std::uint64_t tn = 0;  // true > cut, predicted > cut

  std::uint64_t total() const { return tp + fp + fn + tn; }
  void add(bool truly_at_or_below, bool predicted_at_or_below);
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Empty optional = undefined (zero denominator or a single class).
struct MetricsReport {
  std::optional<double> accuracy;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> ppv;
  std::optional<double> npv;
  std::optional<double> f1;
  std::optional<double> auc;
};

/// Throws std::invalid_argument when the matrix is empty. `auc` is left unset.
MetricsReport metrics(const ConfusionMatrix& cm);

/// Mann-Whitney AUC: P(score_pos > score_neg) + 0.5 P(tie). Throws
/// std::invalid_argument when one class is missing or lengths differ.
double roc_auc(std::span<const double> scores, const std::vector<bool>& labels);

enum class AucScore {
  probability_above,  // P(Y > high_cut)
  predicted_mean,
};

struct DecisionRule {
  /// Predict "<= high_cut" iff P(Y <= high_cut) >= this.
  double min_probability_at_or_below = 0.5;
  AucScore auc_score = AucScore::probability_above;
};

struct ObservationScore {
  std::size_t row = 0;
  std::string id;
  double true_score = 0.0;
  double crps = 0.0;
  double prob_at_or_below = 0.0;
  double predicted_mean = 0.0;
  bool predicted_at_or_below = false;
  bool misclassified = false;
};

struct CrpsReport {
  std::vector<ObservationScore> per_observation;
  /// Positions into per_observation, crps ascending (ties by row).
  std::vector<std::size_t> sorted_view;

  double mean_crps() const;
};

struct ClassificationResult {
  CrpsReport report;
  ConfusionMatrix confusion;
  MetricsReport metrics;
};

/// Scores one held-out prediction.
ObservationScore score_observation(const PredictiveDistribution& dist, std::size_t row,
                                   const Dataset& data, const RiskClasses& classes,
                                   const DecisionRule& rule);

/// Builds the sorted view, confusion matrix and metrics from scored rows.
ClassificationResult classify(std::vector<ObservationScore> scores, const RiskClasses& classes,
                              const DecisionRule& rule);

struct OobEvaluation {
  ClassificationResult result;
  std::vector<std::string> excluded_ids;  // rows without out-of-bag trees
  std::vector<std::optional<WeightVector>> weights;
};

/// Throws std::runtime_error when no row has an out-of-bag tree.
OobEvaluation oob_evaluate(const Forest& forest, const Dataset& data,
                           const RiskClasses& classes = {}, const DecisionRule& rule = {});

/// Mean CRPS when every row is forecast by the marginal of all responses.
double climatological_crps(const Dataset& data);

struct CvConfig {
  std::size_t k = 5;
  std::uint64_t seed = 1;
  bool stratify_binary = true;
};

/// Fold id per row. Seeded shuffle (within binary class when stratified),
/// then round-robin. Throws std::invalid_argument("k exceeds cohort size").
std::vector<std::size_t> assign_folds(const Dataset& data, const CvConfig& cv,
                                      const RiskClasses& classes = {});

struct KFoldResult {
  std::vector<ClassificationResult> folds;
  ClassificationResult pooled;
  /// Average of the per-fold mean CRPS.
  double mean_fold_crps = 0.0;
  std::vector<std::size_t> fold_of_row;
};

KFoldResult kfold_cv(const Dataset& data, const ForestConfig& config, const CvConfig& cv,
                     const RiskClasses& classes = {}, const DecisionRule& rule = {});

}  // namespace distforest

#endif  // DISTFOREST_EVALUATION_HPP
