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

#ifndef DISTFOREST_REPORT_HPP
#define DISTFOREST_REPORT_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "distforest/distribution.hpp"
#include "distforest/evaluation.hpp"
#include "distforest/neighbors.hpp"

namespace distforest {

/// Confusion matrix followed by the metric column (percentages to one
/// decimal, F1 and AUC to three). Undefined metrics print as "undefined".
std::string format_metrics_block(const ConfusionMatrix& cm, const MetricsReport& m,
                                 const RiskClasses& classes = {});

/// Tab-separated, one row per observation:
/// id, true_score, crps, p_at_or_below, predicted_class, correct
void write_observation_table(const CrpsReport& report, std::ostream& out,
                             const RiskClasses& classes = {});

/// Best, median and worst CRPS rows plus the full ascending listing.
std::string format_crps_listing(const CrpsReport& report, const RiskClasses& classes = {});

std::string format_divergence(const DivergenceReport& report);

nlohmann::json to_json(const DistributionSummary& s);
nlohmann::json to_json(const MetricsReport& m);
nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json to_json(const NeighborList& list);
nlohmann::json to_json(const NeighborhoodProfile& p);
nlohmann::json features_to_json(const FeatureVector& x);

}  // namespace distforest

#endif  // DISTFOREST_REPORT_HPP
