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

#include "distforest/report.hpp"

#include <sstream>

#include "gtest/gtest.h"
#include "test_support.hpp"

namespace distforest {
namespace {

using nlohmann::json;

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

TEST(MetricsBlock, ReferenceMatrixRendersRoundedPercentages) {
  const ConfusionMatrix cm{231, 49, 20, 33};
  MetricsReport m = metrics(cm);
  m.auc = 0.759;
  const std::string text = format_metrics_block(cm, m);
  EXPECT_TRUE(contains(text, "Accuracy                         79.3%")) << text;
  EXPECT_TRUE(contains(text, "92.0%"));
  EXPECT_TRUE(contains(text, "40.2%"));
  EXPECT_TRUE(contains(text, "82.5%"));
  EXPECT_TRUE(contains(text, "62.3%"));
  EXPECT_TRUE(contains(text, "0.870"));
  EXPECT_TRUE(contains(text, "0.759"));
  EXPECT_TRUE(contains(text, "ODX<=25            231        20"));
  EXPECT_TRUE(contains(text, "ODX>25              49        33"));
}

TEST(MetricsBlock, UndefinedMetricsSaySo) {
  const ConfusionMatrix cm{5, 0, 0, 0};
  const std::string text = format_metrics_block(cm, metrics(cm));
  EXPECT_TRUE(contains(text, "Specificity                  undefined")) << text;
  EXPECT_TRUE(contains(text, "Area Under Curve             undefined"));
  const json j = to_json(metrics(cm));
  EXPECT_TRUE(j["specificity"].is_null());
  EXPECT_EQ(j["accuracy"], 1.0);
}

CrpsReport three_rows() {
  std::vector<ObservationScore> obs(3);
  const double c[] = {2.0, 0.5, 9.0};
  for (std::size_t i = 0; i < 3; ++i) {
    obs[i].row = i;
    obs[i].id = "P" + std::to_string(i);
    obs[i].true_score = 10.0 * static_cast<double>(i + 1);
    obs[i].crps = c[i];
    obs[i].prob_at_or_below = 0.9;
    obs[i].predicted_at_or_below = true;
    obs[i].misclassified = i == 2;
  }
  return classify(obs, RiskClasses{}, DecisionRule{}).report;
}

TEST(ObservationTable, OneLinePerRow) {
  std::ostringstream out;
  write_observation_table(three_rows(), out);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_TRUE(contains(text, "id\ttrue_score\tcrps\tp_at_or_below\tpredicted_class\tcorrect\n"));
  EXPECT_TRUE(contains(text, "P2\t30\t9.000000\t0.900000\t<=25\t0\n")) << text;
}

TEST(CrpsListing, BestMedianWorst) {
  const std::string text = format_crps_listing(three_rows());
  EXPECT_TRUE(contains(text, "best    P1")) << text;
  EXPECT_TRUE(contains(text, "median  P0"));
  EXPECT_TRUE(contains(text, "worst   P2"));
  EXPECT_TRUE(contains(text, "1\tP1\t0.500000\t0\n"));
  EXPECT_TRUE(contains(text, "3\tP2\t9.000000\t1\n"));
  EXPECT_EQ(format_crps_listing(CrpsReport{}), "no observations\n");
}

TEST(Divergence, TableShowsBothGroups) {
  DivergenceReport r;
  r.rows.push_back({0, false, 4.0, 1.0, 2.0});
  r.rows.push_back({1, true, 18.0, 3.0, 1.0});
  const std::string text = format_divergence(r);
  EXPECT_TRUE(contains(text, "correct")) << text;
  EXPECT_TRUE(contains(text, "4.00"));
  EXPECT_TRUE(contains(text, "18.00"));
}

TEST(Json, FeaturesUseWireNamesAndNullForUnknownNodes) {
  FeatureVector x = testing::typical_patient();
  x[Feature::lymph_nodes] = kLymphNodesUnknown;
  const json j = features_to_json(x);
  EXPECT_EQ(j.size(), kNumFeatures);
  EXPECT_EQ(j["ki67_pct"], 20);
  EXPECT_EQ(j["tumor_size_cm"], 1.5);
  EXPECT_TRUE(j["lymph_nodes"].is_null());
}

TEST(Json, SummaryKeys) {
  const auto s = summarize(PredictiveDistribution({{10, 0.5}, {30, 0.5}}), RiskClasses{}, 4);
  const json j = to_json(s);
  EXPECT_EQ(j["binary_probs"]["at_or_below_25"], 0.5);
  EXPECT_EQ(j["binary_probs"]["above_25"], 0.5);
  EXPECT_EQ(j["credible_interval_90"]["lo"], 10);
  EXPECT_EQ(j["credible_interval_90"]["hi"], 30);
  EXPECT_EQ(j["histogram"].size(), 4u);
  EXPECT_EQ(j["histogram"][0]["mass"], 0.5);
}

}  // namespace
}  // namespace distforest
