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

#include <ostream>

#include <fmt/format.h>

namespace distforest {

using nlohmann::json;

namespace {

std::string percent(const std::optional<double>& v) {
  return v ? fmt::format("{:.1f}%", 100.0 * *v) : "undefined";
}

std::string fixed3(const std::optional<double>& v) {
  return v ? fmt::format("{:.3f}", *v) : "undefined";
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string class_label(bool at_or_below, const RiskClasses& classes) {
  return fmt::format("{}{:g}", at_or_below ? "<=" : ">", classes.high_cut);
}

}  // namespace

std::string format_metrics_block(const ConfusionMatrix& cm, const MetricsReport& m,
                                 const RiskClasses& classes) {
  const std::string pos = "ODX" + class_label(true, classes);
  const std::string neg = "ODX" + class_label(false, classes);
  std::string out;
  out += "Confusion matrix (rows: true, columns: predicted)\n";
  out += fmt::format("{:<12}{:>10}{:>10}\n", "", pos, neg);
  out += fmt::format("{:<12}{:>10}{:>10}\n", pos, cm.tp, cm.fn);
  out += fmt::format("{:<12}{:>10}{:>10}\n", neg, cm.fp, cm.tn);
  out += "\n";
  out += fmt::format("{:<28}{:>10}\n", "Accuracy", percent(m.accuracy));
  out += fmt::format("{:<28}{:>10}\n", "Sensitivity", percent(m.sensitivity));
  out += fmt::format("{:<28}{:>10}\n", "Specificity", percent(m.specificity));
  out += fmt::format("{:<28}{:>10}\n", "Positive Predictive Value", percent(m.ppv));
  out += fmt::format("{:<28}{:>10}\n", "Negative Predictive Value", percent(m.npv));
  out += fmt::format("{:<28}{:>10}\n", "F1-score", fixed3(m.f1));
  out += fmt::format("{:<28}{:>10}\n", "Area Under Curve", fixed3(m.auc));
  return out;
}

void write_observation_table(const CrpsReport& report, std::ostream& out,
                             const RiskClasses& classes) {
  out << "id\ttrue_score\tcrps\tp_at_or_below\tpredicted_class\tcorrect\n";
  for (const auto& o : report.per_observation) {
    out << fmt::format("{}\t{:g}\t{:.6f}\t{:.6f}\t{}\t{}\n", o.id, o.true_score, o.crps,
                       o.prob_at_or_below, class_label(o.predicted_at_or_below, classes),
                       o.misclassified ? 0 : 1);
  }
}

std::string format_crps_listing(const CrpsReport& report, const RiskClasses& classes) {
  const auto& view = report.sorted_view;
  if (view.empty()) return "no observations\n";
  auto line = [&](const char* tag, std::size_t pos) {
    const auto& o = report.per_observation[view[pos]];
    return fmt::format("{:<8}{:<14}crps={:8.3f}  true={:6.2f}  P(<={:g})={:.3f}  {}\n", tag, o.id,
                       o.crps, o.true_score, classes.high_cut, o.prob_at_or_below,
                       o.misclassified ? "MISCLASSIFIED" : "correct");
  };
  std::string out = fmt::format("Mean CRPS {:.4f} over {} observations\n", report.mean_crps(),
                                view.size());
  out += line("best", 0);
  out += line("median", view.size() / 2);
  out += line("worst", view.size() - 1);
  out += "\nrank\tid\tcrps\tmisclassified\n";
  for (std::size_t r = 0; r < view.size(); ++r) {
    const auto& o = report.per_observation[view[r]];
    out += fmt::format("{}\t{}\t{:.6f}\t{}\n", r + 1, o.id, o.crps, o.misclassified ? 1 : 0);
  }
  return out;
}

std::string format_divergence(const DivergenceReport& report) {
  auto row = [](const char* name, const DivergenceMeans& m) {
    auto num = [](const std::optional<double>& v) {
      return v ? fmt::format("{:.2f}", *v) : std::string("undefined");
    };
    return fmt::format("{:<16}{:>6}{:>10}{:>10}{:>10}\n", name, m.count, num(m.odx_score),
                       num(m.ki67), num(m.p53));
  };
  std::string out = "Mean |patient - neighborhood| by classification outcome\n";
  out += fmt::format("{:<16}{:>6}{:>10}{:>10}{:>10}\n", "", "n", "ODX", "Ki67", "p53");
  out += row("correct", report.correct());
  out += row("misclassified", report.misclassified());
  return out;
}

json to_json(const DistributionSummary& s) {
  json hist = json::array();
  for (const auto& b : s.histogram) hist.push_back({{"lo", b.lo}, {"hi", b.hi}, {"mass", b.mass}});
  return {
      {"mean", s.mean},
      {"median", s.median},
      {"std_error", s.std_error},
      {"credible_interval_90", {{"lo", s.credible_interval_90.first}, {"hi", s.credible_interval_90.second}}},
      {"class_probs",
       {{"low", s.class_probs.low},
        {"intermediate", s.class_probs.intermediate},
        {"high", s.class_probs.high}}},
      {"binary_probs", {{"at_or_below_25", s.binary_probs.at_or_below}, {"above_25", s.binary_probs.above}}},
      {"histogram", std::move(hist)},
  };
}

json to_json(const MetricsReport& m) {
  return {{"accuracy", optional_number(m.accuracy)},   {"sensitivity", optional_number(m.sensitivity)},
          {"specificity", optional_number(m.specificity)}, {"ppv", optional_number(m.ppv)},
          {"npv", optional_number(m.npv)},             {"f1", optional_number(m.f1)},
          {"auc", optional_number(m.auc)}};
}

json to_json(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
}

json features_to_json(const FeatureVector& x) {
  json out = json::object();
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    const auto feature = static_cast<Feature>(f);
    if (feature == Feature::lymph_nodes && x[f] == kLymphNodesUnknown) {
      out[std::string(feature_name(feature))] = nullptr;
    } else {
      out[std::string(feature_name(feature))] = x[f];
    }
  }
  return out;
}

json to_json(const NeighborList& list) {
  json out = json::array();
  for (std::size_t r = 0; r < list.entries.size(); ++r) {
    const auto& n = list.entries[r];
    // Row index only; cohort identifiers never leave the process.
    out.push_back({{"rank", r + 1},
                   {"row", n.row},
                   {"weight", n.weight},
                   {"features", features_to_json(n.features)},
                   {"odx_score", n.odx_score}});
  }
  return out;
}

json to_json(const NeighborhoodProfile& p) {
  return {{"odx_score", p.odx_score}, {"ki67_pct", p.ki67}, {"p53_pct", p.p53},
          {"er_pct", p.er},           {"pr_pct", p.pr},     {"age", p.age},
          {"tumor_size_cm", p.tumor_size}};
}

}  // namespace distforest
