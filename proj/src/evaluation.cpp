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

#include "distforest/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace distforest {

double crps(const PredictiveDistribution& dist, double y) {
  double spread_to_obs = 0.0;
  double pairwise = 0.0;
  double mass_below = 0.0;
  double moment_below = 0.0;
  for (const Atom& a : dist.atoms()) {
    spread_to_obs += a.weight * std::abs(a.value - y);
    // atoms are sorted, so |v_j - v_i| = v_j - v_i for every earlier i
    pairwise += a.weight * (a.value * mass_below - moment_below);
    mass_below += a.weight;
    moment_below += a.weight * a.value;
  }
  return std::max(0.0, spread_to_obs - pairwise);
}

double crps_integral_oracle(const PredictiveDistribution& dist, double y, double grid_step) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_step must be positive");
  std::vector<double> breaks;
  breaks.reserve(dist.atoms().size() + 1);
  for (const Atom& a : dist.atoms()) breaks.push_back(a.value);
  breaks.push_back(y);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  // Left of the first break and right of the last the integrand is zero.
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double z = breaks[k];
    double f = 0.0;
    for (const Atom& a : dist.atoms()) {
      if (a.value <= z) f += a.weight;
    }
    const double step = y <= z ? 1.0 : 0.0;
    integral += (f - step) * (f - step) * (breaks[k + 1] - z);
  }
  return integral;
}

void ConfusionMatrix::add(bool truly_at_or_below, bool predicted_at_or_below) {
  if (truly_at_or_below) {
    ++(predicted_at_or_below ? tp : fn);
  } else {
    ++(predicted_at_or_below ? fp : tn);
  }
}

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("empty confusion matrix");
  MetricsReport m;
  m.accuracy = ratio(cm.tp + cm.tn, cm.total());
  m.sensitivity = ratio(cm.tp, cm.tp + cm.fn);
  m.specificity = ratio(cm.tn, cm.fp + cm.tn);
  m.ppv = ratio(cm.tp, cm.tp + cm.fp);
  m.npv = ratio(cm.tn, cm.fn + cm.tn);
  if (m.ppv && m.sensitivity && *m.ppv + *m.sensitivity > 0.0) {
    m.f1 = 2.0 * *m.ppv * *m.sensitivity / (*m.ppv + *m.sensitivity);
  }
  return m;
}

double roc_auc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Rank-sum form with mid-ranks for ties.
  double positive_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo;
    while (hi < n && scores[order[hi]] == scores[order[lo]]) ++hi;
    const double mid_rank = 0.5 * static_cast<double>(lo + 1 + hi);
    for (std::size_t k = lo; k < hi; ++k) {
      if (labels[order[k]]) {
        positive_rank_sum += mid_rank;
        ++n_pos;
      }
    }
    lo = hi;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("AUC needs both classes present");
  const double pos = static_cast<double>(n_pos);
  return (positive_rank_sum - pos * (pos + 1.0) / 2.0) / (pos * static_cast<double>(n_neg));
}

double CrpsReport::mean_crps() const {
  if (per_observation.empty()) return 0.0;
  double s = 0.0;
  for (const auto& o : per_observation) s += o.crps;
  return s / static_cast<double>(per_observation.size());
}

ObservationScore score_observation(const PredictiveDistribution& dist, std::size_t row,
                                   const Dataset& data, const RiskClasses& classes,
                                   const DecisionRule& rule) {
  ObservationScore s;
  s.row = row;
  s.id = data.id(row);
  s.true_score = data.response(row);
  s.crps = crps(dist, s.true_score);
  const ClassProbs probs = class_probabilities(dist, classes);
  s.prob_at_or_below = probs.low + probs.intermediate;
  for (const Atom& a : dist.atoms()) s.predicted_mean += a.weight * a.value;
  s.predicted_at_or_below = s.prob_at_or_below >= rule.min_probability_at_or_below;
  s.misclassified = s.predicted_at_or_below != (s.true_score <= classes.high_cut);
  return s;
}

ClassificationResult classify(std::vector<ObservationScore> scores, const RiskClasses& classes,
                              const DecisionRule& rule) {
  ClassificationResult out;
  out.report.per_observation = std::move(scores);
  const auto& obs = out.report.per_observation;

  out.report.sorted_view.resize(obs.size());
  std::iota(out.report.sorted_view.begin(), out.report.sorted_view.end(), std::size_t{0});
  std::sort(out.report.sorted_view.begin(), out.report.sorted_view.end(),
            [&](std::size_t a, std::size_t b) {
              if (obs[a].crps != obs[b].crps) return obs[a].crps < obs[b].crps;
              return obs[a].row < obs[b].row;
            });

  std::vector<double> auc_scores;
  std::vector<bool> above;
  for (const auto& o : obs) {
    const bool truly_at_or_below = o.true_score <= classes.high_cut;
    out.confusion.add(truly_at_or_below, o.predicted_at_or_below);
    auc_scores.push_back(rule.auc_score == AucScore::probability_above ? 1.0 - o.prob_at_or_below
                                                                       : o.predicted_mean);
    above.push_back(!truly_at_or_below);
  }
  if (out.confusion.total() > 0) out.metrics = metrics(out.confusion);

  const auto n_above = static_cast<std::size_t>(std::count(above.begin(), above.end(), true));
  if (n_above > 0 && n_above < above.size()) out.metrics.auc = roc_auc(auc_scores, above);
  return out;
}

OobEvaluation oob_evaluate(const Forest& forest, const Dataset& data, const RiskClasses& classes,
                           const DecisionRule& rule) {
  OobEvaluation out;
  out.weights = oob_weights_all(forest, data);
  std::vector<ObservationScore> scores;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!out.weights[i]) {
      out.excluded_ids.push_back(data.id(i));
      continue;
    }
    scores.push_back(
        score_observation(make_distribution(*out.weights[i], data), i, data, classes, rule));
  }
  if (scores.empty()) {
    throw std::runtime_error("no out-of-bag trees for any observation: metrics undefined");
  }
  out.result = classify(std::move(scores), classes, rule);
  return out;
}

double climatological_crps(const Dataset& data) {
  const double w = 1.0 / static_cast<double>(data.size());
  std::vector<Atom> atoms;
  atoms.reserve(data.size());
  for (double y : data.responses()) atoms.push_back({y, w});
  const PredictiveDistribution marginal(std::move(atoms));
  double total = 0.0;
  for (double y : data.responses()) total += crps(marginal, y);
  return total / static_cast<double>(data.size());
}

std::vector<std::size_t> assign_folds(const Dataset& data, const CvConfig& cv,
                                      const RiskClasses& classes) {
  if (cv.k > data.size()) throw std::invalid_argument("k exceeds cohort size");
  if (cv.k < 2) throw std::invalid_argument("k must be at least 2");

  Rng rng(cv.seed);
  std::vector<std::size_t> sequence;
  if (cv.stratify_binary) {
    std::vector<std::size_t> at_or_below, above;
    for (std::size_t i = 0; i < data.size(); ++i) {
      (data.response(i) <= classes.high_cut ? at_or_below : above).push_back(i);
    }
    std::shuffle(at_or_below.begin(), at_or_below.end(), rng);
    std::shuffle(above.begin(), above.end(), rng);
    sequence = std::move(at_or_below);
    sequence.insert(sequence.end(), above.begin(), above.end());
  } else {
    sequence.resize(data.size());
    std::iota(sequence.begin(), sequence.end(), std::size_t{0});
    std::shuffle(sequence.begin(), sequence.end(), rng);
  }
  std::vector<std::size_t> fold(data.size());
  for (std::size_t p = 0; p < sequence.size(); ++p) fold[sequence[p]] = p % cv.k;
  return fold;
}

KFoldResult kfold_cv(const Dataset& data, const ForestConfig& config, const CvConfig& cv,
                     const RiskClasses& classes, const DecisionRule& rule) {
  KFoldResult out;
  out.fold_of_row = assign_folds(data, cv, classes);

  std::vector<ObservationScore> pooled;
  for (std::size_t f = 0; f < cv.k; ++f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
      (out.fold_of_row[i] == f ? test_rows : train_rows).push_back(i);
    }
    const Dataset train = data.subset(train_rows);
    const Forest forest = fit_forest(train, config);

    std::vector<ObservationScore> scores;
    for (std::size_t row : test_rows) {
      const WeightVector w = forest_weights(forest, data.features(row), WeightMode::all_trees());
      scores.push_back(score_observation(make_distribution(w, train), row, data, classes, rule));
    }
    pooled.insert(pooled.end(), scores.begin(), scores.end());
    out.folds.push_back(classify(std::move(scores), classes, rule));
    out.mean_fold_crps += out.folds.back().report.mean_crps();
  }
  out.mean_fold_crps /= static_cast<double>(cv.k);
  std::sort(pooled.begin(), pooled.end(),
            [](const ObservationScore& a, const ObservationScore& b) { return a.row < b.row; });
  out.pooled = classify(std::move(pooled), classes, rule);
  return out;
}

}  // namespace distforest
