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

// Release gate: one PASS/FAIL line per acceptance criterion, non-zero exit
// if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "distforest/cohort_io.hpp"
#include "distforest/evaluation.hpp"
#include "distforest/model_io.hpp"
#include "distforest/neighbors.hpp"
#include "split_oracle.hpp"
#include "test_support.hpp"

namespace {

using namespace distforest;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const Dataset& cohort() {
  static const Dataset d = synth_cohort(CohortMarginals::reference(), 333, 7);
  return d;
}

Outcome metric_fixture() {
  const ConfusionMatrix cm{231, 49, 20, 33};
  const auto t0 = Clock::now();
  const MetricsReport m = metrics(cm);
  const double elapsed = seconds_since(t0);
  const bool ok = std::abs(*m.accuracy - 0.793) <= 0.001 &&
                  std::abs(*m.sensitivity - 0.920) <= 0.001 &&
                  *m.specificity >= 0.402 - 0.001 && *m.specificity <= 0.403 + 0.001 &&
                  std::abs(*m.ppv - 0.825) <= 0.001 && std::abs(*m.npv - 0.623) <= 0.001 &&
                  std::abs(*m.f1 - 0.870) <= 0.001 && elapsed < 1e-3;
  return {ok, fmt("acc %.4f sens %.4f spec %.4f ppv %.4f npv %.4f f1 %.4f in %.1f us", *m.accuracy,
                  *m.sensitivity, *m.specificity, *m.ppv, *m.npv, *m.f1, elapsed * 1e6)};
}

Outcome crps_oracle() {
  const auto t0 = Clock::now();
  Rng rng(2026);
  std::uniform_real_distribution<double> obs(-5.0, 105.0);
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = testing::random_distribution(rng, 50);
    const double y = trial % 5 == 0 ? d.atoms().back().value : obs(rng);
    worst = std::max(worst, std::abs(crps(d, y) - crps_integral_oracle(d, y)));
  }
  bool degenerate = true;
  for (double point : {0.0, 10.0, 37.25, 100.0}) {
    for (double y : {0.0, 7.0, 37.25, 99.5}) {
      degenerate = degenerate && crps(PredictiveDistribution({{point, 1.0}}), y) == std::abs(y - point);
    }
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-9 && degenerate && elapsed < 1.0,
          fmt("max |closed form - integral| %.2e over 200 samples, point mass exact: %s, %.3f s",
              worst, degenerate ? "yes" : "no", elapsed)};
}

Outcome mean_equivalence() {
  ForestConfig c;
  c.num_trees = 200;
  c.seed = 17;
  const Forest f = fit_forest(cohort(), c);
  Rng rng(18);
  const Dataset queries = testing::random_dataset(rng, 1000);
  double worst_mean = 0, worst_sum = 0;
  bool non_negative = true;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto& x = queries.features(q);
    const WeightVector w = forest_weights(f, x, WeightMode::all_trees());
    for (const auto& e : w.entries) non_negative = non_negative && e.weight >= 0.0;
    worst_sum = std::max(worst_sum, std::abs(w.total() - 1.0));
    worst_mean =
        std::max(worst_mean, std::abs(predict_mean(f, cohort(), x) - weighted_mean(w, cohort())));
  }
  return {worst_mean <= 1e-10 && worst_sum <= 1e-12 && non_negative,
          fmt("max mean gap %.2e, max |sum w - 1| %.2e, 1000 queries, B=200, n=%zu", worst_mean,
              worst_sum, cohort().size())};
}

Outcome oob_purity() {
  ForestConfig c;
  c.num_trees = 500;
  const Forest f = fit_forest(cohort(), c);
  std::size_t contributions = 0, violations = 0;
  for (std::size_t i = 0; i < cohort().size(); ++i) {
    forest_weights(f, cohort().features(i), WeightMode::oob(i), [&](std::size_t b, std::size_t) {
      ++contributions;
      if (f.trees()[b].in_bag(i)) ++violations;
    });
  }
  ForestConfig full = c;
  full.num_trees = 3;
  full.resampling = Resampling::subsample(1.0);
  const auto none = oob_weights_all(fit_forest(cohort(), full), cohort());
  std::size_t flagged = 0;
  for (const auto& w : none) flagged += w ? 0 : 1;
  return {violations == 0 && contributions > 0 && flagged == cohort().size(),
          fmt("%zu tree contributions audited, %zu in-bag; fraction 1.0 flags %zu/%zu rows",
              contributions, violations, flagged, cohort().size())};
}

Outcome split_oracle() {
  Rng rng(909);
  std::vector<std::size_t> features(kNumFeatures);
  for (std::size_t f = 0; f < kNumFeatures; ++f) features[f] = f;
  int mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Dataset d = testing::random_small_dataset(rng, trial);
    TreeConfig tc;
    tc.min_leaf_size = 1 + static_cast<std::size_t>(trial % 3);
    tc.mtry = kNumFeatures;
    const auto got = best_split(testing::all_rows(d), d, features, tc);
    const auto want = testing::exhaustive_best_split(d, tc.min_leaf_size);
    const bool same = got.has_value() == want.has_value() &&
                      (!got || (got->feature == want->feature && got->threshold == want->threshold &&
                                std::abs(got->criterion_gain - want->gain) <= 1e-9));
    if (!same) ++mismatches;
  }
  return {mismatches == 0, fmt("%d/500 datasets disagree with exhaustive enumeration", mismatches)};
}

Outcome end_to_end() {
  const auto t0 = Clock::now();
  const Dataset d = synth_cohort(CohortMarginals::reference(), 333, 7);
  ForestConfig c;  // 2000 trees, half subsamples
  const Forest f = fit_forest(d, c);
  const OobEvaluation eval = oob_evaluate(f, d);
  const double oob = eval.result.report.mean_crps();
  const double baseline = climatological_crps(d);
  const double auc = eval.result.metrics.auc.value_or(0.0);
  const DivergenceReport div = divergence_analysis(eval.result.report, eval.weights, d);
  const double elapsed = seconds_since(t0);
  const auto mis = div.misclassified().odx_score;
  const auto ok_rows = div.correct().odx_score;
  const bool direction = mis && ok_rows && *mis > *ok_rows;
  const double gain = 1.0 - oob / baseline;
  return {gain >= 0.20 && auc >= 0.85 && elapsed < 60.0 && direction,
          fmt("OOB CRPS %.3f vs climatological %.3f (%.1f%% better), AUC %.3f, divergence "
              "misclassified %.2f > correct %.2f, %.1f s",
              oob, baseline, 100 * gain, auc, mis.value_or(NAN), ok_rows.value_or(NAN), elapsed)};
}

Outcome determinism() {
  ForestConfig c;
  c.num_trees = 500;
  c.seed = 7;
  std::ostringstream a, b;
  save_model(fit_forest(cohort(), c), a);
  save_model(fit_forest(cohort(), c), b);
  const bool identical_bytes = a.str() == b.str();

  const Forest original = fit_forest(cohort(), c);
  std::istringstream in(a.str());
  const Forest loaded = load_model(in);
  Rng rng(5);
  const Dataset queries = testing::random_dataset(rng, 100);
  std::size_t differing = 0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto& x = queries.features(q);
    const WeightVector w1 = forest_weights(original, x, WeightMode::all_trees());
    const WeightVector w2 = forest_weights(loaded, x, WeightMode::all_trees());
    if (!(w1 == w2) || predict_mean(original, cohort(), x) != predict_mean(loaded, cohort(), x)) {
      ++differing;
    }
  }
  return {identical_bytes && differing == 0,
          fmt("model files %s (%zu bytes), %zu/100 reloaded predictions differ",
              identical_bytes ? "byte-identical" : "DIFFER", a.str().size(), differing)};
}

Outcome kfold_harness() {
  const auto folds = assign_folds(cohort(), CvConfig{5, 1, true});
  std::vector<std::size_t> sizes(5, 0);
  for (std::size_t f : folds) ++sizes[f];
  const bool sizes_ok = sizes == std::vector<std::size_t>{67, 67, 67, 66, 66};

  ForestConfig c;
  const double oob_acc = *oob_evaluate(fit_forest(cohort(), c), cohort()).result.metrics.accuracy;
  const double cv_acc = *kfold_cv(cohort(), c, CvConfig{5, 1, true}).pooled.metrics.accuracy;
  const double gap = std::abs(oob_acc - cv_acc) * 100;
  return {sizes_ok && gap <= 5.0,
          fmt("fold sizes {%zu,%zu,%zu,%zu,%zu}, CV accuracy %.1f%% vs OOB %.1f%% (gap %.1f points)",
              sizes[0], sizes[1], sizes[2], sizes[3], sizes[4], 100 * cv_acc, 100 * oob_acc, gap)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"metric arithmetic fixture", metric_fixture},
      {"crps oracle suite", crps_oracle},
      {"tree-average and weighted mean agree", mean_equivalence},
      {"out-of-bag purity", oob_purity},
      {"split oracle", split_oracle},
      {"synthetic end to end", end_to_end},
      {"determinism and round trip", determinism},
      {"k-fold harness", kfold_harness},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s  %-40s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
