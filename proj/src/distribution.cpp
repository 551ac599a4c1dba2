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

#include "distforest/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace distforest {

PredictiveDistribution::PredictiveDistribution(std::vector<Atom> atoms, WeightMode source)
    : source_(source) {
  if (atoms.empty()) throw std::invalid_argument("empty weight support");
  for (const Atom& a : atoms) {
    if (!(a.weight >= 0.0) || !std::isfinite(a.value)) {
      throw std::invalid_argument("atoms need finite values and non-negative weights");
    }
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& a, const Atom& b) { return a.value < b.value; });
  for (const Atom& a : atoms) {
    if (!atoms_.empty() && atoms_.back().value == a.value) {
      atoms_.back().weight += a.weight;
    } else {
      atoms_.push_back(a);
    }
  }
}

double PredictiveDistribution::total_mass() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.weight;
  return s;
}

PredictiveDistribution make_distribution(const WeightVector& weights, const Dataset& data) {
  std::vector<Atom> atoms;
  atoms.reserve(weights.entries.size());
  for (const auto& e : weights.entries) atoms.push_back({data.response(e.row), e.weight});
  return PredictiveDistribution(std::move(atoms), weights.mode);
}

double cdf(const PredictiveDistribution& dist, double y) {
  double mass = 0.0;
  for (const Atom& a : dist.atoms()) {
    if (a.value > y) break;
    mass += a.weight;
  }
  return mass;
}

double quantile(const PredictiveDistribution& dist, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level must be in [0, 1]");
  const auto& atoms = dist.atoms();
  double mass = 0.0;
  for (const Atom& a : atoms) {
    mass += a.weight;
    if (mass >= p) return a.value;
  }
  // Rounding left the running mass a hair under p = 1.
  return atoms.back().value;
}

ClassProbs class_probabilities(const PredictiveDistribution& dist, const RiskClasses& classes) {
  ClassProbs probs;
  for (const Atom& a : dist.atoms()) {
    if (a.value < classes.low_cut) {
      probs.low += a.weight;
    } else if (a.value <= classes.high_cut) {
      probs.intermediate += a.weight;
    } else {
      probs.high += a.weight;
    }
  }
  return probs;
}

std::vector<HistogramBin> histogram(const PredictiveDistribution& dist, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  const double width = (kScoreMax - kScoreMin) / static_cast<double>(bins);
  std::vector<HistogramBin> out(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    out[k] = {kScoreMin + static_cast<double>(k) * width,
              k + 1 == bins ? kScoreMax : kScoreMin + static_cast<double>(k + 1) * width, 0.0};
  }
  for (const Atom& a : dist.atoms()) {
    const double slot = std::ceil((a.value - kScoreMin) / width) - 1.0;
    const auto k = static_cast<std::size_t>(std::clamp(slot, 0.0, static_cast<double>(bins - 1)));
    out[k].mass += a.weight;
  }
  return out;
}

DistributionSummary summarize(const PredictiveDistribution& dist, const RiskClasses& classes,
                              std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  DistributionSummary s;
  for (const Atom& a : dist.atoms()) s.mean += a.weight * a.value;
  double var = 0.0;
  for (const Atom& a : dist.atoms()) var += a.weight * (a.value - s.mean) * (a.value - s.mean);
  s.std_error = std::sqrt(var);
  s.median = quantile(dist, 0.5);
  s.credible_interval_90 = {quantile(dist, 0.05), quantile(dist, 0.95)};
  s.class_probs = class_probabilities(dist, classes);
  s.binary_probs = {s.class_probs.low + s.class_probs.intermediate, s.class_probs.high};
  s.histogram = histogram(dist, bins);
  return s;
}

}  // namespace distforest
