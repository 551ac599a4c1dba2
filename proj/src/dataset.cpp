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

#include "distforest/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace distforest {

namespace {

constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "age", "tumor_size_cm", "p53_pct", "sbr_grade", "mitotic_grade",
    "er_pct", "pr_pct", "ki67_pct", "lymph_nodes"};

bool is_grade(double v) { return v == 1.0 || v == 2.0 || v == 3.0; }

bool is_percent(double v) { return v >= 0.0 && v <= 100.0; }

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  void number(double v) {
    // -0.0 and 0.0 hash alike
    const auto bits = std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v);
    bytes(&bits, sizeof bits);
  }
  void text(const std::string& s) {
    const std::uint64_t len = s.size();
    bytes(&len, sizeof len);
    bytes(s.data(), s.size());
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace

std::string_view feature_name(Feature f) { return kFeatureNames[index_of(f)]; }

std::optional<Feature> feature_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (kFeatureNames[i] == name) return static_cast<Feature>(i);
  }
  return std::nullopt;
}

std::optional<FeatureError> validate_features(const FeatureVector& x) {
  // Messages use the short clinical names rather than the CSV headers.
  static constexpr std::array<std::string_view, kNumFeatures> kShort = {
      "age", "tumor_size", "p53", "sbr_grade", "mitotic_grade", "er", "pr", "ki67", "lymph_nodes"};
  auto fail = [](Feature f, std::string_view what) {
    return FeatureError{f, std::string(kShort[index_of(f)]) + std::string(what)};
  };
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (!std::isfinite(x[i])) return fail(static_cast<Feature>(i), " is not a finite number");
  }
  if (!(x[Feature::age] > 0.0)) return fail(Feature::age, " must be > 0");
  if (!(x[Feature::tumor_size] > 0.0)) return fail(Feature::tumor_size, " must be > 0");
  for (Feature f : {Feature::p53, Feature::er, Feature::pr, Feature::ki67}) {
    if (!is_percent(x[f])) return fail(f, " out of range [0,100]");
  }
  for (Feature f : {Feature::sbr_grade, Feature::mitotic_grade}) {
    if (!is_grade(x[f])) return fail(f, " must be 1, 2 or 3");
  }
  const double nodes = x[Feature::lymph_nodes];
  if (!(nodes == kLymphNodesUnknown || nodes == 0.0 || nodes == 1.0 || nodes == 2.0 ||
        nodes == 3.0)) {
    return fail(Feature::lymph_nodes, " must be NA, 0, 1, 2 or 3");
  }
  return std::nullopt;
}

Dataset::Dataset(std::vector<FeatureVector> features, std::vector<double> responses,
                 std::vector<std::string> ids)
    : features_(std::move(features)), responses_(std::move(responses)), ids_(std::move(ids)) {
  if (features_.size() != responses_.size() || features_.size() != ids_.size()) {
    throw std::invalid_argument("dataset columns have different lengths");
  }
  if (responses_.empty()) throw std::invalid_argument("empty dataset");
  for (std::size_t i = 0; i < size(); ++i) {
    if (auto err = validate_features(features_[i])) {
      throw std::invalid_argument("row " + ids_[i] + ": " + err->message);
    }
    if (!(responses_[i] >= 0.0 && responses_[i] <= 100.0)) {
      throw std::invalid_argument("row " + ids_[i] + ": odx_score out of range [0,100]");
    }
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  std::vector<FeatureVector> f;
  std::vector<double> y;
  std::vector<std::string> ids;
  f.reserve(rows.size());
  y.reserve(rows.size());
  ids.reserve(rows.size());
  for (std::size_t r : rows) {
    f.push_back(features_.at(r));
    y.push_back(responses_.at(r));
    ids.push_back(ids_.at(r));
  }
  return Dataset(std::move(f), std::move(y), std::move(ids));
}

std::string Dataset::fingerprint() const {
  Fnv1a h;
  const std::uint64_t n = size();
  h.bytes(&n, sizeof n);
  for (std::size_t i = 0; i < size(); ++i) {
    h.text(ids_[i]);
    for (double v : features_[i].values) h.number(v);
    h.number(responses_[i]);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h.value()));
  return buf;
}

}  // namespace distforest
