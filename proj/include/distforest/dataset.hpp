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

#ifndef DISTFOREST_DATASET_HPP
#define DISTFOREST_DATASET_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace distforest {

/// Slots of the clinico-pathological feature vector, in storage order.
enum class Feature : std::size_t {
  age = 0,        // years
  tumor_size,     // cm
  p53,            // percent
  sbr_grade,      // 1..3
  mitotic_grade,  // 1..3
  er,             // percent
  pr,             // percent
  ki67,           // percent
  lymph_nodes,    // -1 = unknown, 0..3
};

inline constexpr std::size_t kNumFeatures = 9;

/// Recurrence scores live in [0, 100].
inline constexpr double kScoreMin = 0.0;
inline constexpr double kScoreMax = 100.0;

/// Code stored in the lymph_nodes slot when the node status is unknown.
inline constexpr double kLymphNodesUnknown = -1.0;

/// Column name used on the wire and in CSV headers.
std::string_view feature_name(Feature f);
std::optional<Feature> feature_from_name(std::string_view name);

inline constexpr std::size_t index_of(Feature f) { return static_cast<std::size_t>(f); }

struct FeatureVector {
  std::array<double, kNumFeatures> values{};

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](Feature f) const { return values[index_of(f)]; }
  double& operator[](Feature f) { return values[index_of(f)]; }

  bool operator==(const FeatureVector&) const = default;
};

struct FeatureError {
  Feature feature;
  std::string message;  // e.g. "ki67 out of range [0,100]"
};

/// First violated range constraint, if any.
std::optional<FeatureError> validate_features(const FeatureVector& x);

/// Training pairs (X_i, Y_i) with opaque row identifiers.
class Dataset {
 public:
  Dataset() = default;

  /// Throws std::invalid_argument on length mismatch, an empty set, or an
  /// invalid feature/response.
  Dataset(std::vector<FeatureVector> features, std::vector<double> responses,
          std::vector<std::string> ids);

  std::size_t size() const { return responses_.size(); }
  bool empty() const { return responses_.empty(); }

  const FeatureVector& features(std::size_t i) const { return features_[i]; }
  double feature(std::size_t row, std::size_t slot) const { return features_[row][slot]; }
  double response(std::size_t i) const { return responses_[i]; }
  const std::string& id(std::size_t i) const { return ids_[i]; }

  const std::vector<FeatureVector>& all_features() const { return features_; }
  const std::vector<double>& responses() const { return responses_; }
  const std::vector<std::string>& ids() const { return ids_; }

  /// Rows selected by index, in the given order.
  Dataset subset(const std::vector<std::size_t>& rows) const;

  /// FNV-1a over ids, features and responses; hex encoded.
  std::string fingerprint() const;

 private:
  std::vector<FeatureVector> features_;
  std::vector<double> responses_;
  std::vector<std::string> ids_;
};

}  // namespace distforest

#endif  // DISTFOREST_DATASET_HPP
