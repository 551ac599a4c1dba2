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

#ifndef DISTFOREST_COHORT_IO_HPP
#define DISTFOREST_COHORT_IO_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "distforest/dataset.hpp"

namespace distforest {

struct PatientRecord {
  std::string id;
  FeatureVector features;
  std::optional<double> odx_score;  // absent for prediction-only inputs
};

/// Header names for each column. Defaults follow the order
/// id, age, tumor_size_cm, p53_pct, sbr_grade, mitotic_grade, er_pct,
/// pr_pct, ki67_pct, lymph_nodes, odx_score.
struct CohortSchema {
  std::string id = "id";
  std::array<std::string, kNumFeatures> features = {
      "age", "tumor_size_cm", "p53_pct", "sbr_grade", "mitotic_grade",
      "er_pct", "pr_pct", "ki67_pct", "lymph_nodes"};
  std::string odx_score = "odx_score";
};

/// Cohort inclusion threshold: ER-positive means er >= 10 %.
inline constexpr double kMinEstrogenReceptorPct = 10.0;

struct RejectedRow {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string column;
  std::string reason;
};

struct PatientTable {
  std::vector<PatientRecord> records;
  std::vector<RejectedRow> rejected;
  std::size_t rows_read = 0;
};

/// Throws std::runtime_error when a required column is missing or the file
/// cannot be read. Row-level problems land in `rejected`.
PatientTable read_patients(std::istream& in, const CohortSchema& schema = {},
                           bool require_response = true);
PatientTable read_patients(const std::filesystem::path& path, const CohortSchema& schema = {},
                           bool require_response = true);

struct CohortLoad {
  Dataset dataset;
  std::vector<RejectedRow> rejected;
  std::size_t rows_read = 0;
};

/// Throws std::runtime_error when no row survives validation.
CohortLoad load_cohort(const std::filesystem::path& path, const CohortSchema& schema = {});
CohortLoad load_cohort(std::istream& in, const CohortSchema& schema = {});

/// CSV with the default schema; numbers in shortest round-trip form.
void write_cohort(const Dataset& data, std::ostream& out);
void write_cohort(const Dataset& data, const std::filesystem::path& path);

/// One reporting category of a marginal table. Continuous bands are sampled
/// uniformly in [lo, hi]; a band with lo == hi is a discrete code.
struct Band {
  std::string label;
  double lo;
  double hi;
  bool hi_inclusive;
  double percent;

  bool discrete() const { return lo == hi; }
};

struct MarginalTable {
  std::string name;
  Feature feature;
  std::vector<Band> bands;

  /// Index of the band a value is reported under.
  std::size_t band_of(double value) const;
};

struct CohortMarginals {
  std::vector<MarginalTable> tables;
  /// Percent of patients below 16, in 16-25 and above 25.
  std::array<double, 3> odx_bands = {};

  /// Published cohort frequencies (333 ER-positive patients).
  static CohortMarginals reference();
};

/// Non-clinical monotone response model for synthetic data:
///   odx = intercept + ki67*ki67 + sbr*(sbr_grade-1) + mitotic*(mitotic_grade-1)
///         + p53*p53 - pr*pr + N(0, noise_sd), clamped to [0, 100].
struct LinkModel {
  double intercept = 8.0;
  double ki67 = 0.30;
  double sbr = 3.0;
  double mitotic = 2.0;
  double p53 = 0.10;
  double pr = 0.10;
  double noise_sd = 3.5;
};

/// Features drawn independently from the marginals, then the response from
/// the link. Deterministic given the seed.
Dataset synth_cohort(const CohortMarginals& marginals, std::size_t n, std::uint64_t seed,
                     const LinkModel& link = {});

/// Cohort summary laid out like the published characteristics table:
/// per-category percentages split by score band.
std::string cohort_report(const Dataset& data, const CohortMarginals& marginals);

}  // namespace distforest

#endif  // DISTFOREST_COHORT_IO_HPP
