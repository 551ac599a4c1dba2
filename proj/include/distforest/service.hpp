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

#ifndef DISTFOREST_SERVICE_HPP
#define DISTFOREST_SERVICE_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "distforest/dataset.hpp"
#include "distforest/distribution.hpp"
#include "distforest/forest.hpp"

namespace httplib {
class Server;
}

namespace distforest {

inline constexpr std::string_view kPredictionSchema = "distforest-prediction/v1";
inline constexpr std::uint16_t kDefaultPort = 8723;

/// A fitted forest with the cohort it was trained on. Immutable once built.
struct ModelContext {
  Forest forest;
  Dataset data;
  std::vector<std::string> warnings;  // e.g. fingerprint mismatch at load
};

struct FieldError {
  std::string field;
  std::string message;
};

/// 400 for malformed input, 422 for well-formed but out-of-range values.
struct RequestError {
  int status;
  std::vector<FieldError> errors;
};

struct PatientQuery {
  FeatureVector features;
  std::size_t k = 10;
  std::size_t bins = kDefaultBins;
  std::vector<std::string> warnings;
};

/// Reads the nine features (lymph_nodes may be null or "NA") plus optional
/// "k" and "bins" from a request document.
std::variant<PatientQuery, RequestError> parse_patient_query(const nlohmann::json& body);

/// Body of a successful /predict response.
nlohmann::json prediction_response(const ModelContext& model, const PatientQuery& query);
/// Body of a successful /neighbors response.
nlohmann::json neighbors_response(const ModelContext& model, const PatientQuery& query);
nlohmann::json model_info(const ModelContext& model);

std::string model_version(const ModelContext& model);

struct HttpReply {
  int status = 200;
  std::string body;
};

/// Stateless request handlers over one loaded model. A null model answers
/// 503 everywhere.
class PredictionService {
 public:
  explicit PredictionService(std::shared_ptr<const ModelContext> model);

  HttpReply predict(std::string_view body) const;
  HttpReply neighbors(std::string_view body) const;
  HttpReply info() const;

  /// Routes under /api/v1 bound to this service.
  std::unique_ptr<httplib::Server> make_server() const;

 private:
  template <typename Build>
  HttpReply answer(std::string_view body, Build&& build) const;

  std::shared_ptr<const ModelContext> model_;
};

}  // namespace distforest

#endif  // DISTFOREST_SERVICE_HPP
