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

#include "distforest/service.hpp"

#include <httplib.h>

#include "distforest/cohort_io.hpp"
#include "distforest/model_io.hpp"
#include "distforest/neighbors.hpp"
#include "distforest/report.hpp"

namespace distforest {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxBins = 1000;

json error_body(const std::vector<FieldError>& errors) {
  json list = json::array();
  for (const auto& e : errors) list.push_back({{"field", e.field}, {"message", e.message}});
  return {{"errors", std::move(list)}};
}

std::string_view short_range(Feature f) {
  switch (f) {
    case Feature::age: return "> 0 years";
    case Feature::tumor_size: return "> 0 cm";
    case Feature::sbr_grade:
    case Feature::mitotic_grade: return "1, 2 or 3";
    case Feature::lymph_nodes: return "null (unknown), 0, 1, 2 or 3";
    case Feature::er: return "10 to 100 percent";
    default: return "0 to 100 percent";
  }
}

std::optional<std::size_t> positive_count(const json& v) {
  if (v.is_number_unsigned() && v.get<std::uint64_t>() >= 1) return v.get<std::size_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 1) return v.get<std::size_t>();
  return std::nullopt;
}

}  // namespace

std::variant<PatientQuery, RequestError> parse_patient_query(const json& body) {
  if (!body.is_object()) return RequestError{400, {{"", "request body must be a JSON object"}}};

  PatientQuery q;
  std::vector<FieldError> malformed;
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    const auto feature = static_cast<Feature>(f);
    const std::string name(feature_name(feature));
    auto it = body.find(name);
    if (it == body.end()) {
      if (feature == Feature::lymph_nodes) {
        malformed.push_back({name, "required (use null for unknown)"});
      } else {
        malformed.push_back({name, "required"});
      }
      continue;
    }
    if (feature == Feature::lymph_nodes &&
        (it->is_null() || (it->is_string() && it->get<std::string>() == "NA"))) {
      q.features[f] = kLymphNodesUnknown;
    } else if (it->is_number()) {
      q.features[f] = it->get<double>();
    } else {
      malformed.push_back({name, "must be a number"});
    }
  }
  if (auto it = body.find("k"); it != body.end()) {
    if (auto k = positive_count(*it)) {
      q.k = *k;
    } else {
      malformed.push_back({"k", "must be a positive integer"});
    }
  }
  if (auto it = body.find("bins"); it != body.end()) {
    auto bins = positive_count(*it);
    if (bins && *bins <= kMaxBins) {
      q.bins = *bins;
    } else {
      malformed.push_back({"bins", "must be an integer in [1, 1000]"});
    }
  }
  if (!malformed.empty()) return RequestError{400, std::move(malformed)};

  if (auto err = validate_features(q.features)) {
    const std::string field(feature_name(err->feature));
    return RequestError{422, {{field, err->message + " (expected " +
                                          std::string(short_range(err->feature)) + ")"}}};
  }
  if (q.features[Feature::er] < kMinEstrogenReceptorPct) {
    return RequestError{422, {{std::string(feature_name(Feature::er)),
                               "er below 10%: the model covers ER-positive patients only"}}};
  }
  if (body.contains("odx_score")) q.warnings.push_back("odx_score in request ignored");
  return q;
}

std::string model_version(const ModelContext& model) {
  return std::string(kModelFormat) + "+" + model.forest.dataset_fingerprint();
}

json prediction_response(const ModelContext& model, const PatientQuery& query) {
  const WeightVector w = forest_weights(model.forest, query.features, WeightMode::all_trees());
  const DistributionSummary summary =
      summarize(make_distribution(w, model.data), RiskClasses{}, query.bins);
  json body = to_json(summary);
  json histogram = std::move(body["histogram"]);
  body.erase("histogram");

  json warnings = json::array();
  for (const auto& msg : model.warnings) warnings.push_back(msg);
  for (const auto& msg : query.warnings) warnings.push_back(msg);

  return {{"schema", kPredictionSchema},
          {"model_version", model_version(model)},
          {"query", features_to_json(query.features)},
          {"summary", std::move(body)},
          {"histogram", std::move(histogram)},
          {"neighbors", to_json(top_neighbors(w, model.data, query.k))},
          {"warnings", std::move(warnings)}};
}

json neighbors_response(const ModelContext& model, const PatientQuery& query) {
  const WeightVector w = forest_weights(model.forest, query.features, WeightMode::all_trees());
  return {{"schema", kPredictionSchema},
          {"model_version", model_version(model)},
          {"k", query.k},
          {"support_size", w.entries.size()},
          {"neighbors", to_json(top_neighbors(w, model.data, query.k))},
          {"profile", to_json(neighborhood_profile(w, model.data))}};
}

json model_info(const ModelContext& model) {
  const ForestConfig& c = model.forest.config();
  json schema = json::array();
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    const auto feature = static_cast<Feature>(f);
    schema.push_back({{"name", feature_name(feature)}, {"range", short_range(feature)}});
  }
  json config = model_to_json(model.forest)["config"];
  return {{"model_version", model_version(model)},
          {"format", kModelFormat},
          {"num_trees", model.forest.num_trees()},
          {"num_rows", model.forest.num_rows()},
          {"seed", c.seed},
          {"dataset_fingerprint", model.forest.dataset_fingerprint()},
          {"config", std::move(config)},
          {"feature_schema", std::move(schema)},
          {"warnings", model.warnings}};
}

PredictionService::PredictionService(std::shared_ptr<const ModelContext> model)
    : model_(std::move(model)) {}

template <typename Build>
HttpReply PredictionService::answer(std::string_view body, Build&& build) const {
  if (!model_) return {503, error_body({{"", "model not loaded"}}).dump()};
  const json doc = json::parse(body.begin(), body.end(), nullptr, false);
  if (doc.is_discarded()) return {400, error_body({{"", "body is not valid JSON"}}).dump()};
  auto parsed = parse_patient_query(doc);
  if (auto* err = std::get_if<RequestError>(&parsed)) {
    return {err->status, error_body(err->errors).dump()};
  }
  return {200, build(*model_, std::get<PatientQuery>(parsed)).dump()};
}

HttpReply PredictionService::predict(std::string_view body) const {
  return answer(body, prediction_response);
}

HttpReply PredictionService::neighbors(std::string_view body) const {
  return answer(body, neighbors_response);
}

HttpReply PredictionService::info() const {
  if (!model_) return {503, error_body({{"", "model not loaded"}}).dump()};
  return {200, model_info(*model_).dump()};
}

std::unique_ptr<httplib::Server> PredictionService::make_server() const {
  auto server = std::make_unique<httplib::Server>();
  auto reply = [](httplib::Response& res, const HttpReply& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server->Post("/api/v1/predict", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, predict(req.body));
  });
  server->Post("/api/v1/neighbors",
               [this, reply](const httplib::Request& req, httplib::Response& res) {
                 reply(res, neighbors(req.body));
               });
  server->Get("/api/v1/model/info", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, info());
  });
  return server;
}

}  // namespace distforest
