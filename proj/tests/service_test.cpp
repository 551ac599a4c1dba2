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

#include <thread>

#include "distforest/cohort_io.hpp"
#include "distforest/model_io.hpp"
#include "distforest/report.hpp"
#include "gtest/gtest.h"
#include "test_support.hpp"

namespace distforest {
namespace {

using nlohmann::json;

std::shared_ptr<const ModelContext> model() {
  static const auto ctx = [] {
    Dataset data = synth_cohort(CohortMarginals::reference(), 200, 21);
    ForestConfig c;
    c.num_trees = 200;
    c.seed = 3;
    Forest f = fit_forest(data, c);
    return std::make_shared<const ModelContext>(ModelContext{std::move(f), std::move(data), {}});
  }();
  return ctx;
}

json patient_json(const FeatureVector& x) { return features_to_json(x); }

json typical() { return patient_json(testing::typical_patient()); }

std::vector<std::string> error_fields(const HttpReply& r) {
  const json body = json::parse(r.body);
  std::vector<std::string> out;
  for (const auto& e : body.at("errors")) out.push_back(e.at("field"));
  return out;
}

TEST(ParsePatientQuery, AcceptsAWellFormedBody) {
  json body = typical();
  body["lymph_nodes"] = nullptr;
  body["k"] = 3;
  body["bins"] = 10;
  const auto q = std::get<PatientQuery>(parse_patient_query(body));
  EXPECT_EQ(q.features[Feature::lymph_nodes], kLymphNodesUnknown);
  EXPECT_EQ(q.features[Feature::ki67], 20);
  EXPECT_EQ(q.k, 3u);
  EXPECT_EQ(q.bins, 10u);
  body["lymph_nodes"] = "NA";
  EXPECT_TRUE(std::holds_alternative<PatientQuery>(parse_patient_query(body)));
}

TEST(ParsePatientQuery, MalformedIs400WithFieldErrors) {
  json body = typical();
  body.erase("age");
  body["ki67_pct"] = "high";
  body["k"] = 0;
  const auto err = std::get<RequestError>(parse_patient_query(body));
  EXPECT_EQ(err.status, 400);
  ASSERT_EQ(err.errors.size(), 3u);
  EXPECT_EQ(err.errors[0].field, "age");
  EXPECT_EQ(err.errors[1].field, "ki67_pct");
  EXPECT_EQ(err.errors[2].field, "k");
  EXPECT_EQ(std::get<RequestError>(parse_patient_query(json::array())).status, 400);
  body = typical();
  body["bins"] = 5000;
  EXPECT_EQ(std::get<RequestError>(parse_patient_query(body)).status, 400);
}

TEST(ParsePatientQuery, OutOfRangeIs422) {
  json body = typical();
  body["ki67_pct"] = 250;
  const auto err = std::get<RequestError>(parse_patient_query(body));
  EXPECT_EQ(err.status, 422);
  ASSERT_EQ(err.errors.size(), 1u);
  EXPECT_EQ(err.errors[0].field, "ki67_pct");
  EXPECT_NE(err.errors[0].message.find("ki67 out of range [0,100]"), std::string::npos);

  body = typical();
  body["er_pct"] = 4;
  EXPECT_EQ(std::get<RequestError>(parse_patient_query(body)).status, 422);
  body = typical();
  body["sbr_grade"] = 2.5;
  EXPECT_EQ(std::get<RequestError>(parse_patient_query(body)).status, 422);
}

TEST(ParsePatientQuery, ResponseInRequestIsIgnored) {
  json body = typical();
  body["odx_score"] = 30;
  const auto q = std::get<PatientQuery>(parse_patient_query(body));
  ASSERT_EQ(q.warnings.size(), 1u);
}

TEST(Service, PredictBody) {
  const PredictionService service(model());
  const HttpReply r = service.predict(typical().dump());
  ASSERT_EQ(r.status, 200) << r.body;
  const json body = json::parse(r.body);
  EXPECT_EQ(body["schema"], kPredictionSchema);
  EXPECT_EQ(body["model_version"], model_version(*model()));
  const json& s = body["summary"];
  const double at_or_below = s["binary_probs"]["at_or_below_25"];
  const double above = s["binary_probs"]["above_25"];
  EXPECT_NEAR(at_or_below + above, 1.0, 1e-12);
  const json& c = s["class_probs"];
  EXPECT_NEAR(c["low"].get<double>() + c["intermediate"].get<double>() + c["high"].get<double>(),
              1.0, 1e-12);
  double mass = 0;
  for (const auto& bin : body["histogram"]) mass += bin["mass"].get<double>();
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_EQ(body["histogram"].size(), kDefaultBins);
  EXPECT_EQ(body["neighbors"].size(), 10u);
  EXPECT_NEAR(s["mean"].get<double>(),
              predict_mean(model()->forest, model()->data, testing::typical_patient()), 1e-10);
}

TEST(Service, IdenticalRequestsIdenticalResponses) {
  const PredictionService service(model());
  EXPECT_EQ(service.predict(typical().dump()).body, service.predict(typical().dump()).body);
  EXPECT_EQ(service.neighbors(typical().dump()).body, service.neighbors(typical().dump()).body);
}

TEST(Service, TrainingPatientIsItsOwnNearestNeighbor) {
  const PredictionService service(model());
  for (std::size_t row : {0u, 17u, 123u}) {
    const HttpReply r = service.neighbors(patient_json(model()->data.features(row)).dump());
    ASSERT_EQ(r.status, 200);
    const json body = json::parse(r.body);
    EXPECT_EQ(body["neighbors"][0]["row"], row);
    EXPECT_EQ(body["neighbors"][0]["rank"], 1);
  }
}

TEST(Service, NeighborsRespectK) {
  const PredictionService service(model());
  json req = typical();
  req["k"] = 3;
  const json body = json::parse(service.neighbors(req.dump()).body);
  ASSERT_LE(body["neighbors"].size(), 3u);
  double previous = 2.0;
  for (const auto& n : body["neighbors"]) {
    EXPECT_LE(n["weight"].get<double>(), previous);
    previous = n["weight"];
  }
  EXPECT_EQ(body["k"], 3);
  EXPECT_TRUE(body["profile"].contains("odx_score"));
}

TEST(Service, InfoMatchesTheModel) {
  const PredictionService service(model());
  const json body = json::parse(service.info().body);
  EXPECT_EQ(body["num_trees"], model()->forest.num_trees());
  EXPECT_EQ(body["num_rows"], model()->forest.num_rows());
  EXPECT_EQ(body["dataset_fingerprint"], model()->data.fingerprint());
  EXPECT_EQ(body["config"], model_to_json(model()->forest)["config"]);
  EXPECT_EQ(body["feature_schema"].size(), kNumFeatures);
}

TEST(Service, ErrorStatuses) {
  const PredictionService service(model());
  EXPECT_EQ(service.predict("{not json").status, 400);
  json bad = typical();
  bad["ki67_pct"] = 250;
  const HttpReply r = service.predict(bad.dump());
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(error_fields(r), std::vector<std::string>{"ki67_pct"});

  const PredictionService empty(nullptr);
  EXPECT_EQ(empty.predict(typical().dump()).status, 503);
  EXPECT_EQ(empty.neighbors(typical().dump()).status, 503);
  EXPECT_EQ(empty.info().status, 503);
}

TEST(Service, HttpRoundTrip) {
  const PredictionService service(model());
  auto server = service.make_server();
  const int port = server->bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread loop([&] { server->listen_after_bind(); });

  httplib::Client client("127.0.0.1", port);
  auto predicted = client.Post("/api/v1/predict", typical().dump(), "application/json");
  auto info = client.Get("/api/v1/model/info");
  json bad = typical();
  bad["age"] = -1;
  auto rejected = client.Post("/api/v1/neighbors", bad.dump(), "application/json");
  auto missing = client.Get("/api/v1/predict");
  server->stop();
  loop.join();

  ASSERT_TRUE(predicted);
  EXPECT_EQ(predicted->status, 200);
  EXPECT_EQ(predicted->get_header_value("Content-Type"), "application/json");
  EXPECT_EQ(predicted->body, service.predict(typical().dump()).body);
  ASSERT_TRUE(info);
  EXPECT_EQ(info->status, 200);
  ASSERT_TRUE(rejected);
  EXPECT_EQ(rejected->status, 422);
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
}

}  // namespace
}  // namespace distforest
