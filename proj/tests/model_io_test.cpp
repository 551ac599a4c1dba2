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

#include "distforest/model_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "distforest/cohort_io.hpp"
#include "gtest/gtest.h"
#include "test_support.hpp"

namespace distforest {
namespace {

const Dataset& cohort() {
  static const Dataset d = synth_cohort(CohortMarginals::reference(), 120, 8);
  return d;
}

const Forest& forest() {
  static const Forest f = [] {
    ForestConfig c;
    c.num_trees = 50;
    c.seed = 7;
    c.tree.max_depth = 6;
    return fit_forest(cohort(), c);
  }();
  return f;
}

std::string serialize(const Forest& f) {
  std::ostringstream out;
  save_model(f, out);
  return out.str();
}

Forest parse(const std::string& text) {
  std::istringstream in(text);
  return load_model(in);
}

TEST(ModelIo, RoundTripKeepsTreesAndWeights) {
  const Forest back = parse(serialize(forest()));
  EXPECT_EQ(back.trees(), forest().trees());
  EXPECT_EQ(back.num_rows(), forest().num_rows());
  EXPECT_EQ(back.dataset_fingerprint(), forest().dataset_fingerprint());
  EXPECT_EQ(back.config().seed, 7u);
  EXPECT_EQ(back.config().tree.max_depth, std::optional<std::size_t>(6));

  Rng rng(1);
  const Dataset queries = testing::random_dataset(rng, 100);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    EXPECT_EQ(forest_weights(back, queries.features(q), WeightMode::all_trees()),
              forest_weights(forest(), queries.features(q), WeightMode::all_trees()));
  }
}

TEST(ModelIo, SerializationIsByteStable) {
  ForestConfig c;
  c.num_trees = 30;
  c.resampling = Resampling::bootstrap();
  const std::string a = serialize(fit_forest(cohort(), c));
  const std::string b = serialize(fit_forest_serial(cohort(), c));
  EXPECT_EQ(a, b);
  EXPECT_EQ(serialize(parse(a)), a);
}

TEST(ModelIo, TruncatedFileIsCorrupt) {
  const std::string text = serialize(forest());
  for (std::size_t cut : {text.size() / 2, text.size() - 3, std::size_t{10}}) {
    try {
      parse(text.substr(0, cut));
      FAIL() << "expected an exception at " << cut;
    } catch (const std::runtime_error& e) {
      EXPECT_EQ(std::string(e.what()).rfind("corrupt model file", 0), 0u) << e.what();
    }
  }
}

TEST(ModelIo, StructuralDamageIsCorrupt) {
  auto doc = model_to_json(forest());
  doc["trees"][0]["nodes"]["left"][0] = 9999;
  EXPECT_THROW(model_from_json(doc), std::runtime_error);
  doc = model_to_json(forest());
  doc["num_rows"] = 3;
  EXPECT_THROW(model_from_json(doc), std::runtime_error);
  doc = model_to_json(forest());
  doc["trees"].erase(0);
  EXPECT_THROW(model_from_json(doc), std::runtime_error);
}

TEST(ModelIo, UnknownFieldsAreIgnored) {
  auto doc = model_to_json(forest());
  doc["comment"] = "written by a newer tool";
  doc["config"]["tree"]["extra"] = 1;
  doc["trees"][0]["nodes"]["gain"] = {0.5};
  EXPECT_EQ(model_from_json(doc).trees(), forest().trees());
}

TEST(ModelIo, OtherFormatVersionsAreRefused) {
  auto doc = model_to_json(forest());
  doc["format"] = "distforest-model/v2";
  try {
    model_from_json(doc);
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_EQ(std::string(e.what()), "unsupported model format: distforest-model/v2");
  }
}

TEST(ModelIo, FingerprintWarning) {
  EXPECT_EQ(fingerprint_mismatch(forest(), cohort()), "");
  const Dataset other = synth_cohort(CohortMarginals::reference(), 120, 9);
  EXPECT_NE(fingerprint_mismatch(forest(), other), "");

  const auto path = std::filesystem::temp_directory_path() / "distforest_model_io_test.json";
  save_model(forest(), path);
  EXPECT_TRUE(load_model(path, cohort()).warnings.empty());
  const LoadedModel loaded = load_model(path, other);
  ASSERT_EQ(loaded.warnings.size(), 1u);
  EXPECT_EQ(loaded.forest.trees(), forest().trees());
  std::filesystem::remove(path);
  EXPECT_THROW(load_model(path), std::runtime_error);
}

}  // namespace
}  // namespace distforest
