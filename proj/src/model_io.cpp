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

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace distforest {

using nlohmann::json;

namespace {

json config_to_json(const ForestConfig& c) {
  json resampling;
  if (c.resampling.kind == Resampling::Kind::bootstrap_with_replacement) {
    resampling = {{"kind", "bootstrap"}};
  } else {
    resampling = {{"kind", "subsample"}, {"fraction", c.resampling.fraction}};
  }
  return {
      {"num_trees", c.num_trees},
      {"seed", c.seed},
      {"resampling", resampling},
      {"tree",
       {{"min_leaf_size", c.tree.min_leaf_size},
        {"max_depth", c.tree.max_depth ? json(*c.tree.max_depth) : json(nullptr)},
        {"mtry", c.tree.mtry},
        {"split_criterion", "variance_reduction"}}},
  };
}

ForestConfig config_from_json(const json& j) {
  ForestConfig c;
  c.num_trees = j.at("num_trees").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  const json& r = j.at("resampling");
  const auto kind = r.at("kind").get<std::string>();
  if (kind == "bootstrap") {
    c.resampling = Resampling::bootstrap();
  } else if (kind == "subsample") {
    c.resampling = Resampling::subsample(r.at("fraction").get<double>());
  } else {
    throw std::runtime_error("unknown resampling kind " + kind);
  }
  const json& t = j.at("tree");
  c.tree.min_leaf_size = t.at("min_leaf_size").get<std::size_t>();
  if (!t.at("max_depth").is_null()) c.tree.max_depth = t.at("max_depth").get<std::size_t>();
  c.tree.mtry = t.at("mtry").get<std::size_t>();
  if (t.at("split_criterion").get<std::string>() != "variance_reduction") {
    throw std::runtime_error("unknown split criterion");
  }
  c.validate();
  return c;
}

json tree_to_json(const Tree& tree) {
  json feature = json::array(), threshold = json::array(), left = json::array(),
       right = json::array(), members = json::array();
  for (const TreeNode& n : tree.nodes()) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    members.push_back(n.members);
  }
  return {{"subsample", tree.subsample()},
          {"nodes",
           {{"feature", feature},
            {"threshold", threshold},
            {"left", left},
            {"right", right},
            {"members", members}}}};
}

Tree tree_from_json(const json& j) {
  const json& nodes = j.at("nodes");
  const auto feature = nodes.at("feature").get<std::vector<std::int32_t>>();
  const auto threshold = nodes.at("threshold").get<std::vector<double>>();
  const auto left = nodes.at("left").get<std::vector<std::int32_t>>();
  const auto right = nodes.at("right").get<std::vector<std::int32_t>>();
  auto members = nodes.at("members").get<std::vector<std::vector<std::size_t>>>();
  const std::size_t count = feature.size();
  if (threshold.size() != count || left.size() != count || right.size() != count ||
      members.size() != count) {
    throw std::runtime_error("node arrays differ in length");
  }
  std::vector<TreeNode> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = {feature[i], threshold[i], left[i], right[i], std::move(members[i])};
  }
  return Tree(std::move(out), j.at("subsample").get<std::vector<std::size_t>>());
}

}  // namespace

json model_to_json(const Forest& forest) {
  json trees = json::array();
  for (const Tree& t : forest.trees()) trees.push_back(tree_to_json(t));
  return {{"format", kModelFormat},
          {"config", config_to_json(forest.config())},
          {"dataset_fingerprint", forest.dataset_fingerprint()},
          {"num_rows", forest.num_rows()},
          {"trees", std::move(trees)}};
}

Forest model_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("format")) {
    throw std::runtime_error("corrupt model file: missing format tag");
  }
  const json& tag = doc.at("format");
  if (!tag.is_string() || tag.get<std::string>() != kModelFormat) {
    throw std::runtime_error("unsupported model format: " +
                             (tag.is_string() ? tag.get<std::string>() : tag.dump()));
  }
  try {
    ForestConfig config = config_from_json(doc.at("config"));
    std::vector<Tree> trees;
    for (const json& t : doc.at("trees")) trees.push_back(tree_from_json(t));
    return Forest(std::move(config), std::move(trees),
                  doc.at("dataset_fingerprint").get<std::string>(),
                  doc.at("num_rows").get<std::size_t>());
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("corrupt model file: ") + e.what());
  }
}

void save_model(const Forest& forest, std::ostream& out) { out << model_to_json(forest).dump() << '\n'; }

void save_model(const Forest& forest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  save_model(forest, out);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Forest load_model(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("corrupt model file: ") + e.what());
  }
  return model_from_json(doc);
}

Forest load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_model(in);
}

std::string fingerprint_mismatch(const Forest& forest, const Dataset& data) {
  const std::string actual = data.fingerprint();
  if (actual == forest.dataset_fingerprint() && data.size() == forest.num_rows()) return {};
  std::ostringstream msg;
  msg << "model was fit on dataset " << forest.dataset_fingerprint() << " (" << forest.num_rows()
      << " rows) but the supplied cohort is " << actual << " (" << data.size() << " rows)";
  return msg.str();
}

LoadedModel load_model(const std::filesystem::path& path, const Dataset& data) {
  LoadedModel out{load_model(path), {}};
  if (auto warning = fingerprint_mismatch(out.forest, data); !warning.empty()) {
    out.warnings.push_back(std::move(warning));
  }
  return out;
}

}  // namespace distforest
