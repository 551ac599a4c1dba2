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

#ifndef DISTFOREST_MODEL_IO_HPP
#define DISTFOREST_MODEL_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "distforest/dataset.hpp"
#include "distforest/forest.hpp"

namespace distforest {

inline constexpr std::string_view kModelFormat = "distforest-model/v1";

/// Self-describing JSON document: format tag, config, dataset fingerprint,
/// row count, and every tree (node arrays, leaf members, subsample).
nlohmann::json model_to_json(const Forest& forest);

/// Throws std::runtime_error("unsupported model format: ...") for a wrong
/// tag and std::runtime_error("corrupt model file: ...") for anything
/// structurally invalid. Unknown extra fields are ignored.
Forest model_from_json(const nlohmann::json& doc);

void save_model(const Forest& forest, std::ostream& out);
void save_model(const Forest& forest, const std::filesystem::path& path);

struct LoadedModel {
  Forest forest;
  std::vector<std::string> warnings;
};

Forest load_model(std::istream& in);
Forest load_model(const std::filesystem::path& path);

/// As load_model, and warns when the model was not fit on `data`.
LoadedModel load_model(const std::filesystem::path& path, const Dataset& data);

/// Empty when `forest` was fit on `data`, otherwise a warning message.
std::string fingerprint_mismatch(const Forest& forest, const Dataset& data);

}  // namespace distforest

#endif  // DISTFOREST_MODEL_IO_HPP
