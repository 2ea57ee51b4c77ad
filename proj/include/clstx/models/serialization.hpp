// Copyright (c) 2026 The clstx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <filesystem>
#include "json.hpp"

#include "clstx/models/config.hpp"
#include "clstx/models/parameters.hpp"

namespace clstx::models {

nlohmann::json to_json(const ModelConfig& cfg);
/// Absent fields keep their defaults; unknown fields are rejected.
ModelConfig model_config_from_json(const nlohmann::json& doc);

struct Checkpoint {
  ModelConfig config;
  ParameterStore<float> params;
};

/// CLSP layout (little-endian): "CLSP", u32 version = 1, u32 variant id,
/// u32 config length + config JSON, u32 tensor count, then per tensor
/// u32 name length + UTF-8 name, u32 rank, rank x u32 extents, f32 data.
void write_checkpoint(const std::filesystem::path& path, const ModelConfig& cfg,
                      const ParameterStore<float>& params);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace clstx::models
