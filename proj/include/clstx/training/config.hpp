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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "clstx/models/config.hpp"
#include "json.hpp"

namespace clstx::training {

struct TrainConfig {
  std::size_t total_steps = 6000;
  std::size_t warmup_steps = 1000;
  double lr_max = 1e-3;
  double cnn_lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-9;
  /// Target number of passes over the training split; sets the batch size.
  std::size_t epochs = 4;
  /// Overrides the derived batch size when nonzero.
  std::size_t batch_size = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Encoder and head learning rate at optimizer step `t` (1-based).
double lr_at(std::size_t t, const TrainConfig& cfg);
/// The same schedule over real-valued time t > 0.
double lr_continuous(double t, const TrainConfig& cfg);

struct BatchPlan {
  std::size_t batch_size = 0;
  /// One entry per optimizer step, holding positions into the training split.
  std::vector<std::vector<std::size_t>> steps;
};

std::size_t derived_batch_size(std::size_t n_train, const TrainConfig& cfg);

/// Reshuffles every epoch and cycles epochs until `total_steps` batches exist.
BatchPlan make_batches(std::size_t n_train, const TrainConfig& cfg, std::uint64_t seed);

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& doc);

struct RunConfig {
  models::ModelConfig model;
  TrainConfig train;
};

/// Parses {"model": {...}, "train": {...}}; either section may be absent.
RunConfig run_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace clstx::training
