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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "clstx/data/embedding_store.hpp"
#include "clstx/models/config.hpp"
#include "clstx/models/parameters.hpp"
#include "clstx/training/config.hpp"

namespace clstx::training {

template <typename T>
struct FoldResult {
  models::ParameterStore<T> params;
  double accuracy = 0;
  bool failed = false;
  std::size_t failed_step = 0;  // 1-based step that diverged
  std::string failure;
  std::vector<double> loss_history;  // mean batch loss per step
};

struct TrainHooks {
  std::function<void(std::size_t step, double loss)> on_step;
};

/// Trains a freshly initialized model on `train_idx` and scores it on
/// `val_idx` after the final step. Divergence is reported in the result.
template <typename T>
FoldResult<T> train_fold(const data::EmbeddingDataset& dataset,
                         std::span<const std::size_t> train_idx,
                         std::span<const std::size_t> val_idx, const models::ModelConfig& model,
                         const TrainConfig& train, const TrainHooks& hooks = {});

/// Evaluation-mode argmax predictions for the given samples.
template <typename T>
std::vector<std::uint32_t> predict(const models::ParameterStore<T>& params,
                                   const models::ModelConfig& model,
                                   const data::EmbeddingDataset& dataset,
                                   std::span<const std::size_t> indices);

/// Throws ValidationError when the dataset cannot feed the model.
void check_compatible(const data::EmbeddingDataset& dataset, const models::ModelConfig& model);

}  // namespace clstx::training
