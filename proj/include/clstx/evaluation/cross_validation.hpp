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
#include <optional>
#include <string>
#include <vector>

#include "clstx/data/embedding_store.hpp"
#include "clstx/models/parameters.hpp"
#include "clstx/training/config.hpp"
#include "json.hpp"

namespace clstx::evaluation {

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

/// Seeded random partition of [0, n) into k validation folds whose sizes
/// differ by at most one. The larger folds come first.
std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

struct FoldOutcome {
  double accuracy = 0;
  bool failed = false;
  std::size_t failed_step = 0;
  std::string failure;
  double seconds = 0;

  static FoldOutcome success(double accuracy) { return {accuracy, false, 0, {}, 0}; }
  static FoldOutcome diverged(std::size_t step, std::string reason) {
    return {0, true, step, std::move(reason), 0};
  }
};

struct FoldFailure {
  std::uint64_t seed = 0;
  std::size_t fold = 0;
  std::size_t step = 0;
  std::string reason;
};

struct EvalReport {
  std::string model;
  std::string variant;
  std::string dataset;
  std::vector<std::uint64_t> seeds;
  std::size_t folds = 0;
  /// accuracies[seed][fold]; empty for failed folds.
  std::vector<std::vector<std::optional<double>>> accuracies;
  std::vector<std::optional<double>> seed_means;
  std::optional<double> grand_mean;
  std::vector<FoldFailure> failures;
  nlohmann::json config;
  /// Wall-clock per fold; kept in memory only so reports stay reproducible.
  std::vector<std::vector<double>> fold_seconds;

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& doc);
  /// Seed means that are present, in seed order.
  std::vector<double> scores() const;
};

struct CvOptions {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t folds = 5;
  std::size_t parallel_folds = 1;
};

struct FoldContext {
  std::uint64_t seed = 0;
  std::size_t fold = 0;
  std::uint64_t fold_seed = 0;  // seed XOR fold
};

using FoldTrainer = std::function<FoldOutcome(const Fold& fold, const FoldContext& ctx)>;

/// Receives the trained parameters of every successful fold.
using FoldParamsSink =
    std::function<void(const FoldContext& ctx, const models::ParameterStore<float>& params)>;

/// Cross-validation driver independent of the model being trained. Fills the
/// accuracy table, seed means, grand mean and failure list.
EvalReport run_cv(std::size_t n_samples, const CvOptions& options, const FoldTrainer& trainer);

/// Cross-validates `run.model` on `dataset`, training every fold from scratch.
EvalReport run_cv(const data::EmbeddingDataset& dataset, const training::RunConfig& run,
                  const CvOptions& options, std::string dataset_name = {},
                  const FoldParamsSink& sink = {});

/// Human-readable model label used to group reports ("CNN-Trans-Enc", ...).
std::string model_label(const models::ModelConfig& cfg);

}  // namespace clstx::evaluation
