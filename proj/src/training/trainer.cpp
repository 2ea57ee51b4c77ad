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
#include "clstx/training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "clstx/detail/seed.hpp"
#include "clstx/errors.hpp"
#include "clstx/evaluation/metrics.hpp"
#include "clstx/models/heads.hpp"
#include "clstx/tensor/ops.hpp"
#include "clstx/training/optimizer.hpp"

namespace clstx::training {
namespace {

template <typename T>
Tensor<T> stack_tensor(const data::EmbeddingDataset& ds, std::size_t i) {
  const auto s = ds.stack(i);
  return Tensor<T>({ds.n_layers, ds.hidden}, std::vector<T>(s.begin(), s.end()));
}

void check_indices(const data::EmbeddingDataset& ds, std::span<const std::size_t> train_idx,
                   std::span<const std::size_t> val_idx) {
  if (train_idx.empty()) throw ValidationError("training split is empty");
  if (val_idx.empty()) throw ValidationError("validation split is empty");
  for (auto i : train_idx) {
    if (i >= ds.n_samples()) throw ValidationError("training index out of range");
  }
  for (auto i : val_idx) {
    if (i >= ds.n_samples()) throw ValidationError("validation index out of range");
  }
}

}  // namespace

void check_compatible(const data::EmbeddingDataset& ds, const models::ModelConfig& model) {
  model.validate();
  if (ds.n_layers != model.n_layers || ds.hidden != model.hidden) {
    throw ValidationError("dataset stacks are " + std::to_string(ds.n_layers) + "x" +
                          std::to_string(ds.hidden) + ", model expects " +
                          std::to_string(model.n_layers) + "x" + std::to_string(model.hidden));
  }
  if (ds.n_classes != model.n_classes) {
    throw ValidationError("dataset has " + std::to_string(ds.n_classes) +
                          " classes, model expects " + std::to_string(model.n_classes));
  }
  for (auto label : ds.labels) {
    if (label >= model.n_classes) throw ValidationError("label out of range");
  }
}

template <typename T>
std::vector<std::uint32_t> predict(const models::ParameterStore<T>& params,
                                   const models::ModelConfig& model,
                                   const data::EmbeddingDataset& dataset,
                                   std::span<const std::size_t> indices) {
  std::vector<std::uint32_t> out;
  out.reserve(indices.size());
  Tape<T> tape(false);
  for (auto i : indices) {
    const auto log_probs = models::forward(tape, stack_tensor<T>(dataset, i), params, model);
    const auto v = log_probs.values();
    out.push_back(static_cast<std::uint32_t>(std::max_element(v.begin(), v.end()) - v.begin()));
  }
  return out;
}

template <typename T>
FoldResult<T> train_fold(const data::EmbeddingDataset& dataset,
                         std::span<const std::size_t> train_idx,
                         std::span<const std::size_t> val_idx, const models::ModelConfig& model,
                         const TrainConfig& train, const TrainHooks& hooks) {
  check_compatible(dataset, model);
  train.validate();
  check_indices(dataset, train_idx, val_idx);

  FoldResult<T> result{models::make_parameters<T>(model, detail::splitmix64(train.seed)), 0, false,
                       0, {}, {}};
  auto& params = result.params;
  AdamState<T> adam(params);
  const BatchPlan plan = make_batches(train_idx.size(), train, detail::splitmix64(train.seed + 1));
  std::mt19937_64 dropout_rng(detail::splitmix64(train.seed + 2));
  models::ForwardOptions opts{true, &dropout_rng, nullptr};
  result.loss_history.reserve(plan.steps.size());

  for (std::size_t s = 0; s < plan.steps.size(); ++s) {
    const std::size_t step = s + 1;
    const auto& batch = plan.steps[s];
    const T weight = T(1) / static_cast<T>(batch.size());
    params.zero_grad();
    double batch_loss = 0;
    try {
      for (auto pos : batch) {
        const std::size_t i = train_idx[pos];
        Tape<T> tape(true);
        auto log_probs = models::forward(tape, stack_tensor<T>(dataset, i), params, model, opts);
        auto loss = ops::nll_loss(tape, log_probs, dataset.labels[i]);
        batch_loss += static_cast<double>(loss.item());
        tape.backward(loss, weight);
      }
      batch_loss /= static_cast<double>(batch.size());
      if (!std::isfinite(batch_loss)) throw NumericError("loss is not finite");
      adam_step(params, adam, rates_at(step, train), train);
    } catch (const NumericError& e) {
      result.failed = true;
      result.failed_step = step;
      result.failure = "diverged at step " + std::to_string(step) + ": " + e.what();
      return result;
    }
    result.loss_history.push_back(batch_loss);
    if (hooks.on_step) hooks.on_step(step, batch_loss);
  }

  std::vector<std::uint32_t> labels;
  labels.reserve(val_idx.size());
  for (auto i : val_idx) labels.push_back(dataset.labels[i]);
  result.accuracy = evaluation::accuracy(predict(params, model, dataset, val_idx), labels);
  return result;
}

#define CLSTX_INSTANTIATE_TRAINER(T)                                                           \
  template FoldResult<T> train_fold(const data::EmbeddingDataset&, std::span<const std::size_t>, \
                                    std::span<const std::size_t>, const models::ModelConfig&,   \
                                    const TrainConfig&, const TrainHooks&);                     \
  template std::vector<std::uint32_t> predict(const models::ParameterStore<T>&,                 \
                                              const models::ModelConfig&,                       \
                                              const data::EmbeddingDataset&,                    \
                                              std::span<const std::size_t>);

CLSTX_INSTANTIATE_TRAINER(float)
CLSTX_INSTANTIATE_TRAINER(double)

}  // namespace clstx::training
