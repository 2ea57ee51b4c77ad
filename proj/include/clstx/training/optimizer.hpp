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
#include <vector>

#include "clstx/models/parameters.hpp"
#include "clstx/training/config.hpp"

namespace clstx::training {

struct GroupRates {
  double cnn = 0;
  double encoder = 0;
  double head = 0;

  double for_group(models::ParamGroup group) const;
};

/// Rates for step `t`: constant for the cnn group, scheduled for the rest.
GroupRates rates_at(std::size_t t, const TrainConfig& cfg);

template <typename T>
struct AdamState {
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;
  std::size_t step = 0;

  explicit AdamState(const models::ParameterStore<T>& params);
};

/// Bias-corrected Adam update from the gradients held by `params`.
/// A non-finite gradient throws NumericError before anything is modified.
template <typename T>
void adam_step(models::ParameterStore<T>& params, AdamState<T>& state, const GroupRates& rates,
               const TrainConfig& cfg);

extern template struct AdamState<float>;
extern template struct AdamState<double>;

}  // namespace clstx::training
