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
#include "clstx/training/optimizer.hpp"

#include <cmath>
#include <string>

#include "clstx/errors.hpp"

namespace clstx::training {

double GroupRates::for_group(models::ParamGroup group) const {
  switch (group) {
    case models::ParamGroup::Cnn:
      return cnn;
    case models::ParamGroup::Encoder:
      return encoder;
    case models::ParamGroup::Head:
      return head;
  }
  return 0;
}

GroupRates rates_at(std::size_t t, const TrainConfig& cfg) {
  const double scheduled = lr_at(t, cfg);
  return GroupRates{cfg.cnn_lr, scheduled, scheduled};
}

template <typename T>
AdamState<T>::AdamState(const models::ParameterStore<T>& params) {
  for (const auto& e : params.entries()) {
    m.emplace_back(e.tensor.size(), T(0));
    v.emplace_back(e.tensor.size(), T(0));
  }
}

template <typename T>
void adam_step(models::ParameterStore<T>& params, AdamState<T>& state, const GroupRates& rates,
               const TrainConfig& cfg) {
  auto& entries = params.entries();
  if (state.m.size() != entries.size()) {
    throw DimensionError("adam_step: optimizer state tracks " + std::to_string(state.m.size()) +
                         " tensors, store has " + std::to_string(entries.size()));
  }
  for (std::size_t p = 0; p < entries.size(); ++p) {
    const auto& t = entries[p].tensor;
    if (state.m[p].size() != t.size()) {
      throw DimensionError("adam_step: state for '" + entries[p].name + "' has wrong size");
    }
    if (!t.has_grad()) continue;
    const auto g = t.grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!std::isfinite(static_cast<double>(g[i]))) {
        throw NumericError("non-finite gradient in '" + entries[p].name + "' at index " +
                           std::to_string(i));
      }
    }
  }

  ++state.step;
  const double b1 = cfg.beta1, b2 = cfg.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < entries.size(); ++p) {
    auto& t = entries[p].tensor;
    if (!t.has_grad()) continue;
    const double lr = rates.for_group(entries[p].group);
    const auto g = t.grad();
    auto& m = state.m[p];
    auto& v = state.v[p];
    T* w = t.data();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double gi = g[i];
      const double mi = b1 * m[i] + (1.0 - b1) * gi;
      const double vi = b2 * v[i] + (1.0 - b2) * gi * gi;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      w[i] = static_cast<T>(w[i] - lr * (mi / c1) / (std::sqrt(vi / c2) + cfg.eps));
    }
  }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step(models::ParameterStore<float>&, AdamState<float>&, const GroupRates&,
                        const TrainConfig&);
template void adam_step(models::ParameterStore<double>&, AdamState<double>&, const GroupRates&,
                        const TrainConfig&);

}  // namespace clstx::training
