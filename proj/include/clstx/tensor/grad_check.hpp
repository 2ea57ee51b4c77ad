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
#include <functional>
#include <span>

#include "clstx/tensor/tensor.hpp"

namespace clstx {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t tensor_index = 0;  // location of the worst coordinate
  std::size_t flat_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

template <typename T>
using ScalarFunction = std::function<Tensor<T>(Tape<T>&)>;

/// Compares tape gradients of the scalar `f` with central differences
/// (f(x+h) - f(x-h)) / 2h on every coordinate of `params`. The relative error
/// denominator is max(|analytic|, |numeric|, 1e-8). `f` is re-evaluated on a
/// disabled tape for the perturbed points. Parameters are restored on exit.
template <typename T>
GradCheckResult grad_check(const ScalarFunction<T>& f, std::span<Tensor<T>> params, double h);

}  // namespace clstx
