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

#include <cstdint>
#include <utility>

#include "clstx/tensor/tensor.hpp"

namespace clstx {

/// (fan_in, fan_out) of a parameter shape. Matrices are [in x out];
/// convolution kernels are [out_channels x in_channels x width].
std::pair<std::size_t, std::size_t> xavier_fans(const Shape& shape);

/// Uniform Glorot initialization on [-a, a], a = sqrt(6 / (fan_in + fan_out)).
template <typename T>
Tensor<T> xavier_init(const Shape& shape, std::uint64_t seed, bool requires_grad = false);

/// Fills an existing tensor in place with the same law.
template <typename T>
void xavier_fill(Tensor<T>& tensor, std::uint64_t seed);

}  // namespace clstx
