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
#include "clstx/tensor/init.hpp"

#include <cmath>
#include <random>

#include "clstx/errors.hpp"

namespace clstx {

std::pair<std::size_t, std::size_t> xavier_fans(const Shape& shape) {
  switch (shape.size()) {
    case 1:
      return {shape[0], shape[0]};
    case 2:
      return {shape[0], shape[1]};
    case 3:
      return {shape[1] * shape[2], shape[0] * shape[2]};
    default:
      throw DimensionError("xavier: unsupported shape " + shape_string(shape));
  }
}

template <typename T>
void xavier_fill(Tensor<T>& tensor, std::uint64_t seed) {
  const auto [fan_in, fan_out] = xavier_fans(tensor.shape());
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-bound, bound);
  for (auto& v : tensor.values()) v = static_cast<T>(uniform(rng));
}

template <typename T>
Tensor<T> xavier_init(const Shape& shape, std::uint64_t seed, bool requires_grad) {
  Tensor<T> out(shape, requires_grad);
  xavier_fill(out, seed);
  return out;
}

template Tensor<float> xavier_init<float>(const Shape&, std::uint64_t, bool);
template Tensor<double> xavier_init<double>(const Shape&, std::uint64_t, bool);
template void xavier_fill<float>(Tensor<float>&, std::uint64_t);
template void xavier_fill<double>(Tensor<double>&, std::uint64_t);

}  // namespace clstx
