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
#include <random>
#include <span>
#include <vector>

#include "clstx/tensor/tensor.hpp"

namespace clstx::ops {

// Every op takes the active tape first. Outputs require a gradient when the
// tape is enabled and any input does. Rank-1 operands of the row-wise ops
// are treated as a single row and keep their rank in the result.

/// a[m x k] * b[k x n]. A rank-1 `a` of length k yields a rank-1 result.
template <typename T>
Tensor<T> matmul(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> transpose(Tape<T>& tape, const Tensor<T>& a);

template <typename T>
Tensor<T> add(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b);

/// Adds `bias` (length = cols) to every row.
template <typename T>
Tensor<T> add_bias(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& bias);

template <typename T>
Tensor<T> scale(Tape<T>& tape, const Tensor<T>& a, T factor);

template <typename T>
Tensor<T> tanh_map(Tape<T>& tape, const Tensor<T>& a);

/// Strided 1-D cross-correlation, no activation:
/// out[o, i] = bias[o] + sum_{c,j} kernels[o, c, j] * input[c, i * stride + j].
template <typename T>
Tensor<T> conv1d_strided(Tape<T>& tape, const Tensor<T>& input, const Tensor<T>& kernels,
                         const Tensor<T>& bias, std::size_t stride);

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel, std::size_t stride);

/// Half-open bin [begin, end) that adaptive pooling assigns to output `index`.
struct PoolBin {
  std::size_t begin;
  std::size_t end;
};
PoolBin adaptive_pool_bin(std::size_t index, std::size_t length, std::size_t target);

/// Max over each adaptive bin of every row. The gradient of a bin goes to its
/// first maximal element.
template <typename T>
Tensor<T> adaptive_max_pool1d(Tape<T>& tape, const Tensor<T>& input, std::size_t target);

template <typename T>
Tensor<T> softmax_rows(Tape<T>& tape, const Tensor<T>& a);

template <typename T>
Tensor<T> log_softmax_rows(Tape<T>& tape, const Tensor<T>& a);

inline constexpr double kLayerNormEps = 1e-5;

template <typename T>
Tensor<T> layer_norm(Tape<T>& tape, const Tensor<T>& input, const Tensor<T>& gain,
                     const Tensor<T>& shift, double eps = kLayerNormEps);

/// Inverted dropout. Identity (same storage, nothing recorded) when
/// `training` is false or `ratio` is zero.
template <typename T>
Tensor<T> dropout_mask(Tape<T>& tape, const Tensor<T>& a, double ratio, bool training,
                       std::mt19937_64& rng);

template <typename T>
Tensor<T> concat_rows(Tape<T>& tape, std::span<const Tensor<T>> parts);

template <typename T>
Tensor<T> concat_cols(Tape<T>& tape, std::span<const Tensor<T>> parts);

template <typename T>
Tensor<T> slice_rows(Tape<T>& tape, const Tensor<T>& a, std::size_t begin, std::size_t count);

template <typename T>
Tensor<T> slice_cols(Tape<T>& tape, const Tensor<T>& a, std::size_t begin, std::size_t count);

/// Row-major flatten of [m x n] into a length m*n vector.
template <typename T>
Tensor<T> vectorize(Tape<T>& tape, const Tensor<T>& a);

template <typename T>
Tensor<T> sum(Tape<T>& tape, const Tensor<T>& a);

/// -a[label] for a rank-1 vector of log-probabilities.
template <typename T>
Tensor<T> nll_loss(Tape<T>& tape, const Tensor<T>& log_probs, std::size_t label);

}  // namespace clstx::ops
