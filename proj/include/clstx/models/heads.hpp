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

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "clstx/models/config.hpp"
#include "clstx/models/parameters.hpp"
#include "clstx/tensor/tensor.hpp"

namespace clstx::models {

/// Named intermediate shapes recorded during a forward pass.
using ShapeTrace = std::vector<std::pair<std::string, Shape>>;

struct ForwardOptions {
  bool training = false;            // enables dropout
  std::mt19937_64* rng = nullptr;   // required when training with dropout > 0
  ShapeTrace* trace = nullptr;
};

/// One CNN[CLS] block: three strided convolutions + tanh, each adaptively
/// max-pooled to d_m and stacked as [h_p; s_p; v_p] (n_layers x d_m).
/// `prefix` selects the replica ("cnn_q", "cnn_k", "cnn_v" or "cnn").
template <typename T>
Tensor<T> cnn_cls_forward(Tape<T>& tape, const Tensor<T>& stack, const ParameterStore<T>& params,
                          const std::string& prefix, const ModelConfig& cfg,
                          const ForwardOptions& opts);

/// Concat(head_1..head_h) with head_k = softmax(Q Wq_k (K Wk_k)^T / sqrt(d_k)) V Wv_k.
/// The per-head matrices are the column blocks of `wq`, `wk`, `wv` (d_m x h*d_k).
/// When `weights` is non-null the attention matrices are appended to it.
template <typename T>
Tensor<T> attention_heads(Tape<T>& tape, const Tensor<T>& q, const Tensor<T>& k,
                          const Tensor<T>& v, const Tensor<T>& wq, const Tensor<T>& wk,
                          const Tensor<T>& wv, std::size_t heads,
                          std::vector<Tensor<T>>* weights = nullptr);

/// attention_heads(...) * wo.
template <typename T>
Tensor<T> multi_head_attention(Tape<T>& tape, const Tensor<T>& q, const Tensor<T>& k,
                               const Tensor<T>& v, const Tensor<T>& wq, const Tensor<T>& wk,
                               const Tensor<T>& wv, const Tensor<T>& wo, std::size_t heads,
                               std::vector<Tensor<T>>* weights = nullptr);

/// A = LN(X + MHA(Q, K, V)); X0 = LN(A + tanh(A)).
template <typename T>
Tensor<T> encoder_layer1_forward(Tape<T>& tape, const Tensor<T>& stack, const Tensor<T>& q,
                                 const Tensor<T>& k, const Tensor<T>& v,
                                 const ParameterStore<T>& params, const ModelConfig& cfg,
                                 const ForwardOptions& opts, bool residual = true);

/// Q2/K2/V2 = X0 W; Z = vec(Concat(heads)); B = LN(Z Wo); LN(B + tanh(B)).
template <typename T>
Tensor<T> encoder_layer2_forward(Tape<T>& tape, const Tensor<T>& x0,
                                 const ParameterStore<T>& params, const ModelConfig& cfg,
                                 const ForwardOptions& opts);

// Classification heads. Each returns class log-probabilities (rank 1).

template <typename T>
Tensor<T> cnn_trans_enc_forward(Tape<T>& tape, const Tensor<T>& stack,
                                const ParameterStore<T>& params, const ModelConfig& cfg,
                                const ForwardOptions& opts = {});

template <typename T>
Tensor<T> trans_enc_forward(Tape<T>& tape, const Tensor<T>& stack,
                            const ParameterStore<T>& params, const ModelConfig& cfg,
                            const ForwardOptions& opts = {});

template <typename T>
Tensor<T> cnn_cls_classifier_forward(Tape<T>& tape, const Tensor<T>& stack,
                                     const ParameterStore<T>& params, const ModelConfig& cfg,
                                     const ForwardOptions& opts = {});

/// `last` is the final-layer [CLS] vector (length hidden).
template <typename T>
Tensor<T> kim_cnn_forward(Tape<T>& tape, const Tensor<T>& last, const ParameterStore<T>& params,
                          const ModelConfig& cfg, const ForwardOptions& opts = {});

template <typename T>
Tensor<T> softmax_head_forward(Tape<T>& tape, const Tensor<T>& last,
                               const ParameterStore<T>& params);

/// Dispatches on cfg.variant. `stack` is n_layers x hidden; the single-layer
/// heads read its last row.
template <typename T>
Tensor<T> forward(Tape<T>& tape, const Tensor<T>& stack, const ParameterStore<T>& params,
                  const ModelConfig& cfg, const ForwardOptions& opts = {});

}  // namespace clstx::models
