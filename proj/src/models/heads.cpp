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
#include "clstx/models/heads.hpp"

#include <cmath>

#include "clstx/errors.hpp"
#include "clstx/tensor/ops.hpp"

namespace clstx::models {
namespace {

void trace(const ForwardOptions& opts, std::string name, const Shape& shape) {
  if (opts.trace) opts.trace->emplace_back(std::move(name), shape);
}

template <typename T>
Tensor<T> dropout(Tape<T>& tape, const Tensor<T>& x, const ModelConfig& cfg,
                  const ForwardOptions& opts) {
  if (!opts.training || cfg.dropout == 0.0) return x;
  if (!opts.rng) throw ConfigError("training forward pass needs a random generator");
  return ops::dropout_mask(tape, x, cfg.dropout, true, *opts.rng);
}

template <typename T>
void check_stack(const Tensor<T>& stack, const ModelConfig& cfg) {
  if (stack.rank() != 2 || stack.dim(0) != cfg.n_layers || stack.dim(1) != cfg.hidden) {
    throw DimensionError("expected a " + std::to_string(cfg.n_layers) + "x" +
                         std::to_string(cfg.hidden) + " [CLS] stack, got " +
                         shape_string(stack.shape()));
  }
}

template <typename T>
Tensor<T> feature_map(Tape<T>& tape, const Tensor<T>& stack, const ParameterStore<T>& params,
                      const std::string& base, const ModelConfig& cfg) {
  const auto& kernel = params.get(base + ".kernel");
  const auto& bias = params.get(base + ".bias");
  if (cfg.qkv_mode == QkvMode::Full) {
    return ops::tanh_map(tape, ops::conv1d_strided(tape, stack, kernel, bias, cfg.stride));
  }
  const std::size_t g = cfg.rows_per_map();
  std::vector<Tensor<T>> rows;
  for (std::size_t group = 0; group < 3; ++group) {
    auto window = ops::slice_rows(tape, stack, group * g, g);
    rows.push_back(ops::tanh_map(tape, ops::conv1d_strided(tape, window, kernel, bias, cfg.stride)));
  }
  if (g > 3) rows.push_back(Tensor<T>({g - 3, cfg.conv_length()}));
  return ops::concat_rows<T>(tape, rows);
}

template <typename T>
Tensor<T> classify(Tape<T>& tape, const Tensor<T>& features, const ParameterStore<T>& params,
                   const ForwardOptions& opts) {
  auto log_probs = ops::log_softmax_rows(tape, ops::matmul(tape, features, params.get("head.w")));
  trace(opts, "log_probs", log_probs.shape());
  return log_probs;
}

}  // namespace

template <typename T>
Tensor<T> cnn_cls_forward(Tape<T>& tape, const Tensor<T>& stack, const ParameterStore<T>& params,
                          const std::string& prefix, const ModelConfig& cfg,
                          const ForwardOptions& opts) {
  check_stack(stack, cfg);
  std::vector<Tensor<T>> pooled;
  for (const char* map : {"h", "s", "v"}) {
    const std::string base = prefix + "." + map;
    auto features = feature_map(tape, stack, params, base, cfg);
    trace(opts, base + ".map", features.shape());
    pooled.push_back(ops::adaptive_max_pool1d(tape, features, cfg.d_m));
    trace(opts, base + ".pooled", pooled.back().shape());
  }
  auto out = dropout(tape, ops::concat_rows<T>(tape, pooled), cfg, opts);
  trace(opts, prefix + ".out", out.shape());
  return out;
}

template <typename T>
Tensor<T> attention_heads(Tape<T>& tape, const Tensor<T>& q, const Tensor<T>& k,
                          const Tensor<T>& v, const Tensor<T>& wq, const Tensor<T>& wk,
                          const Tensor<T>& wv, std::size_t heads,
                          std::vector<Tensor<T>>* weights) {
  if (heads == 0 || wq.cols() % heads != 0 || wq.shape() != wk.shape() ||
      wq.shape() != wv.shape()) {
    throw ConfigError("attention: projection width " + std::to_string(wq.cols()) +
                      " is not divisible into " + std::to_string(heads) + " heads");
  }
  const std::size_t d_head = wq.cols() / heads;
  const T inv_sqrt = T(1) / std::sqrt(static_cast<T>(d_head));
  auto qp = ops::matmul(tape, q, wq);
  auto kp = ops::matmul(tape, k, wk);
  auto vp = ops::matmul(tape, v, wv);
  std::vector<Tensor<T>> outputs;
  outputs.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    auto qh = ops::slice_cols(tape, qp, h * d_head, d_head);
    auto kh = ops::slice_cols(tape, kp, h * d_head, d_head);
    auto vh = ops::slice_cols(tape, vp, h * d_head, d_head);
    auto scores = ops::scale(tape, ops::matmul(tape, qh, ops::transpose(tape, kh)), inv_sqrt);
    auto attn = ops::softmax_rows(tape, scores);
    if (weights) weights->push_back(attn);
    outputs.push_back(ops::matmul(tape, attn, vh));
  }
  return ops::concat_cols<T>(tape, outputs);
}

template <typename T>
Tensor<T> multi_head_attention(Tape<T>& tape, const Tensor<T>& q, const Tensor<T>& k,
                               const Tensor<T>& v, const Tensor<T>& wq, const Tensor<T>& wk,
                               const Tensor<T>& wv, const Tensor<T>& wo, std::size_t heads,
                               std::vector<Tensor<T>>* weights) {
  return ops::matmul(tape, attention_heads(tape, q, k, v, wq, wk, wv, heads, weights), wo);
}

template <typename T>
Tensor<T> encoder_layer1_forward(Tape<T>& tape, const Tensor<T>& stack, const Tensor<T>& q,
                                 const Tensor<T>& k, const Tensor<T>& v,
                                 const ParameterStore<T>& params, const ModelConfig& cfg,
                                 const ForwardOptions& opts, bool residual) {
  check_stack(stack, cfg);
  auto attended = multi_head_attention(tape, q, k, v, params.get("enc1.wq"), params.get("enc1.wk"),
                                       params.get("enc1.wv"), params.get("enc1.wo"), cfg.heads);
  if (residual) attended = ops::add(tape, stack, attended);
  auto a = ops::layer_norm(tape, attended, params.get("enc1.ln1.gain"),
                           params.get("enc1.ln1.shift"), cfg.layer_norm_eps);
  auto x0 = ops::layer_norm(tape, ops::add(tape, a, ops::tanh_map(tape, a)),
                            params.get("enc1.ln2.gain"), params.get("enc1.ln2.shift"),
                            cfg.layer_norm_eps);
  trace(opts, "enc1.out", x0.shape());
  return x0;
}

template <typename T>
Tensor<T> encoder_layer2_forward(Tape<T>& tape, const Tensor<T>& x0,
                                 const ParameterStore<T>& params, const ModelConfig& cfg,
                                 const ForwardOptions& opts) {
  auto q2 = ops::matmul(tape, x0, params.get("enc2.proj_q"));
  auto k2 = ops::matmul(tape, x0, params.get("enc2.proj_k"));
  auto v2 = ops::matmul(tape, x0, params.get("enc2.proj_v"));
  trace(opts, "enc2.q", q2.shape());
  auto concat = attention_heads(tape, q2, k2, v2, params.get("enc2.wq"), params.get("enc2.wk"),
                                params.get("enc2.wv"), cfg.heads);
  auto z = ops::vectorize(tape, concat);
  trace(opts, "enc2.z", z.shape());
  auto m = ops::matmul(tape, z, params.get("enc2.wo"));
  auto b = ops::layer_norm(tape, m, params.get("enc2.ln1.gain"), params.get("enc2.ln1.shift"),
                           cfg.layer_norm_eps);
  auto out = ops::layer_norm(tape, ops::add(tape, b, ops::tanh_map(tape, b)),
                             params.get("enc2.ln2.gain"), params.get("enc2.ln2.shift"),
                             cfg.layer_norm_eps);
  trace(opts, "enc2.out", out.shape());
  return out;
}

template <typename T>
Tensor<T> cnn_trans_enc_forward(Tape<T>& tape, const Tensor<T>& stack,
                                const ParameterStore<T>& params, const ModelConfig& cfg,
                                const ForwardOptions& opts) {
  auto q = cnn_cls_forward(tape, stack, params, "cnn_q", cfg, opts);
  auto k = cnn_cls_forward(tape, stack, params, "cnn_k", cfg, opts);
  auto v = cnn_cls_forward(tape, stack, params, "cnn_v", cfg, opts);
  auto x0 = encoder_layer1_forward(tape, stack, q, k, v, params, cfg, opts);
  return classify(tape, encoder_layer2_forward(tape, x0, params, cfg, opts), params, opts);
}

template <typename T>
Tensor<T> trans_enc_forward(Tape<T>& tape, const Tensor<T>& stack,
                            const ParameterStore<T>& params, const ModelConfig& cfg,
                            const ForwardOptions& opts) {
  check_stack(stack, cfg);
  auto q = ops::matmul(tape, stack, params.get("enc1.in_q"));
  auto k = ops::matmul(tape, stack, params.get("enc1.in_k"));
  auto v = ops::matmul(tape, stack, params.get("enc1.in_v"));
  trace(opts, "enc1.q", q.shape());
  auto x0 = encoder_layer1_forward(tape, stack, q, k, v, params, cfg, opts);
  return classify(tape, encoder_layer2_forward(tape, x0, params, cfg, opts), params, opts);
}

template <typename T>
Tensor<T> cnn_cls_classifier_forward(Tape<T>& tape, const Tensor<T>& stack,
                                     const ParameterStore<T>& params, const ModelConfig& cfg,
                                     const ForwardOptions& opts) {
  auto features = ops::vectorize(tape, cnn_cls_forward(tape, stack, params, "cnn", cfg, opts));
  trace(opts, "cnn.features", features.shape());
  return classify(tape, features, params, opts);
}

template <typename T>
Tensor<T> kim_cnn_forward(Tape<T>& tape, const Tensor<T>& last, const ParameterStore<T>& params,
                          const ModelConfig& cfg, const ForwardOptions& opts) {
  if (last.rank() != 1 || last.size() != cfg.hidden) {
    throw DimensionError("Kim-CNN expects a length-" + std::to_string(cfg.hidden) +
                         " vector, got " + shape_string(last.shape()));
  }
  const auto row = ops::concat_rows<T>(tape, std::span<const Tensor<T>>(&last, 1));
  std::vector<Tensor<T>> pooled;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string base = "kim.c" + std::to_string(i + 1);
    auto map = ops::tanh_map(tape, ops::conv1d_strided(tape, row, params.get(base + ".kernel"),
                                                       params.get(base + ".bias"), cfg.stride));
    trace(opts, base + ".map", map.shape());
    pooled.push_back(ops::adaptive_max_pool1d(tape, map, cfg.kim_pooled_length(i)));
  }
  auto features = ops::vectorize(tape, dropout(tape, ops::concat_cols<T>(tape, pooled), cfg, opts));
  trace(opts, "kim.features", features.shape());
  return classify(tape, features, params, opts);
}

template <typename T>
Tensor<T> softmax_head_forward(Tape<T>& tape, const Tensor<T>& last,
                               const ParameterStore<T>& params) {
  return ops::log_softmax_rows(tape, ops::matmul(tape, last, params.get("head.w")));
}

template <typename T>
Tensor<T> forward(Tape<T>& tape, const Tensor<T>& stack, const ParameterStore<T>& params,
                  const ModelConfig& cfg, const ForwardOptions& opts) {
  switch (cfg.variant) {
    case Variant::CnnTransEnc:
      return cnn_trans_enc_forward(tape, stack, params, cfg, opts);
    case Variant::TransEnc:
      return trans_enc_forward(tape, stack, params, cfg, opts);
    case Variant::CnnCls:
      return cnn_cls_classifier_forward(tape, stack, params, cfg, opts);
    case Variant::KimCnn:
    case Variant::Softmax: {
      check_stack(stack, cfg);
      auto last = ops::vectorize(tape, ops::slice_rows(tape, stack, cfg.n_layers - 1, 1));
      if (cfg.variant == Variant::KimCnn) return kim_cnn_forward(tape, last, params, cfg, opts);
      auto out = softmax_head_forward(tape, last, params);
      trace(opts, "log_probs", out.shape());
      return out;
    }
  }
  throw ConfigError("unhandled variant");
}

#define CLSTX_INSTANTIATE_HEADS(T)                                                            \
  template Tensor<T> cnn_cls_forward(Tape<T>&, const Tensor<T>&, const ParameterStore<T>&,    \
                                     const std::string&, const ModelConfig&,                  \
                                     const ForwardOptions&);                                  \
  template Tensor<T> attention_heads(Tape<T>&, const Tensor<T>&, const Tensor<T>&,            \
                                     const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,    \
                                     const Tensor<T>&, std::size_t, std::vector<Tensor<T>>*); \
  template Tensor<T> multi_head_attention(                                                    \
      Tape<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,        \
      const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t,                      \
      std::vector<Tensor<T>>*);                                                               \
  template Tensor<T> encoder_layer1_forward(Tape<T>&, const Tensor<T>&, const Tensor<T>&,     \
                                            const Tensor<T>&, const Tensor<T>&,               \
                                            const ParameterStore<T>&, const ModelConfig&,     \
                                            const ForwardOptions&, bool);                     \
  template Tensor<T> encoder_layer2_forward(Tape<T>&, const Tensor<T>&,                       \
                                            const ParameterStore<T>&, const ModelConfig&,     \
                                            const ForwardOptions&);                           \
  template Tensor<T> cnn_trans_enc_forward(Tape<T>&, const Tensor<T>&,                        \
                                           const ParameterStore<T>&, const ModelConfig&,      \
                                           const ForwardOptions&);                            \
  template Tensor<T> trans_enc_forward(Tape<T>&, const Tensor<T>&, const ParameterStore<T>&,  \
                                       const ModelConfig&, const ForwardOptions&);            \
  template Tensor<T> cnn_cls_classifier_forward(Tape<T>&, const Tensor<T>&,                   \
                                                const ParameterStore<T>&, const ModelConfig&, \
                                                const ForwardOptions&);                       \
  template Tensor<T> kim_cnn_forward(Tape<T>&, const Tensor<T>&, const ParameterStore<T>&,    \
                                     const ModelConfig&, const ForwardOptions&);              \
  template Tensor<T> softmax_head_forward(Tape<T>&, const Tensor<T>&,                         \
                                          const ParameterStore<T>&);                          \
  template Tensor<T> forward(Tape<T>&, const Tensor<T>&, const ParameterStore<T>&,            \
                             const ModelConfig&, const ForwardOptions&);

CLSTX_INSTANTIATE_HEADS(float)
CLSTX_INSTANTIATE_HEADS(double)

#undef CLSTX_INSTANTIATE_HEADS

}  // namespace clstx::models
