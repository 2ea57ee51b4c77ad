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
#include "clstx/models/parameters.hpp"

#include "clstx/detail/seed.hpp"
#include "clstx/errors.hpp"
#include "clstx/tensor/init.hpp"

namespace clstx::models {
namespace {

using detail::splitmix64;

void add_cnn_block(std::vector<ParamSpec>& out, const std::string& prefix,
                   const ModelConfig& cfg) {
  const std::size_t g = cfg.rows_per_map();
  for (const char* map : {"h", "s", "v"}) {
    const std::string base = prefix + "." + map;
    if (cfg.qkv_mode == QkvMode::Full) {
      out.push_back({base + ".kernel", {g, cfg.n_layers, cfg.filter_length}, ParamGroup::Cnn,
                     InitKind::Xavier});
      out.push_back({base + ".bias", {g}, ParamGroup::Cnn, InitKind::Zeros});
    } else {
      out.push_back({base + ".kernel", {1, g, cfg.filter_length}, ParamGroup::Cnn,
                     InitKind::Xavier});
      out.push_back({base + ".bias", {1}, ParamGroup::Cnn, InitKind::Zeros});
    }
  }
}

void add_layer_norm(std::vector<ParamSpec>& out, const std::string& prefix, std::size_t n) {
  out.push_back({prefix + ".gain", {n}, ParamGroup::Encoder, InitKind::Ones});
  out.push_back({prefix + ".shift", {n}, ParamGroup::Encoder, InitKind::Zeros});
}

void add_encoder(std::vector<ParamSpec>& out, const ModelConfig& cfg) {
  const auto enc = ParamGroup::Encoder;
  for (const char* w : {"enc1.wq", "enc1.wk", "enc1.wv"}) {
    out.push_back({w, {cfg.d_m, cfg.d_m}, enc, InitKind::Xavier});
  }
  out.push_back({"enc1.wo", {cfg.d_m, cfg.hidden}, enc, InitKind::Xavier});
  add_layer_norm(out, "enc1.ln1", cfg.hidden);
  add_layer_norm(out, "enc1.ln2", cfg.hidden);
  for (const char* w : {"enc2.proj_q", "enc2.proj_k", "enc2.proj_v"}) {
    out.push_back({w, {cfg.hidden, cfg.d_m}, enc, InitKind::Xavier});
  }
  for (const char* w : {"enc2.wq", "enc2.wk", "enc2.wv"}) {
    out.push_back({w, {cfg.d_m, cfg.d_m}, enc, InitKind::Xavier});
  }
  out.push_back({"enc2.wo", {cfg.n_layers * cfg.d_m, cfg.outdim}, enc, InitKind::Xavier});
  add_layer_norm(out, "enc2.ln1", cfg.outdim);
  add_layer_norm(out, "enc2.ln2", cfg.outdim);
}

}  // namespace

std::string_view group_name(ParamGroup group) {
  switch (group) {
    case ParamGroup::Cnn:
      return "cnn";
    case ParamGroup::Encoder:
      return "encoder";
    case ParamGroup::Head:
      return "head";
  }
  return "?";
}

std::vector<ParamSpec> parameter_catalog(const ModelConfig& cfg) {
  cfg.validate();
  std::vector<ParamSpec> out;
  const std::size_t classes = cfg.n_classes;
  switch (cfg.variant) {
    case Variant::CnnTransEnc:
      add_cnn_block(out, "cnn_q", cfg);
      add_cnn_block(out, "cnn_k", cfg);
      add_cnn_block(out, "cnn_v", cfg);
      add_encoder(out, cfg);
      out.push_back({"head.w", {cfg.outdim, classes}, ParamGroup::Head, InitKind::Xavier});
      break;
    case Variant::TransEnc:
      for (const char* w : {"enc1.in_q", "enc1.in_k", "enc1.in_v"}) {
        out.push_back({w, {cfg.hidden, cfg.d_m}, ParamGroup::Encoder, InitKind::Xavier});
      }
      add_encoder(out, cfg);
      out.push_back({"head.w", {cfg.outdim, classes}, ParamGroup::Head, InitKind::Xavier});
      break;
    case Variant::CnnCls:
      add_cnn_block(out, "cnn", cfg);
      out.push_back({"head.w", {cfg.n_layers * cfg.d_m, classes}, ParamGroup::Head,
                     InitKind::Xavier});
      break;
    case Variant::KimCnn:
      for (std::size_t i = 0; i < 3; ++i) {
        const std::string base = "kim.c" + std::to_string(i + 1);
        out.push_back({base + ".kernel", {1, 1, cfg.kim_windows[i]}, ParamGroup::Cnn,
                       InitKind::Xavier});
        out.push_back({base + ".bias", {1}, ParamGroup::Cnn, InitKind::Zeros});
      }
      out.push_back({"head.w", {cfg.kim_feature_length(), classes}, ParamGroup::Head,
                     InitKind::Xavier});
      break;
    case Variant::Softmax:
      out.push_back({"head.w", {cfg.hidden, classes}, ParamGroup::Head, InitKind::Xavier});
      break;
  }
  return out;
}

template <typename T>
Tensor<T>& ParameterStore<T>::add(std::string name, Shape shape, ParamGroup group) {
  if (index_.count(name)) throw ConfigError("duplicate parameter '" + name + "'");
  index_.emplace(name, entries_.size());
  entries_.push_back(Entry{std::move(name), group, Tensor<T>(std::move(shape), true)});
  return entries_.back().tensor;
}

template <typename T>
bool ParameterStore<T>::contains(std::string_view name) const {
  return index_.find(name) != index_.end();
}

template <typename T>
const Tensor<T>& ParameterStore<T>::get(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("missing parameter '" + std::string(name) + "'");
  return entries_[it->second].tensor;
}

template <typename T>
Tensor<T>& ParameterStore<T>::get(std::string_view name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("missing parameter '" + std::string(name) + "'");
  return entries_[it->second].tensor;
}

template <typename T>
std::size_t ParameterStore<T>::total_size() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.tensor.size();
  return n;
}

template <typename T>
std::vector<Tensor<T>> ParameterStore<T>::tensors() const {
  std::vector<Tensor<T>> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.tensor);
  return out;
}

template <typename T>
void ParameterStore<T>::zero_grad() {
  for (auto& e : entries_) e.tensor.zero_grad();
}

template <typename T>
ParameterStore<T> make_parameters(const ModelConfig& cfg, std::uint64_t seed) {
  ParameterStore<T> store;
  std::uint64_t stream = seed;
  for (const auto& spec : parameter_catalog(cfg)) {
    stream = splitmix64(stream);
    auto& t = store.add(spec.name, spec.shape, spec.group);
    switch (spec.init) {
      case InitKind::Xavier:
        xavier_fill(t, stream);
        break;
      case InitKind::Ones:
        for (auto& v : t.values()) v = T(1);
        break;
      case InitKind::Zeros:
        break;
    }
  }
  return store;
}

template class ParameterStore<float>;
template class ParameterStore<double>;
template ParameterStore<float> make_parameters<float>(const ModelConfig&, std::uint64_t);
template ParameterStore<double> make_parameters<double>(const ModelConfig&, std::uint64_t);

}  // namespace clstx::models
