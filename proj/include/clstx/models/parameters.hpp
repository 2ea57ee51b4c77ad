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
#include <deque>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "clstx/models/config.hpp"
#include "clstx/tensor/tensor.hpp"

namespace clstx::models {

enum class ParamGroup { Cnn, Encoder, Head };
std::string_view group_name(ParamGroup group);

enum class InitKind { Xavier, Zeros, Ones };

struct ParamSpec {
  std::string name;
  Shape shape;
  ParamGroup group;
  InitKind init;
};

/// Every trainable tensor of a variant, in a fixed order.
std::vector<ParamSpec> parameter_catalog(const ModelConfig& cfg);

template <typename T>
class ParameterStore {
 public:
  struct Entry {
    std::string name;
    ParamGroup group;
    Tensor<T> tensor;
  };

  Tensor<T>& add(std::string name, Shape shape, ParamGroup group);

  bool contains(std::string_view name) const;
  /// Throws ConfigError for an unknown name.
  const Tensor<T>& get(std::string_view name) const;
  Tensor<T>& get(std::string_view name);

  std::deque<Entry>& entries() { return entries_; }
  const std::deque<Entry>& entries() const { return entries_; }
  std::size_t count() const { return entries_.size(); }
  std::size_t total_size() const;

  std::vector<Tensor<T>> tensors() const;
  void zero_grad();

  /// Deep copy converted to another precision.
  template <typename U>
  ParameterStore<U> cast() const {
    ParameterStore<U> out;
    for (const auto& e : entries_) {
      auto& t = out.add(e.name, e.tensor.shape(), e.group);
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<U>(e.tensor[i]);
    }
    return out;
  }

 private:
  std::deque<Entry> entries_;  // stable references across add()
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Builds the catalog for `cfg`: weights Xavier-uniform, biases and
/// layer-norm shifts zero, layer-norm gains one. Each tensor draws from its
/// own stream derived from `seed`.
template <typename T>
ParameterStore<T> make_parameters(const ModelConfig& cfg, std::uint64_t seed);

extern template class ParameterStore<float>;
extern template class ParameterStore<double>;

}  // namespace clstx::models
