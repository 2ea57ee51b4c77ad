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

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace clstx::models {

enum class Variant { CnnTransEnc, TransEnc, CnnCls, KimCnn, Softmax };

/// How a CNN[CLS] filter bank reads the 12 channels.
///   Full:    4 output filters spanning all input channels (kernels 4 x 12 x l).
///   Literal: one shared 4 x l kernel slid over channel groups {0-3, 4-7, 8-11},
///            giving 3 rows that are zero-padded to 4.
enum class QkvMode { Full, Literal };

std::string_view variant_name(Variant variant);
std::string_view variant_display_name(Variant variant);
/// Throws ConfigError listing the valid names.
Variant parse_variant(std::string_view name);
std::string valid_variant_names();

std::string_view qkv_mode_name(QkvMode mode);
QkvMode parse_qkv_mode(std::string_view name);

struct ModelConfig {
  Variant variant = Variant::CnnTransEnc;
  QkvMode qkv_mode = QkvMode::Full;
  std::size_t n_layers = 12;
  std::size_t hidden = 768;
  std::size_t d_m = 380;
  std::size_t outdim = 320;
  std::size_t heads = 20;
  std::size_t d_k = 19;  // d_v == d_k
  std::size_t filter_length = 5;
  std::size_t stride = 2;
  double dropout = 0.3;
  std::size_t n_classes = 2;
  std::array<std::size_t, 3> kim_windows{5, 10, 15};
  std::size_t kim_pool = 380;
  double layer_norm_eps = 1e-5;

  /// Rows each CNN[CLS] feature map contributes (4 for 12 layers).
  std::size_t rows_per_map() const { return n_layers / 3; }
  /// Columns of a CNN[CLS] feature map before pooling (382 for defaults).
  std::size_t conv_length() const;
  /// Pooled length of Kim-CNN filter `i`: min(kim_pool, conv length).
  std::size_t kim_pooled_length(std::size_t i) const;
  std::size_t kim_feature_length() const;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

}  // namespace clstx::models
