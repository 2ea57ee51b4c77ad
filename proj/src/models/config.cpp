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
#include "clstx/models/config.hpp"

#include <algorithm>

#include "clstx/errors.hpp"
#include "clstx/tensor/ops.hpp"

namespace clstx::models {
namespace {

struct VariantInfo {
  Variant variant;
  std::string_view name;
  std::string_view display;
};

constexpr std::array<VariantInfo, 5> kVariants{{
    {Variant::CnnTransEnc, "cnn-trans-enc", "CNN-Trans-Enc"},
    {Variant::TransEnc, "trans-enc", "Trans-Enc"},
    {Variant::CnnCls, "cnn-cls", "CNN[CLS]"},
    {Variant::KimCnn, "kim-cnn", "Kim-CNN"},
    {Variant::Softmax, "softmax", "Softmax"},
}};

const VariantInfo& info(Variant v) {
  return *std::find_if(kVariants.begin(), kVariants.end(),
                       [v](const VariantInfo& i) { return i.variant == v; });
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

std::string_view variant_name(Variant variant) { return info(variant).name; }
std::string_view variant_display_name(Variant variant) { return info(variant).display; }

std::string valid_variant_names() {
  std::string out;
  for (const auto& v : kVariants) {
    if (!out.empty()) out += ", ";
    out += v.name;
  }
  return out;
}

Variant parse_variant(std::string_view name) {
  for (const auto& v : kVariants) {
    if (v.name == name) return v.variant;
  }
  throw ConfigError("unknown variant '" + std::string(name) + "' (valid: " +
                    valid_variant_names() + ")");
}

std::string_view qkv_mode_name(QkvMode mode) {
  return mode == QkvMode::Full ? "full" : "literal";
}

QkvMode parse_qkv_mode(std::string_view name) {
  if (name == "full") return QkvMode::Full;
  if (name == "literal") return QkvMode::Literal;
  throw ConfigError("unknown qkv_mode '" + std::string(name) + "' (valid: full, literal)");
}

std::size_t ModelConfig::conv_length() const {
  return ops::conv1d_output_length(hidden, filter_length, stride);
}

std::size_t ModelConfig::kim_pooled_length(std::size_t i) const {
  return std::min(kim_pool, ops::conv1d_output_length(hidden, kim_windows.at(i), stride));
}

std::size_t ModelConfig::kim_feature_length() const {
  return kim_pooled_length(0) + kim_pooled_length(1) + kim_pooled_length(2);
}

void ModelConfig::validate() const {
  require(n_classes >= 2, "n_classes must be >= 2");
  require(n_layers >= 1 && hidden >= 1, "n_layers and hidden must be positive");
  require(stride >= 1, "stride must be >= 1");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
  require(layer_norm_eps > 0.0, "layer_norm_eps must be positive");
  switch (variant) {
    case Variant::Softmax:
      return;
    case Variant::KimCnn:
      for (auto w : kim_windows) {
        require(w >= 1 && w <= hidden, "Kim-CNN window exceeds the hidden size");
      }
      require(kim_pool >= 1, "kim_pool must be positive");
      return;
    default:
      break;
  }
  const bool uses_cnn = variant != Variant::TransEnc;
  const bool uses_encoder = variant != Variant::CnnCls;
  require(d_m >= 1, "d_m must be positive");
  if (uses_cnn) {
    require(n_layers % 3 == 0, "n_layers must be divisible by 3 for CNN[CLS]");
    require(filter_length >= 1 && filter_length <= hidden,
            "filter_length must lie in [1, hidden]");
    require(d_m <= conv_length(), "d_m (" + std::to_string(d_m) +
                                      ") exceeds the convolution output length (" +
                                      std::to_string(conv_length()) + ")");
    if (qkv_mode == QkvMode::Literal) {
      require(rows_per_map() >= 3, "literal qkv_mode needs at least 9 layers");
    }
  }
  if (uses_encoder) {
    require(heads >= 1 && d_k >= 1, "heads and d_k must be positive");
    require(heads * d_k == d_m, "heads * d_v (" + std::to_string(heads * d_k) +
                                    ") must equal d_m (" + std::to_string(d_m) + ")");
    require(outdim >= n_classes, "outdim must be >= n_classes");
  }
}

}  // namespace clstx::models
