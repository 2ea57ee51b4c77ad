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
#include "clstx/models/serialization.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <set>

#include "clstx/detail/binary_io.hpp"
#include "clstx/errors.hpp"

namespace clstx::models {
namespace {

using nlohmann::json;
using detail::get_le;
using detail::put_le;

constexpr char kMagic[4] = {'C', 'L', 'S', 'P'};
constexpr std::uint32_t kVersion = 1;

template <typename V>
void read_field(const json& doc, const char* key, V& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<V>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model config field '") + key + "': " + e.what());
  }
}

class Cursor {
 public:
  explicit Cursor(const std::vector<char>& bytes) : bytes_(bytes) {}
  const unsigned char* take(std::size_t n) {
    if (n > bytes_.size() - pos_) {
      throw CorruptionError("checkpoint truncated: needed " + std::to_string(pos_ + n) +
                            " bytes, file has " + std::to_string(bytes_.size()));
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes_.data() + pos_);
    pos_ += n;
    return p;
  }
  std::uint32_t u32() { return get_le<std::uint32_t>(take(4)); }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<char>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

json to_json(const ModelConfig& cfg) {
  return json{{"variant", std::string(variant_name(cfg.variant))},
              {"qkv_mode", std::string(qkv_mode_name(cfg.qkv_mode))},
              {"n_layers", cfg.n_layers},
              {"hidden", cfg.hidden},
              {"d_m", cfg.d_m},
              {"outdim", cfg.outdim},
              {"heads", cfg.heads},
              {"d_k", cfg.d_k},
              {"filter_length", cfg.filter_length},
              {"stride", cfg.stride},
              {"dropout", cfg.dropout},
              {"n_classes", cfg.n_classes},
              {"kim_windows", cfg.kim_windows},
              {"kim_pool", cfg.kim_pool},
              {"layer_norm_eps", cfg.layer_norm_eps}};
}

ModelConfig model_config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("model config must be a JSON object");
  static const std::set<std::string> known{
      "variant", "qkv_mode", "n_layers", "hidden",    "d_m",      "outdim",        "heads",
      "d_k",     "d_v",      "filter_length", "stride", "dropout", "n_classes", "kim_windows",
      "kim_pool", "layer_norm_eps"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw ConfigError("unknown model config field '" + key + "'");
  }
  ModelConfig cfg;
  std::string name;
  read_field(doc, "variant", name);
  if (!name.empty()) cfg.variant = parse_variant(name);
  name.clear();
  read_field(doc, "qkv_mode", name);
  if (!name.empty()) cfg.qkv_mode = parse_qkv_mode(name);
  read_field(doc, "n_layers", cfg.n_layers);
  read_field(doc, "hidden", cfg.hidden);
  read_field(doc, "d_m", cfg.d_m);
  read_field(doc, "outdim", cfg.outdim);
  read_field(doc, "heads", cfg.heads);
  read_field(doc, "d_k", cfg.d_k);
  if (doc.contains("d_v")) {
    std::size_t d_v = 0;
    read_field(doc, "d_v", d_v);
    if (doc.contains("d_k") && d_v != cfg.d_k) throw ConfigError("d_v must equal d_k");
    cfg.d_k = d_v;
  }
  read_field(doc, "filter_length", cfg.filter_length);
  read_field(doc, "stride", cfg.stride);
  read_field(doc, "dropout", cfg.dropout);
  read_field(doc, "n_classes", cfg.n_classes);
  read_field(doc, "kim_windows", cfg.kim_windows);
  read_field(doc, "kim_pool", cfg.kim_pool);
  read_field(doc, "layer_norm_eps", cfg.layer_norm_eps);
  return cfg;
}

void write_checkpoint(const std::filesystem::path& path, const ModelConfig& cfg,
                      const ParameterStore<float>& params) {
  std::vector<char> out(kMagic, kMagic + 4);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.variant));
  const std::string blob = to_json(cfg).dump();
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(blob.size()));
  out.insert(out.end(), blob.begin(), blob.end());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.count()));
  for (const auto& e : params.entries()) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.name.size()));
    out.insert(out.end(), e.name.begin(), e.name.end());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.tensor.rank()));
    for (auto extent : e.tensor.shape()) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(extent));
    detail::encode_f32(e.tensor.values(), out);
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("failed writing '" + path.string() + "'");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path.string() + "'");
  const std::vector<char> bytes((std::istreambuf_iterator<char>(file)),
                                std::istreambuf_iterator<char>());
  Cursor cur(bytes);
  if (bytes.size() < 4 || !std::equal(kMagic, kMagic + 4, bytes.begin())) {
    throw FormatError("'" + path.string() + "' is not a CLSP checkpoint (bad magic)");
  }
  cur.take(4);
  if (const auto version = cur.u32(); version != kVersion) {
    throw FormatError("unsupported CLSP version " + std::to_string(version));
  }
  const auto variant_id = cur.u32();
  const auto blob_len = cur.u32();
  const auto* blob = cur.take(blob_len);
  Checkpoint ckpt;
  try {
    ckpt.config = model_config_from_json(json::parse(blob, blob + blob_len));
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint config is not valid JSON: ") + e.what());
  }
  if (static_cast<std::uint32_t>(ckpt.config.variant) != variant_id) {
    throw FormatError("checkpoint variant id disagrees with its config");
  }
  std::map<std::string, ParamSpec> catalog;
  for (auto& spec : parameter_catalog(ckpt.config)) catalog.emplace(spec.name, spec);

  const auto count = cur.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = cur.u32();
    const auto* name_bytes = cur.take(name_len);
    std::string name(reinterpret_cast<const char*>(name_bytes), name_len);
    Shape shape(cur.u32());
    for (auto& extent : shape) extent = cur.u32();
    auto it = catalog.find(name);
    if (it == catalog.end() || it->second.shape != shape) {
      throw FormatError("checkpoint tensor '" + name + "' " + shape_string(shape) +
                        " does not match the model catalog");
    }
    auto& t = ckpt.params.add(name, shape, it->second.group);
    detail::decode_f32(cur.take(t.size() * 4), t.values());
  }
  if (ckpt.params.count() != catalog.size()) {
    throw FormatError("checkpoint holds " + std::to_string(ckpt.params.count()) + " of " +
                      std::to_string(catalog.size()) + " parameters");
  }
  if (!cur.done()) throw FormatError("trailing bytes after the last checkpoint tensor");
  return ckpt;
}

}  // namespace clstx::models
