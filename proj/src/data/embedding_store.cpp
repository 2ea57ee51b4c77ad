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
#include "clstx/data/embedding_store.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <memory>
#include <random>
#include <sstream>

#include "clstx/detail/binary_io.hpp"
#include "clstx/errors.hpp"

namespace clstx::data {
namespace {

using detail::get_le;
using detail::put_le;
using nlohmann::json;

constexpr char kMagic[4] = {'C', 'L', 'S', 'B'};

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

ClsbHeader parse_header(const unsigned char* bytes, const std::string& where) {
  if (!std::equal(kMagic, kMagic + 4, bytes)) {
    throw FormatError(where + ": bad magic, not a CLSB file");
  }
  if (const auto version = get_le<std::uint32_t>(bytes + 4); version != kClsbVersion) {
    throw FormatError(where + ": unsupported CLSB version " + std::to_string(version));
  }
  ClsbHeader h;
  h.n_layers = get_le<std::uint32_t>(bytes + 8);
  h.hidden = get_le<std::uint32_t>(bytes + 12);
  h.n_classes = get_le<std::uint32_t>(bytes + 16);
  h.n_samples = get_le<std::uint64_t>(bytes + 20);
  if (get_le<std::uint32_t>(bytes + 28) != 0) {
    throw FormatError(where + ": reserved header field is not zero");
  }
  if (h.n_layers == 0 || h.hidden == 0) throw FormatError(where + ": zero extent in header");
  if (h.n_classes < 2) throw FormatError(where + ": header declares fewer than 2 classes");
  return h;
}

}  // namespace

std::vector<std::size_t> EmbeddingDataset::class_counts() const {
  std::vector<std::size_t> counts(n_classes, 0);
  for (auto label : labels) {
    if (label < n_classes) ++counts[label];
  }
  return counts;
}

void EmbeddingDataset::validate() const {
  if (n_classes < 2) throw ValidationError("dataset needs at least 2 classes");
  if (n_layers == 0 || hidden == 0) throw ValidationError("dataset extents must be positive");
  if (stacks.size() != n_samples() * stack_size()) {
    throw ValidationError("payload holds " + std::to_string(stacks.size()) + " values, expected " +
                          std::to_string(n_samples() * stack_size()));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= n_classes) {
      throw ValidationError("label " + std::to_string(labels[i]) + " of sample " +
                            std::to_string(i) + " is outside [0, " + std::to_string(n_classes) +
                            ")");
    }
  }
  for (std::size_t i = 0; i < stacks.size(); ++i) {
    if (!std::isfinite(stacks[i])) {
      throw ValidationError("non-finite embedding value in sample " +
                            std::to_string(i / stack_size()));
    }
  }
}

json Manifest::to_json() const {
  return json{{"dataset", dataset},         {"source", source},
              {"extractor_model", extractor_model}, {"max_length", max_length},
              {"checksum", checksum},       {"created", created}};
}

Manifest Manifest::from_json(const json& doc) {
  try {
    Manifest m;
    m.dataset = doc.at("dataset").get<std::string>();
    m.source = doc.at("source").get<std::string>();
    m.extractor_model = doc.at("extractor_model").get<std::string>();
    m.max_length = doc.at("max_length").get<std::uint32_t>();
    m.checksum = doc.at("checksum").get<std::string>();
    m.created = doc.at("created").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
}

std::uint64_t ClsbHeader::file_size() const { return clsb_file_size(n_samples, n_layers, hidden); }

std::uint64_t clsb_file_size(std::uint64_t n_samples, std::uint32_t n_layers,
                             std::uint32_t hidden) {
  return kClsbHeaderBytes + 4 * n_samples + 4 * n_samples * n_layers * hidden;
}

std::filesystem::path manifest_path(const std::filesystem::path& clsb) {
  return clsb.string() + ".manifest.json";
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path.string() + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 initialization failed");
  }
  std::vector<char> buffer(1 << 20);
  while (file) {
    file.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    if (file.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(file.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  std::ostringstream hex;
  hex << "sha256:";
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

Manifest write_dataset(const EmbeddingDataset& ds, const std::filesystem::path& path,
                       const ManifestInfo& info) {
  ds.validate();
  {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
    std::vector<char> head(kMagic, kMagic + 4);
    put_le<std::uint32_t>(head, kClsbVersion);
    put_le<std::uint32_t>(head, ds.n_layers);
    put_le<std::uint32_t>(head, ds.hidden);
    put_le<std::uint32_t>(head, ds.n_classes);
    put_le<std::uint64_t>(head, ds.n_samples());
    put_le<std::uint32_t>(head, 0);
    for (auto label : ds.labels) put_le<std::uint32_t>(head, label);
    file.write(head.data(), static_cast<std::streamsize>(head.size()));
    std::vector<char> chunk;
    for (std::size_t i = 0; i < ds.n_samples(); ++i) {
      chunk.clear();
      detail::encode_f32(ds.stack(i), chunk);
      file.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    }
    if (!file) throw IoError("failed writing '" + path.string() + "'");
  }
  Manifest m;
  m.dataset = info.dataset.empty() ? path.stem().string() : info.dataset;
  m.source = info.source;
  m.extractor_model = info.extractor_model;
  m.max_length = info.max_length;
  m.checksum = file_checksum(path);
  m.created = utc_timestamp();
  std::ofstream side(manifest_path(path), std::ios::trunc);
  if (!side) throw IoError("cannot write manifest for '" + path.string() + "'");
  side << m.to_json().dump(2) << '\n';
  return m;
}

Manifest read_manifest(const std::filesystem::path& clsb) {
  std::ifstream side(manifest_path(clsb));
  if (!side) throw IoError("missing manifest '" + manifest_path(clsb).string() + "'");
  try {
    return Manifest::from_json(json::parse(side));
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
  }
}

ClsbReader::ClsbReader(const std::filesystem::path& path) : path_(path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw IoError("cannot open '" + path.string() + "': no such file");
  }
  file_.open(path, std::ios::binary);
  if (!file_) throw IoError("cannot open '" + path.string() + "'");
  const auto actual = std::filesystem::file_size(path);
  std::array<unsigned char, kClsbHeaderBytes> bytes{};
  file_.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (file_.gcount() < 4) throw FormatError(path.string() + ": too short for a CLSB header");
  if (!std::equal(kMagic, kMagic + 4, bytes.begin())) {
    throw FormatError(path.string() + ": bad magic, not a CLSB file");
  }
  if (static_cast<std::size_t>(file_.gcount()) < kClsbHeaderBytes) {
    throw CorruptionError(path.string() + ": truncated header, expected " +
                          std::to_string(kClsbHeaderBytes) + " bytes, found " +
                          std::to_string(actual));
  }
  header_ = parse_header(bytes.data(), path.string());
  const auto expected = header_.file_size();
  if (actual != expected) {
    throw CorruptionError(path.string() + ": expected " + std::to_string(expected) +
                          " bytes, found " + std::to_string(actual));
  }
}

std::vector<std::uint32_t> ClsbReader::read_labels() {
  std::vector<unsigned char> raw(4 * header_.n_samples);
  file_.seekg(static_cast<std::streamoff>(header_.labels_offset()));
  file_.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!file_) throw CorruptionError(path_.string() + ": short read in label block");
  std::vector<std::uint32_t> labels(header_.n_samples);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = get_le<std::uint32_t>(&raw[4 * i]);
  return labels;
}

void ClsbReader::read_sample(std::uint64_t index, std::span<float> out) {
  const std::size_t count = std::size_t{header_.n_layers} * header_.hidden;
  if (index >= header_.n_samples || out.size() != count) {
    throw InvalidArgument("read_sample: index or buffer size out of range");
  }
  std::vector<unsigned char> raw(4 * count);
  file_.seekg(static_cast<std::streamoff>(header_.payload_offset() + 4 * count * index));
  file_.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!file_) throw CorruptionError(path_.string() + ": short read in payload");
  detail::decode_f32(raw.data(), out);
}

EmbeddingDataset read_dataset(const std::filesystem::path& path) {
  ClsbReader reader(path);
  const auto& h = reader.header();
  EmbeddingDataset ds;
  ds.n_layers = h.n_layers;
  ds.hidden = h.hidden;
  ds.n_classes = h.n_classes;
  ds.labels = reader.read_labels();
  ds.stacks.resize(ds.n_samples() * ds.stack_size());
  for (std::size_t i = 0; i < ds.n_samples(); ++i) {
    reader.read_sample(i, {ds.stacks.data() + i * ds.stack_size(), ds.stack_size()});
  }
  try {
    ds.validate();
  } catch (const ValidationError& e) {
    throw CorruptionError(path.string() + ": " + e.what());
  }
  return ds;
}

EmbeddingDataset synth_generate(const SynthOptions& options) {
  if (options.n_classes < 2) throw InvalidArgument("synth: need at least 2 classes");
  if (options.n_samples < options.n_classes) {
    throw InvalidArgument("synth: n_samples must be >= n_classes");
  }
  if (!(options.separation >= 0.0)) throw InvalidArgument("synth: separation must be >= 0");
  if (options.n_layers == 0 || options.hidden == 0) {
    throw InvalidArgument("synth: extents must be positive");
  }
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::vector<double>> directions(options.n_classes,
                                              std::vector<double>(options.hidden));
  for (auto& u : directions) {
    double norm = 0;
    for (auto& v : u) {
      v = normal(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (auto& v : u) v /= norm;
  }

  EmbeddingDataset ds;
  ds.n_layers = options.n_layers;
  ds.hidden = options.hidden;
  ds.n_classes = options.n_classes;
  ds.labels.resize(options.n_samples);
  for (std::size_t i = 0; i < options.n_samples; ++i) {
    ds.labels[i] = static_cast<std::uint32_t>(i % options.n_classes);
  }
  std::shuffle(ds.labels.begin(), ds.labels.end(), rng);

  ds.stacks.resize(options.n_samples * ds.stack_size());
  float* out = ds.stacks.data();
  for (std::size_t i = 0; i < options.n_samples; ++i) {
    const auto& u = directions[ds.labels[i]];
    for (std::uint32_t layer = 0; layer < options.n_layers; ++layer) {
      for (std::uint32_t j = 0; j < options.hidden; ++j) {
        *out++ = static_cast<float>(options.separation * u[j] + normal(rng));
      }
    }
  }
  return ds;
}

}  // namespace clstx::data
