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
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace clstx::data {

/// N labeled [CLS] stacks, each n_layers x hidden, stored sample-major.
struct EmbeddingDataset {
  std::uint32_t n_layers = 12;
  std::uint32_t hidden = 768;
  std::uint32_t n_classes = 2;
  std::vector<std::uint32_t> labels;
  std::vector<float> stacks;

  std::size_t n_samples() const { return labels.size(); }
  std::size_t stack_size() const { return std::size_t{n_layers} * hidden; }
  std::span<const float> stack(std::size_t i) const {
    return {stacks.data() + i * stack_size(), stack_size()};
  }
  std::vector<std::size_t> class_counts() const;

  /// Throws ValidationError on out-of-range labels, non-finite values or a
  /// payload whose length disagrees with the extents.
  void validate() const;
};

struct Manifest {
  std::string dataset;
  std::string source;
  std::string extractor_model;
  std::uint32_t max_length = 0;
  std::string checksum;  // "sha256:<hex>" of the whole CLSB file
  std::string created;   // ISO-8601 UTC

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& doc);
};

/// Descriptive manifest fields supplied by the producer.
struct ManifestInfo {
  std::string dataset;
  std::string source = "unspecified";
  std::string extractor_model = "none";
  std::uint32_t max_length = 0;
};

inline constexpr std::size_t kClsbHeaderBytes = 32;
inline constexpr std::uint32_t kClsbVersion = 1;

struct ClsbHeader {
  std::uint32_t n_layers = 0;
  std::uint32_t hidden = 0;
  std::uint32_t n_classes = 0;
  std::uint64_t n_samples = 0;

  std::uint64_t labels_offset() const { return kClsbHeaderBytes; }
  std::uint64_t payload_offset() const { return kClsbHeaderBytes + 4 * n_samples; }
  std::uint64_t file_size() const;
};

/// Exact CLSB size: 32-byte header + 4 bytes per label + 4 bytes per value.
std::uint64_t clsb_file_size(std::uint64_t n_samples, std::uint32_t n_layers,
                             std::uint32_t hidden);

std::filesystem::path manifest_path(const std::filesystem::path& clsb);

/// Writes the CLSB file and its `<path>.manifest.json` sidecar.
Manifest write_dataset(const EmbeddingDataset& ds, const std::filesystem::path& path,
                       const ManifestInfo& info = {});

EmbeddingDataset read_dataset(const std::filesystem::path& path);

Manifest read_manifest(const std::filesystem::path& clsb);

/// "sha256:<hex>" of a file's bytes.
std::string file_checksum(const std::filesystem::path& path);

/// Streaming reader. The header is parsed and checked against the file size
/// before any label or payload byte is read.
class ClsbReader {
 public:
  explicit ClsbReader(const std::filesystem::path& path);

  const ClsbHeader& header() const { return header_; }
  std::vector<std::uint32_t> read_labels();
  /// Reads sample `index` into `out` (n_layers * hidden floats).
  void read_sample(std::uint64_t index, std::span<float> out);

 private:
  std::filesystem::path path_;
  std::ifstream file_;
  ClsbHeader header_;
};

struct SynthOptions {
  std::size_t n_samples = 1000;
  std::uint32_t n_classes = 2;
  std::uint32_t n_layers = 12;
  std::uint32_t hidden = 768;
  double separation = 1.0;
  std::uint64_t seed = 0;
};

/// Per class a seeded unit direction u_c; each sample is
/// separation * u_c on every layer plus independent standard normal noise.
/// Labels are balanced to within one and shuffled.
EmbeddingDataset synth_generate(const SynthOptions& options);

}  // namespace clstx::data
