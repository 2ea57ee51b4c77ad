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
#include "clstx/evaluation/metrics.hpp"

#include <string>

#include "clstx/errors.hpp"

namespace clstx::evaluation {

double accuracy(std::span<const std::uint32_t> predictions, std::span<const std::uint32_t> labels) {
  if (predictions.size() != labels.size()) {
    throw InvalidArgument("accuracy: " + std::to_string(predictions.size()) + " predictions for " +
                          std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw InvalidArgument("accuracy: no samples");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace clstx::evaluation
