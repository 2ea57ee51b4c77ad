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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clstx/evaluation/cross_validation.hpp"
#include "json.hpp"

namespace clstx::evaluation {

struct AsoOptions {
  std::size_t grid_points = 1000;
  std::size_t n_bootstrap = 1000;
  std::uint64_t seed = 0;
};

struct AsoResult {
  double epsilon_min = 1.0;
  double epsilon_hat = 1.0;
  double sigma_hat = 0.0;
  double alpha = 0.05;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  std::size_t n_bootstrap = 0;
  /// Both samples share one quantile function, so no order can be claimed.
  bool degenerate = false;
};

/// Empirical quantile of sorted `xs` at level t in (0, 1).
double empirical_quantile(std::span<const double> sorted, double t);

/// Violation ratio of "A almost stochastically dominates B"; nullopt when
/// the quantile functions coincide on the grid.
std::optional<double> violation_ratio(std::span<const double> sorted_a,
                                      std::span<const double> sorted_b, std::size_t grid_points);

/// Almost stochastic order test. Small values mean A is better than B.
AsoResult aso_epsilon_min(std::span<const double> scores_a, std::span<const double> scores_b,
                          double alpha = 0.05, const AsoOptions& options = {});

struct ComparisonMatrix {
  std::vector<std::string> models;
  std::vector<std::size_t> sample_sizes;
  double alpha = 0.05;
  double adjusted_alpha = 0.05;
  std::size_t comparisons = 0;
  std::size_t n_bootstrap = 0;
  /// epsilon_min[row][col]: row model against column model; empty on the diagonal.
  std::vector<std::vector<std::optional<double>>> epsilon_min;

  nlohmann::json to_json() const;
  /// Aligned plain-text rendering with "-" on the diagonal.
  std::string to_table() const;
};

/// Pairwise ASO over models. Reports sharing a model label are stacked by
/// concatenating their seed means in the order given.
ComparisonMatrix compare_all(const std::vector<EvalReport>& reports, double alpha = 0.05,
                             const AsoOptions& options = {});

}  // namespace clstx::evaluation
