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
#include "clstx/evaluation/aso.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "clstx/errors.hpp"

namespace clstx::evaluation {
namespace {

using nlohmann::json;

std::vector<double> sorted_copy(std::span<const double> xs) {
  std::vector<double> out(xs.begin(), xs.end());
  std::sort(out.begin(), out.end());
  return out;
}

void check_scores(std::span<const double> xs, const char* which) {
  if (xs.empty()) throw InvalidArgument(std::string("ASO: score list ") + which + " is empty");
  for (double x : xs) {
    if (!std::isfinite(x)) throw InvalidArgument(std::string("ASO: non-finite score in ") + which);
  }
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

double empirical_quantile(std::span<const double> sorted, double t) {
  const auto n = sorted.size();
  auto idx = static_cast<std::size_t>(std::ceil(t * static_cast<double>(n)));
  idx = std::clamp<std::size_t>(idx, 1, n);
  return sorted[idx - 1];
}

std::optional<double> violation_ratio(std::span<const double> sorted_a,
                                      std::span<const double> sorted_b, std::size_t grid_points) {
  double violation = 0, total = 0;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(grid_points);
    const double d = empirical_quantile(sorted_b, t) - empirical_quantile(sorted_a, t);
    total += d * d;
    if (d > 0) violation += d * d;
  }
  if (total == 0) return std::nullopt;
  return violation / total;
}

AsoResult aso_epsilon_min(std::span<const double> scores_a, std::span<const double> scores_b,
                          double alpha, const AsoOptions& options) {
  check_scores(scores_a, "A");
  check_scores(scores_b, "B");
  if (!(alpha > 0 && alpha < 0.5)) {
    throw InvalidArgument("ASO: alpha must lie in (0, 0.5), got " + std::to_string(alpha));
  }
  if (options.grid_points == 0) throw InvalidArgument("ASO: quantile grid is empty");

  AsoResult result;
  result.alpha = alpha;
  result.n_a = scores_a.size();
  result.n_b = scores_b.size();
  result.n_bootstrap = options.n_bootstrap;

  const auto a = sorted_copy(scores_a);
  const auto b = sorted_copy(scores_b);
  const auto eps = violation_ratio(a, b, options.grid_points);
  if (!eps) {
    result.degenerate = true;
    return result;
  }
  result.epsilon_hat = *eps;

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick_a(0, a.size() - 1), pick_b(0, b.size() - 1);
  std::vector<double> ra(a.size()), rb(b.size()), draws;
  draws.reserve(options.n_bootstrap);
  for (std::size_t r = 0; r < options.n_bootstrap; ++r) {
    for (auto& x : ra) x = a[pick_a(rng)];
    for (auto& x : rb) x = b[pick_b(rng)];
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    // Resamples that collapse onto one quantile function carry no order information.
    if (auto e = violation_ratio(ra, rb, options.grid_points)) draws.push_back(*e);
  }
  if (draws.size() > 1) {
    double mean = 0;
    for (double d : draws) mean += d;
    mean /= static_cast<double>(draws.size());
    double var = 0;
    for (double d : draws) var += (d - mean) * (d - mean);
    result.sigma_hat = std::sqrt(var / static_cast<double>(draws.size() - 1));
  }

  const double z = boost::math::quantile(boost::math::normal_distribution<double>(), alpha);
  result.epsilon_min = std::clamp(result.epsilon_hat + z * result.sigma_hat, 0.0, 1.0);
  return result;
}

json ComparisonMatrix::to_json() const {
  json rows = json::array();
  for (const auto& row : epsilon_min) {
    json r = json::array();
    for (const auto& v : row) r.push_back(v ? json(*v) : json(nullptr));
    rows.push_back(std::move(r));
  }
  return json{{"models", models},
              {"sample_sizes", sample_sizes},
              {"alpha", alpha},
              {"adjusted_alpha", adjusted_alpha},
              {"comparisons", comparisons},
              {"n_bootstrap", n_bootstrap},
              {"epsilon_min", std::move(rows)}};
}

std::string ComparisonMatrix::to_table() const {
  std::size_t first = 0, width = 5;
  for (const auto& m : models) {
    first = std::max(first, m.size());
    width = std::max(width, m.size());
  }
  std::ostringstream out;
  auto pad = [&](const std::string& s, std::size_t w, bool left) {
    const std::string fill(w > s.size() ? w - s.size() : 0, ' ');
    out << (left ? s + fill : fill + s);
  };
  pad("", first, true);
  for (const auto& m : models) {
    out << "  ";
    pad(m, width, false);
  }
  out << '\n';
  for (std::size_t i = 0; i < models.size(); ++i) {
    pad(models[i], first, true);
    for (std::size_t j = 0; j < models.size(); ++j) {
      out << "  ";
      const auto& v = epsilon_min[i][j];
      pad(v ? fixed(*v, 2) : "-", width, false);
    }
    out << '\n';
  }
  out << "alpha = " << alpha << ", Bonferroni-adjusted alpha = " << adjusted_alpha << " over "
      << comparisons << " comparisons\n";
  return out.str();
}

ComparisonMatrix compare_all(const std::vector<EvalReport>& reports, double alpha,
                             const AsoOptions& options) {
  ComparisonMatrix out;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<double>> scores;
  for (const auto& r : reports) {
    auto [it, inserted] = index.try_emplace(r.model, out.models.size());
    if (inserted) {
      out.models.push_back(r.model);
      scores.emplace_back();
    }
    const auto s = r.scores();
    scores[it->second].insert(scores[it->second].end(), s.begin(), s.end());
  }
  const std::size_t m = out.models.size();
  if (m < 2) throw InvalidArgument("compare needs at least two distinct models");
  for (std::size_t i = 0; i < m; ++i) {
    if (scores[i].empty()) throw InvalidArgument("model '" + out.models[i] + "' has no scores");
    if (scores[i].size() != scores[0].size()) {
      throw InvalidArgument("mismatched score counts: '" + out.models[0] + "' has " +
                            std::to_string(scores[0].size()) + ", '" + out.models[i] + "' has " +
                            std::to_string(scores[i].size()));
    }
    out.sample_sizes.push_back(scores[i].size());
  }

  out.alpha = alpha;
  out.comparisons = m * (m - 1);
  out.adjusted_alpha = alpha / static_cast<double>(out.comparisons);
  out.n_bootstrap = options.n_bootstrap;
  out.epsilon_min.assign(m, std::vector<std::optional<double>>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      AsoOptions pair = options;
      pair.seed = options.seed + i * m + j;
      out.epsilon_min[i][j] = aso_epsilon_min(scores[i], scores[j], out.adjusted_alpha, pair).epsilon_min;
    }
  }
  return out;
}

}  // namespace clstx::evaluation
