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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "clstx/errors.hpp"
#include "clstx/evaluation/aso.hpp"
#include "clstx/evaluation/cross_validation.hpp"
#include "test_util.hpp"

using namespace clstx;
using namespace clstx::evaluation;

namespace {

bool partitions(const std::vector<Fold>& folds, std::size_t n) {
  std::vector<int> seen(n, 0);
  std::size_t smallest = n, largest = 0;
  for (const auto& f : folds) {
    if (f.train.size() + f.val.size() != n) return false;
    smallest = std::min(smallest, f.val.size());
    largest = std::max(largest, f.val.size());
    for (auto i : f.val) {
      if (i >= n) return false;
      ++seen[i];
    }
    std::vector<int> here(n, 0);
    for (auto i : f.train) ++here[i];
    for (auto i : f.val) ++here[i];
    if (std::any_of(here.begin(), here.end(), [](int c) { return c != 1; })) return false;
  }
  return largest - smallest <= 1 &&
         std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

EvalReport report_with(const std::string& model, std::vector<double> means) {
  EvalReport r;
  r.model = model;
  r.folds = 5;
  for (std::size_t i = 0; i < means.size(); ++i) {
    r.seeds.push_back(i + 1);
    r.seed_means.emplace_back(means[i]);
    r.accuracies.emplace_back(5, means[i]);
  }
  return r;
}

}  // namespace

TEST_CASE("kfold split sizes and determinism") {
  auto folds = kfold_split(10, 5, 3);
  REQUIRE(folds.size() == 5);
  for (const auto& f : folds) CHECK(f.val.size() == 2);
  CHECK(partitions(folds, 10));

  auto eleven = kfold_split(11, 5, 3);
  std::vector<std::size_t> sizes;
  for (const auto& f : eleven) sizes.push_back(f.val.size());
  CHECK(sizes == std::vector<std::size_t>{3, 2, 2, 2, 2});

  auto again = kfold_split(10, 5, 3);
  for (std::size_t f = 0; f < 5; ++f) CHECK(again[f].val == folds[f].val);
  CHECK(kfold_split(10, 5, 4)[0].val != folds[0].val);

  CHECK_THROWS_AS(kfold_split(4, 5, 1), InvalidArgument);
  CHECK_THROWS_AS(kfold_split(4, 1, 1), InvalidArgument);
}

TEST_CASE("kfold partitions for random sizes and seeds") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = testing::random_extent(rng, 5, 300);
    const std::uint64_t seed = rng();
    REQUIRE(partitions(kfold_split(n, 5, seed), n));
  }
}

TEST_CASE("run_cv aggregates folds and seeds") {
  CvOptions opt;
  auto report = run_cv(50, opt, [](const Fold& fold, const FoldContext& ctx) {
    const double jitter = static_cast<double>(ctx.fold_seed % 7) * 1e-3;
    return FoldOutcome::success(static_cast<double>(fold.val.size()) / 10.0 + jitter);
  });
  CHECK(report.seeds.size() == 5);
  CHECK(report.accuracies.size() == 5);
  std::size_t entries = 0;
  for (const auto& row : report.accuracies) entries += row.size();
  CHECK(entries == 25);
  double mean_of_means = 0;
  for (const auto& m : report.seed_means) mean_of_means += *m;
  mean_of_means /= 5;
  CHECK(std::abs(*report.grand_mean - mean_of_means) < 1e-12);
  CHECK(report.failures.empty());
}

TEST_CASE("run_cv fold seeds are seed xor fold") {
  CvOptions opt;
  opt.seeds = {6, 9};
  std::vector<std::uint64_t> seen;
  run_cv(20, opt, [&](const Fold&, const FoldContext& ctx) {
    seen.push_back(ctx.fold_seed);
    return FoldOutcome::success(0.5);
  });
  CHECK(seen == std::vector<std::uint64_t>{6, 7, 4, 5, 2, 9, 8, 11, 10, 13});
}

TEST_CASE("constant predictor on balanced data sits at chance") {
  data::SynthOptions so;
  so.n_samples = 500;
  so.n_classes = 5;
  so.n_layers = 3;
  so.hidden = 2;
  auto ds = data::synth_generate(so);
  auto report = run_cv(ds.n_samples(), CvOptions{}, [&](const Fold& fold, const FoldContext&) {
    std::size_t hits = 0;
    for (auto i : fold.val) hits += ds.labels[i] == 0;
    return FoldOutcome::success(static_cast<double>(hits) / static_cast<double>(fold.val.size()));
  });
  CHECK(*report.grand_mean == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("failed folds are excluded and flagged") {
  CvOptions opt;
  opt.seeds = {1, 2};
  auto report = run_cv(10, opt, [](const Fold&, const FoldContext& ctx) {
    // Fold seed 1 is seed 1 fold 0 and seed 2 fold 3.
    if (ctx.fold_seed == 1) return FoldOutcome::diverged(17, "diverged");
    return FoldOutcome::success(0.8);
  });
  REQUIRE(report.failures.size() == 2);
  CHECK(report.failures[0].seed == 1);
  CHECK(report.failures[0].fold == 0);
  CHECK(report.failures[0].step == 17);
  CHECK(report.failures[1].seed == 2);
  CHECK(report.failures[1].fold == 3);
  CHECK_FALSE(report.accuracies[0][0].has_value());
  CHECK_FALSE(report.accuracies[1][3].has_value());
  CHECK(*report.seed_means[0] == doctest::Approx(0.8));
  CHECK(*report.grand_mean == doctest::Approx(0.8));

  auto all_failed = run_cv(10, opt, [](const Fold&, const FoldContext&) {
    return FoldOutcome::diverged(1, "diverged");
  });
  CHECK_FALSE(all_failed.grand_mean.has_value());
  CHECK(all_failed.to_json()["grand_mean"].is_null());
}

TEST_CASE("parallel folds give the same report") {
  auto trainer = [](const Fold& fold, const FoldContext& ctx) {
    double acc = 0;
    for (auto i : fold.val) acc += static_cast<double>((i * 31 + ctx.fold_seed) % 100) / 100.0;
    return FoldOutcome::success(acc / static_cast<double>(fold.val.size()));
  };
  CvOptions serial, parallel;
  parallel.parallel_folds = 4;
  CHECK(run_cv(40, serial, trainer).to_json().dump() ==
        run_cv(40, parallel, trainer).to_json().dump());

  parallel.seeds = {1};
  CHECK_THROWS_AS(run_cv(40, parallel,
                         [](const Fold&, const FoldContext& ctx) -> FoldOutcome {
                           if (ctx.fold_seed == 3) throw ValidationError("boom");
                           return FoldOutcome::success(1);
                         }),
                  ValidationError);
}

TEST_CASE("report JSON round trip") {
  CvOptions opt;
  opt.seeds = {1, 2};
  auto report = run_cv(10, opt, [](const Fold&, const FoldContext& ctx) {
    if (ctx.fold_seed == 3) return FoldOutcome::diverged(5, "diverged at step 5");
    return FoldOutcome::success(0.25 * static_cast<double>(ctx.fold_seed % 4));
  });
  report.model = "Softmax";
  report.variant = "softmax";
  report.dataset = "toy";
  auto doc = report.to_json();
  for (auto key : {"model", "variant", "dataset", "seeds", "folds", "accuracies", "seed_means",
                   "grand_mean", "failures"}) {
    CHECK(doc.contains(key));
  }
  auto back = EvalReport::from_json(doc);
  CHECK(back.to_json().dump() == doc.dump());
  CHECK_THROWS_AS(EvalReport::from_json(nlohmann::json::parse(R"({"model": "x"})")), FormatError);
}

TEST_CASE("ASO strict dominance, mirror and identical samples") {
  const std::vector<double> a{0.9, 0.91, 0.92}, b{0.1, 0.11, 0.12};
  auto ab = aso_epsilon_min(a, b);
  CHECK(ab.epsilon_hat == 0.0);
  CHECK(ab.epsilon_min == 0.0);
  auto ba = aso_epsilon_min(b, a);
  CHECK(ba.epsilon_hat == 1.0);
  CHECK(ba.epsilon_min == 1.0);
  auto same = aso_epsilon_min(a, a);
  CHECK(same.epsilon_min == 1.0);
  CHECK(same.degenerate);

  CHECK_THROWS_AS(aso_epsilon_min(std::vector<double>{}, b), InvalidArgument);
  CHECK_THROWS_AS(aso_epsilon_min(a, b, 0.5), InvalidArgument);
  CHECK_THROWS_AS(aso_epsilon_min(a, b, 0.0), InvalidArgument);
}

TEST_CASE("empirical quantile function") {
  const std::vector<double> xs{1, 2, 3, 4};
  CHECK(empirical_quantile(xs, 0.01) == 1);
  CHECK(empirical_quantile(xs, 0.25) == 1);
  CHECK(empirical_quantile(xs, 0.26) == 2);
  CHECK(empirical_quantile(xs, 0.99) == 4);
  // Half the mass violates with equal squared gaps.
  const std::vector<double> a{0, 3}, b{1, 2};
  CHECK(*violation_ratio(a, b, 1000) == doctest::Approx(0.5));
}

TEST_CASE("ASO stays in range and is reproducible") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(8), b(6);
    for (auto& x : a) x = normal(rng);
    for (auto& x : b) x = normal(rng);
    AsoOptions opt;
    opt.n_bootstrap = 200;
    opt.seed = trial;
    auto r = aso_epsilon_min(a, b, 0.05, opt);
    CHECK(r.epsilon_min >= 0.0);
    CHECK(r.epsilon_min <= 1.0);
    CHECK(r.epsilon_min == aso_epsilon_min(a, b, 0.05, opt).epsilon_min);
  }
}

TEST_CASE("ASO detects a unit shift") {
  std::size_t below_half = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    std::mt19937_64 rng(1000 + trial);
    std::normal_distribution<double> normal;
    std::vector<double> a(50), b(50);
    for (auto& x : a) x = 1.0 + normal(rng);
    for (auto& x : b) x = normal(rng);
    AsoOptions opt;
    opt.seed = trial;
    below_half += aso_epsilon_min(a, b, 0.05, opt).epsilon_min < 0.5;
  }
  CHECK(below_half >= 95);
}

TEST_CASE("compare_all with Bonferroni correction") {
  std::vector<EvalReport> reports;
  const std::vector<std::string> names{"CNN-Trans-Enc", "Trans-Enc", "CNN[CLS]", "Kim-CNN",
                                       "Softmax"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::vector<double> means;
    for (int s = 0; s < 5; ++s) means.push_back(0.9 - 0.1 * static_cast<double>(i) + 0.001 * s);
    reports.push_back(report_with(names[i], means));
  }
  auto m = compare_all(reports, 0.05);
  CHECK(m.comparisons == 20);
  CHECK(m.adjusted_alpha == doctest::Approx(0.05 / 20));
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      if (i == j) {
        CHECK_FALSE(m.epsilon_min[i][j].has_value());
      } else {
        CHECK(*m.epsilon_min[i][j] == (i < j ? 0.0 : 1.0));
      }
    }
  }
  auto table = m.to_table();
  CHECK(table.find("CNN-Trans-Enc") != std::string::npos);
  CHECK(table.find("0.00") != std::string::npos);
  CHECK(m.to_json()["epsilon_min"][0][0].is_null());
}

TEST_CASE("compare_all stacks datasets and checks counts") {
  std::vector<EvalReport> reports{report_with("A", {0.9, 0.91}), report_with("B", {0.5, 0.51}),
                                  report_with("A", {0.8, 0.81}), report_with("B", {0.4, 0.41})};
  auto m = compare_all(reports);
  CHECK(m.models == std::vector<std::string>{"A", "B"});
  CHECK(m.sample_sizes == std::vector<std::size_t>{4, 4});
  CHECK(m.comparisons == 2);

  CHECK_THROWS_AS(compare_all({report_with("A", {0.9})}), InvalidArgument);
  CHECK_THROWS_AS(compare_all({report_with("A", {0.9, 0.8}), report_with("B", {0.5})}),
                  InvalidArgument);
}
