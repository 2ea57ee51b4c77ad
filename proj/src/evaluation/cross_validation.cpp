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
#include "clstx/evaluation/cross_validation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "clstx/errors.hpp"
#include "clstx/training/trainer.hpp"

namespace clstx::evaluation {
namespace {

using nlohmann::json;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

std::optional<double> mean_of(const std::vector<std::optional<double>>& xs) {
  double total = 0;
  std::size_t count = 0;
  for (const auto& x : xs) {
    if (x) total += *x, ++count;
  }
  if (count == 0) return std::nullopt;
  return total / static_cast<double>(count);
}

}  // namespace

std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("invalid split: need at least 2 folds, got " + std::to_string(k));
  if (n < k) {
    throw InvalidArgument("invalid split: " + std::to_string(n) + " samples cannot fill " +
                          std::to_string(k) + " folds");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> bounds{0};
  for (std::size_t f = 0; f < k; ++f) bounds.push_back(bounds.back() + n / k + (f < n % k ? 1 : 0));

  std::vector<Fold> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      auto& dst = (i >= bounds[f] && i < bounds[f + 1]) ? folds[f].val : folds[f].train;
      dst.push_back(order[i]);
    }
  }
  return folds;
}

json EvalReport::to_json() const {
  json acc = json::array();
  for (const auto& row : accuracies) {
    json r = json::array();
    for (const auto& a : row) r.push_back(optional_number(a));
    acc.push_back(std::move(r));
  }
  json means = json::array();
  for (const auto& m : seed_means) means.push_back(optional_number(m));
  json fails = json::array();
  for (const auto& f : failures) {
    fails.push_back({{"seed", f.seed}, {"fold", f.fold}, {"step", f.step}, {"reason", f.reason}});
  }
  json doc{{"model", model},
           {"variant", variant},
           {"dataset", dataset},
           {"seeds", seeds},
           {"folds", folds},
           {"accuracies", std::move(acc)},
           {"seed_means", std::move(means)},
           {"grand_mean", optional_number(grand_mean)},
           {"failures", std::move(fails)}};
  if (!config.is_null()) doc["config"] = config;
  return doc;
}

EvalReport EvalReport::from_json(const json& doc) {
  EvalReport r;
  try {
    r.model = doc.at("model").get<std::string>();
    r.variant = doc.value("variant", std::string{});
    r.dataset = doc.value("dataset", std::string{});
    r.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    r.folds = doc.at("folds").get<std::size_t>();
    for (const auto& row : doc.at("accuracies")) {
      auto& out = r.accuracies.emplace_back();
      for (const auto& a : row) out.push_back(read_optional(a));
    }
    for (const auto& m : doc.at("seed_means")) r.seed_means.push_back(read_optional(m));
    r.grand_mean = read_optional(doc.at("grand_mean"));
    for (const auto& f : doc.value("failures", json::array())) {
      r.failures.push_back({f.at("seed").get<std::uint64_t>(), f.at("fold").get<std::size_t>(),
                            f.at("step").get<std::size_t>(), f.at("reason").get<std::string>()});
    }
    if (doc.contains("config")) r.config = doc.at("config");
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed evaluation report: ") + e.what());
  }
  if (r.seed_means.size() != r.seeds.size() || r.accuracies.size() != r.seeds.size()) {
    throw FormatError("malformed evaluation report: seed count mismatch");
  }
  return r;
}

std::vector<double> EvalReport::scores() const {
  std::vector<double> out;
  for (const auto& m : seed_means) {
    if (m) out.push_back(*m);
  }
  return out;
}

EvalReport run_cv(std::size_t n_samples, const CvOptions& options, const FoldTrainer& trainer) {
  if (options.seeds.empty()) throw InvalidArgument("run_cv: no seeds given");
  const std::size_t k = options.folds;
  std::vector<std::vector<Fold>> splits;
  for (auto seed : options.seeds) splits.push_back(kfold_split(n_samples, k, seed));

  const std::size_t jobs = options.seeds.size() * k;
  std::vector<FoldOutcome> outcomes(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t s = j / k, f = j % k;
      try {
        const FoldContext ctx{options.seeds[s], f, options.seeds[s] ^ static_cast<std::uint64_t>(f)};
        outcomes[j] = trainer(splits[s][f], ctx);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = jobs;
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(options.parallel_folds, 1, jobs);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  EvalReport report;
  report.seeds = options.seeds;
  report.folds = k;
  for (std::size_t s = 0; s < options.seeds.size(); ++s) {
    auto& row = report.accuracies.emplace_back();
    auto& secs = report.fold_seconds.emplace_back();
    for (std::size_t f = 0; f < k; ++f) {
      const auto& o = outcomes[s * k + f];
      secs.push_back(o.seconds);
      if (o.failed) {
        row.emplace_back();
        report.failures.push_back({options.seeds[s], f, o.failed_step, o.failure});
      } else {
        row.emplace_back(o.accuracy);
      }
    }
    report.seed_means.push_back(mean_of(row));
  }
  report.grand_mean = mean_of(report.seed_means);
  return report;
}

std::string model_label(const models::ModelConfig& cfg) {
  std::string label(models::variant_display_name(cfg.variant));
  if (cfg.qkv_mode == models::QkvMode::Literal && cfg.variant == models::Variant::CnnTransEnc) {
    label += " (literal)";
  }
  return label;
}

EvalReport run_cv(const data::EmbeddingDataset& dataset, const training::RunConfig& run,
                  const CvOptions& options, std::string dataset_name,
                  const FoldParamsSink& sink) {
  training::check_compatible(dataset, run.model);
  run.train.validate();
  std::mutex sink_mutex;
  auto trainer = [&](const Fold& fold, const FoldContext& ctx) {
    auto cfg = run.train;
    cfg.seed = ctx.fold_seed;
    const auto start = std::chrono::steady_clock::now();
    auto r = training::train_fold<float>(dataset, fold.train, fold.val, run.model, cfg);
    FoldOutcome out{r.accuracy, r.failed, r.failed_step, r.failure, 0};
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (sink && !r.failed) {
      std::lock_guard lock(sink_mutex);
      sink(ctx, r.params);
    }
    return out;
  };
  auto report = run_cv(dataset.n_samples(), options, trainer);
  report.model = model_label(run.model);
  report.variant = std::string(models::variant_name(run.model.variant));
  report.dataset = std::move(dataset_name);
  auto config = training::to_json(run);
  config["train"].erase("seed");
  report.config = std::move(config);
  return report;
}

}  // namespace clstx::evaluation
