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
#include "clstx/training/config.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "clstx/errors.hpp"
#include "clstx/models/serialization.hpp"

namespace clstx::training {
namespace {

using nlohmann::json;

template <typename V>
void read_field(const json& doc, const char* key, V& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<V>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("train config field '") + key + "': " + e.what());
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (total_steps == 0) throw ConfigError("total_steps must be positive");
  if (warmup_steps == 0) throw ConfigError("warmup_steps must be positive");
  if (warmup_steps > total_steps) {
    throw ConfigError("warmup_steps (" + std::to_string(warmup_steps) +
                      ") exceeds total_steps (" + std::to_string(total_steps) + ")");
  }
  if (!(lr_max > 0) || !(cnn_lr > 0)) throw ConfigError("learning rates must be positive");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(eps > 0)) throw ConfigError("Adam eps must be positive");
  if (epochs == 0) throw ConfigError("epochs must be positive");
}

double lr_continuous(double t, const TrainConfig& cfg) {
  if (!(t > 0)) throw InvalidArgument("lr schedule is defined for t > 0");
  const double warmup = static_cast<double>(cfg.warmup_steps);
  if (t <= warmup) return t / warmup * cfg.lr_max;
  return cfg.lr_max * std::sqrt(warmup / t);
}

double lr_at(std::size_t t, const TrainConfig& cfg) {
  if (t == 0) throw InvalidArgument("lr_at: steps are 1-based");
  return lr_continuous(static_cast<double>(t), cfg);
}

std::size_t derived_batch_size(std::size_t n_train, const TrainConfig& cfg) {
  if (n_train == 0) throw InvalidArgument("make_batches: empty training split");
  if (cfg.batch_size > 0) return cfg.batch_size;
  const std::size_t want = n_train * cfg.epochs;
  return std::max<std::size_t>(4, (want + cfg.total_steps - 1) / cfg.total_steps);
}

BatchPlan make_batches(std::size_t n_train, const TrainConfig& cfg, std::uint64_t seed) {
  BatchPlan plan;
  plan.batch_size = derived_batch_size(n_train, cfg);
  plan.steps.reserve(cfg.total_steps);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n_train);
  while (plan.steps.size() < cfg.total_steps) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t begin = 0; begin < n_train && plan.steps.size() < cfg.total_steps;
         begin += plan.batch_size) {
      const std::size_t end = std::min(n_train, begin + plan.batch_size);
      plan.steps.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(begin),
                              order.begin() + static_cast<std::ptrdiff_t>(end));
    }
  }
  return plan;
}

json to_json(const TrainConfig& cfg) {
  return json{{"total_steps", cfg.total_steps}, {"warmup_steps", cfg.warmup_steps},
              {"lr_max", cfg.lr_max},           {"cnn_lr", cfg.cnn_lr},
              {"beta1", cfg.beta1},             {"beta2", cfg.beta2},
              {"eps", cfg.eps},                 {"epochs", cfg.epochs},
              {"batch_size", cfg.batch_size},   {"seed", cfg.seed}};
}

TrainConfig train_config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("train config must be a JSON object");
  static const std::set<std::string> known{"total_steps", "warmup_steps", "lr_max", "cnn_lr",
                                           "beta1",       "beta2",        "eps",    "epochs",
                                           "batch_size",  "seed",         "loss"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw ConfigError("unknown train config field '" + key + "'");
  }
  TrainConfig cfg;
  read_field(doc, "total_steps", cfg.total_steps);
  read_field(doc, "warmup_steps", cfg.warmup_steps);
  read_field(doc, "lr_max", cfg.lr_max);
  read_field(doc, "cnn_lr", cfg.cnn_lr);
  read_field(doc, "beta1", cfg.beta1);
  read_field(doc, "beta2", cfg.beta2);
  read_field(doc, "eps", cfg.eps);
  read_field(doc, "epochs", cfg.epochs);
  read_field(doc, "batch_size", cfg.batch_size);
  read_field(doc, "seed", cfg.seed);
  if (doc.contains("loss")) {
    std::string loss;
    read_field(doc, "loss", loss);
    if (loss != "cross-entropy") throw ConfigError("unsupported loss '" + loss + "'");
  }
  cfg.validate();
  return cfg;
}

RunConfig run_config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "model" && key != "train") throw ConfigError("unknown config section '" + key + "'");
  }
  RunConfig cfg;
  if (doc.contains("model")) cfg.model = models::model_config_from_json(doc.at("model"));
  if (doc.contains("train")) cfg.train = train_config_from_json(doc.at("train"));
  return cfg;
}

json to_json(const RunConfig& cfg) {
  return json{{"model", models::to_json(cfg.model)}, {"train", to_json(cfg.train)}};
}

}  // namespace clstx::training
