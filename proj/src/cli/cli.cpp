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
#include "clstx/cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "clstx/data/embedding_store.hpp"
#include "clstx/errors.hpp"
#include "clstx/evaluation/aso.hpp"
#include "clstx/evaluation/cross_validation.hpp"
#include "clstx/models/serialization.hpp"
#include "clstx/training/config.hpp"
#include "clstx/training/trainer.hpp"
#include "json.hpp"

namespace clstx::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out.flush()) throw IoError("write to '" + path + "' failed");
}

std::string dataset_name(const std::string& path) { return fs::path(path).stem().string(); }

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    std::size_t used = 0;
    std::uint64_t value = 0;
    try {
      if (!item.empty() && item[0] == '-') throw std::invalid_argument("negative");
      value = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) {
      throw InvalidArgument("--seeds expects comma-separated non-negative integers, got '" +
                            text + "'");
    }
    seeds.push_back(value);
  }
  if (seeds.empty()) throw InvalidArgument("--seeds is empty");
  return seeds;
}

// Config file sections fill in model fields; the dataset supplies the stack
// geometry and class count unless the file pins them.
training::RunConfig load_run_config(const std::string& config_path,
                                    const std::optional<models::Variant>& variant,
                                    const data::EmbeddingDataset& ds) {
  json doc = json::object();
  if (!config_path.empty()) {
    try {
      doc = read_json_file(config_path);
    } catch (const FormatError& e) {
      throw ConfigError(e.what());
    }
  }
  auto run = training::run_config_from_json(doc);
  const json model = doc.contains("model") ? doc.at("model") : json::object();
  if (!model.contains("n_layers")) run.model.n_layers = ds.n_layers;
  if (!model.contains("hidden")) run.model.hidden = ds.hidden;
  if (!model.contains("n_classes")) run.model.n_classes = ds.n_classes;
  if (variant) run.model.variant = *variant;
  run.model.validate();
  return run;
}

std::optional<models::Variant> variant_option(const std::string& name) {
  if (name.empty()) return std::nullopt;
  return models::parse_variant(name);
}

int exit_code_for(std::string_view kind) {
  if (kind == "config" || kind == "invalid-argument") return kUsageError;
  if (kind == "numeric" || kind == "training") return kTrainingFailure;
  return kDataError;
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

struct SynthArgs {
  data::SynthOptions options;
  std::string out;
};

struct TrainArgs {
  std::string data, variant, config, out_params, out_report;
  std::uint64_t seed = 0;
  std::size_t folds = 0;
  std::size_t parallel_folds = 1;
  bool verbose = false;
};

struct EvaluateArgs {
  std::string data, variant, config, out;
  std::string seeds = "1,2,3,4,5";
  std::size_t folds = 5;
  std::size_t parallel_folds = 1;
};

struct CompareArgs {
  std::vector<std::string> results;
  std::string out;
  double alpha = 0.05;
  std::size_t bootstrap = 1000;
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& args, std::ostream& out) {
  const auto ds = data::synth_generate(args.options);
  data::ManifestInfo info;
  info.dataset = dataset_name(args.out);
  info.source = "synthetic";
  const auto manifest = data::write_dataset(ds, args.out, info);
  out << "wrote " << ds.n_samples() << " samples (" << ds.n_layers << "x" << ds.hidden << ", "
      << ds.n_classes << " classes) to " << args.out << "\n"
      << "checksum: " << manifest.checksum << "\n";
  return kSuccess;
}

training::TrainHooks progress_hooks(bool verbose, std::ostream& err) {
  training::TrainHooks hooks;
  if (verbose) {
    hooks.on_step = [&err](std::size_t step, double loss) {
      if (step % 100 == 0) err << "step " << step << " loss " << loss << "\n";
    };
  }
  return hooks;
}

int cmd_train(const TrainArgs& args, bool seed_given, std::ostream& out, std::ostream& err) {
  const auto variant = variant_option(args.variant);
  const auto ds = data::read_dataset(args.data);
  auto run = load_run_config(args.config, variant, ds);
  const std::uint64_t seed = seed_given ? args.seed : run.train.seed;
  run.train.seed = seed;
  auto config_doc = training::to_json(run);

  if (args.folds > 0) {
    evaluation::CvOptions options;
    options.seeds = {seed};
    options.folds = args.folds;
    options.parallel_folds = args.parallel_folds;
    std::optional<models::ParameterStore<float>> first;
    auto report = evaluation::run_cv(
        ds, run, options, dataset_name(args.data),
        [&](const evaluation::FoldContext& ctx, const models::ParameterStore<float>& params) {
          if (ctx.fold == 0) first = params.cast<float>();
        });
    const std::string text = report.to_json().dump(2) + "\n";
    if (args.out_report.empty()) {
      out << text;
    } else {
      write_text(args.out_report, text);
    }
    if (!report.failures.empty()) {
      const auto& f = report.failures.front();
      throw TrainingError(std::to_string(report.failures.size()) + " of " +
                          std::to_string(args.folds) + " folds failed; fold " +
                          std::to_string(f.fold) + ": " + f.reason);
    }
    if (!args.out_params.empty()) models::write_checkpoint(args.out_params, run.model, *first);
    if (!args.out_report.empty()) {
      out << "mean accuracy " << *report.grand_mean << " over " << args.folds << " folds\n";
    }
    return kSuccess;
  }

  if (ds.n_samples() < 2) throw ValidationError("need at least 2 samples for a train/val split");
  std::vector<std::size_t> order(ds.n_samples());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_val = std::max<std::size_t>(1, ds.n_samples() / 10);
  std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(val.begin(), val.end());
  std::sort(train.begin(), train.end());

  auto result = training::train_fold<float>(ds, train, val, run.model, run.train,
                                            progress_hooks(args.verbose, err));
  json report{{"model", evaluation::model_label(run.model)},
              {"variant", std::string(models::variant_name(run.model.variant))},
              {"dataset", dataset_name(args.data)},
              {"seed", seed},
              {"split", "holdout"},
              {"train_size", train.size()},
              {"val_size", val.size()},
              {"steps", result.loss_history.size()},
              {"final_loss", result.loss_history.empty() ? json(nullptr)
                                                         : json(result.loss_history.back())},
              {"accuracy", result.failed ? json(nullptr) : json(result.accuracy)},
              {"failed", result.failed},
              {"failure", result.failed ? json{{"step", result.failed_step},
                                               {"reason", result.failure}}
                                        : json(nullptr)},
              {"config", config_doc}};
  const std::string text = report.dump(2) + "\n";
  if (args.out_report.empty()) {
    out << text;
  } else {
    write_text(args.out_report, text);
  }
  if (result.failed) throw TrainingError(result.failure);
  if (!args.out_params.empty()) models::write_checkpoint(args.out_params, run.model, result.params);
  if (!args.out_report.empty()) {
    out << "accuracy " << result.accuracy << " on " << val.size() << " held-out samples\n";
  }
  return kSuccess;
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
  const auto variant = variant_option(args.variant);
  evaluation::CvOptions options;
  options.seeds = parse_seeds(args.seeds);
  options.folds = args.folds;
  options.parallel_folds = args.parallel_folds;
  const auto ds = data::read_dataset(args.data);
  const auto run = load_run_config(args.config, variant, ds);
  const auto report = evaluation::run_cv(ds, run, options, dataset_name(args.data));
  const std::string text = report.to_json().dump(2) + "\n";
  if (args.out.empty()) {
    out << text;
  } else {
    write_text(args.out, text);
  }
  for (const auto& f : report.failures) {
    err << "warning: seed " << f.seed << " fold " << f.fold << " failed: " << one_line(f.reason)
        << "\n";
  }
  if (!report.grand_mean) throw TrainingError("every fold failed");
  if (!args.out.empty()) {
    out << "grand mean " << *report.grand_mean << " over " << options.seeds.size()
        << " seeds x " << options.folds << " folds\n";
  }
  return kSuccess;
}

int cmd_compare(const CompareArgs& args, std::ostream& out) {
  if (args.results.size() < 2) {
    throw InvalidArgument("compare needs at least two reports, got " +
                          std::to_string(args.results.size()));
  }
  std::vector<evaluation::EvalReport> reports;
  for (const auto& path : args.results) {
    reports.push_back(evaluation::EvalReport::from_json(read_json_file(path)));
  }
  evaluation::AsoOptions aso;
  aso.n_bootstrap = args.bootstrap;
  aso.seed = args.seed;
  const auto matrix = evaluation::compare_all(reports, args.alpha, aso);
  if (!args.out.empty()) write_text(args.out, matrix.to_json().dump(2) + "\n");
  out << matrix.to_table();
  return kSuccess;
}

int cmd_inspect(const std::string& path, std::ostream& out) {
  if (path.empty()) throw InvalidArgument("--data must name a file");
  const auto ds = data::read_dataset(path);
  const auto checksum = data::file_checksum(path);
  out << "file: " << path << "\n"
      << "format: CLSB v" << data::kClsbVersion << "\n"
      << "n_samples: " << ds.n_samples() << "\n"
      << "n_layers: " << ds.n_layers << "\n"
      << "hidden: " << ds.hidden << "\n"
      << "n_classes: " << ds.n_classes << "\n"
      << "class_counts:";
  for (auto c : ds.class_counts()) out << " " << c;
  out << "\nchecksum: " << checksum << "\n";
  if (!fs::exists(data::manifest_path(path))) {
    out << "manifest: absent\n";
    return kSuccess;
  }
  const auto manifest = data::read_manifest(path);
  if (manifest.checksum != checksum) {
    throw CorruptionError("checksum " + checksum + " does not match manifest " +
                          manifest.checksum);
  }
  out << "manifest: ok\n";
  return kSuccess;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"CNN-enhanced transformer-encoder heads over per-layer [CLS] stacks", "clstx"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic CLSB dataset");
  synth->add_option("--classes", synth_args.options.n_classes, "Number of classes")
      ->check(CLI::Range(2u, 1u << 20))
      ->capture_default_str();
  synth->add_option("--samples", synth_args.options.n_samples, "Number of samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--separation", synth_args.options.separation, "Class-mean distance scale")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth->add_option("--seed", synth_args.options.seed, "Generator seed")->capture_default_str();
  synth->add_option("--layers", synth_args.options.n_layers, "Layers per stack")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--hidden", synth_args.options.hidden, "Hidden size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--out", synth_args.out, "Output CLSB path")->required();

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train one model and write a checkpoint");
  train->add_option("--data", train_args.data, "CLSB dataset")->required();
  train->add_option("--variant", train_args.variant, "Model variant: " + models::valid_variant_names());
  train->add_option("--config", train_args.config, "JSON config with model/train sections");
  auto* train_seed = train->add_option("--seed", train_args.seed, "Run seed");
  train->add_option("--out-params", train_args.out_params, "Checkpoint output path");
  train->add_option("--out-report", train_args.out_report, "Report output path");
  train->add_option("--folds", train_args.folds, "Cross-validate with this many folds")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
  train->add_option("--parallel-folds", train_args.parallel_folds, "Concurrent fold workers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_flag("--verbose", train_args.verbose, "Print the loss every 100 steps");

  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "Multi-seed k-fold cross-validation");
  evaluate->add_option("--data", eval_args.data, "CLSB dataset")->required();
  evaluate->add_option("--variant", eval_args.variant, "Model variant: " + models::valid_variant_names());
  evaluate->add_option("--folds", eval_args.folds, "Folds per seed")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000}))
      ->capture_default_str();
  evaluate->add_option("--seeds", eval_args.seeds, "Comma-separated seeds")->capture_default_str();
  evaluate->add_option("--config", eval_args.config, "JSON config with model/train sections");
  evaluate->add_option("--out", eval_args.out, "Report output path");
  evaluate->add_option("--parallel-folds", eval_args.parallel_folds, "Concurrent fold workers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CompareArgs compare_args;
  auto* compare = app.add_subcommand("compare", "Pairwise ASO comparison of evaluation reports");
  compare->add_option("--results", compare_args.results, "Evaluation report JSON files")
      ->required();
  compare->add_option("--alpha", compare_args.alpha, "Family-wise significance level")
      ->check(CLI::Range(1e-12, 0.5))
      ->capture_default_str();
  compare->add_option("--out", compare_args.out, "Matrix JSON output path");
  compare->add_option("--bootstrap", compare_args.bootstrap, "Bootstrap resamples")
      ->capture_default_str();
  compare->add_option("--seed", compare_args.seed, "Bootstrap seed")->capture_default_str();

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Print a CLSB header and label statistics");
  inspect->add_option("--data", inspect_path, "CLSB dataset")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << "\n";
    return kUsageError;
  }

  try {
    if (*synth) return cmd_synth(synth_args, out);
    if (*train) return cmd_train(train_args, train_seed->count() > 0, out, err);
    if (*evaluate) return cmd_evaluate(eval_args, out, err);
    if (*compare) return cmd_compare(compare_args, out);
    if (*inspect) return cmd_inspect(inspect_path, out);
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << one_line(e.what()) << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << "\n";
    return kDataError;
  }
  return kUsageError;
}

}  // namespace clstx::cli
