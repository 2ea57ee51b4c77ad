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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "clstx/cli/cli.hpp"
#include "clstx/models/serialization.hpp"
#include "json.hpp"

using namespace clstx;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string dir() {
  static const fs::path d = [] {
    auto p = fs::temp_directory_path() / "clstx_cli_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return d.string();
}

std::string path(const std::string& name) { return dir() + "/" + name; }

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write(const std::string& p, const std::string& text) { std::ofstream(p) << text; }

// One diagnostic line in the documented format.
bool single_error_line(const std::string& err) {
  return err.rfind("error: ", 0) == 0 && err.find('\n') == err.size() - 1;
}

std::string toy_data(const std::string& name, const std::string& separation) {
  const auto p = path(name);
  if (!fs::exists(p)) {
    auto r = run({"synth", "--classes", "3", "--samples", "90", "--separation", separation,
                  "--seed", "4", "--layers", "6", "--hidden", "16", "--out", p});
    REQUIRE(r.code == 0);
  }
  return p;
}

std::string toy_config(const std::string& name, const std::string& train_section) {
  const auto p = path(name);
  write(p, R"({"model": {"d_m": 6, "heads": 2, "d_k": 3, "outdim": 4, "filter_length": 3,
                "kim_windows": [3, 4, 5], "kim_pool": 6},
      "train": )" + train_section + "}");
  return p;
}

const char* kFastTrain = R"({"total_steps": 60, "warmup_steps": 10, "lr_max": 0.01, "cnn_lr": 0.01})";

}  // namespace

TEST_CASE("synth writes a reproducible file") {
  const auto a = path("a.clsb"), b = path("b.clsb");
  std::vector<std::string> flags{"synth", "--classes", "5", "--samples", "100", "--separation",
                                 "6", "--seed", "7", "--layers", "3", "--hidden", "8", "--out"};
  auto args = flags;
  args.push_back(a);
  auto r1 = run(args);
  CHECK(r1.code == 0);
  args.back() = b;
  CHECK(run(args).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(fs::exists(a + ".manifest.json"));

  auto inspect = run({"inspect", "--data", a});
  CHECK(inspect.code == 0);
  CHECK(inspect.out.find("n_samples: 100") != std::string::npos);
  CHECK(inspect.out.find("class_counts: 20 20 20 20 20") != std::string::npos);
  CHECK(inspect.out.find("manifest: ok") != std::string::npos);
}

TEST_CASE("synth default geometry") {
  const auto p = path("default.clsb");
  CHECK(run({"synth", "--classes", "2", "--samples", "3", "--out", p}).code == 0);
  CHECK(fs::file_size(p) == 32 + 3 * 4 + 3 * 12 * 768 * 4);
}

TEST_CASE("usage errors exit 1 with one line") {
  auto r = run({"synth", "--classes", "1", "--samples", "10", "--out", path("x.clsb")});
  CHECK(r.code == 1);
  CHECK(single_error_line(r.err));
  CHECK_FALSE(fs::exists(path("x.clsb")));

  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"inspect"}).code == 1);

  auto empty = run({"inspect", "--data", ""});
  CHECK(empty.code == 1);
  CHECK(single_error_line(empty.err));

  auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("evaluate") != std::string::npos);
}

TEST_CASE("bad variant lists the valid ones") {
  auto r = run({"train", "--data", toy_data("sep.clsb", "10"), "--variant", "lstm"});
  CHECK(r.code == 1);
  CHECK(single_error_line(r.err));
  for (auto name : {"cnn-trans-enc", "trans-enc", "cnn-cls", "kim-cnn", "softmax"}) {
    CHECK(r.err.find(name) != std::string::npos);
  }
}

TEST_CASE("data errors exit 2") {
  auto missing = run({"train", "--data", path("nope.clsb")});
  CHECK(missing.code == 2);
  CHECK(single_error_line(missing.err));
  CHECK(run({"inspect", "--data", path("nope.clsb")}).code == 2);

  const auto src = toy_data("sep.clsb", "10");
  const auto bad = path("corrupt.clsb");
  fs::copy_file(src, bad, fs::copy_options::overwrite_existing);
  fs::resize_file(bad, fs::file_size(bad) - 7);
  auto corrupt = run({"inspect", "--data", bad});
  CHECK(corrupt.code == 2);
  CHECK(corrupt.err.rfind("error: corruption:", 0) == 0);

  // Same size, different bytes: caught by the manifest checksum.
  const auto tampered = path("tampered.clsb");
  fs::copy_file(src, tampered, fs::copy_options::overwrite_existing);
  fs::copy_file(src + ".manifest.json", tampered + ".manifest.json",
                fs::copy_options::overwrite_existing);
  {
    std::fstream f(tampered, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-1, std::ios::end);
    f.put('\x7f');
  }
  CHECK(run({"inspect", "--data", tampered}).code == 2);
}

TEST_CASE("train on separable data writes a checkpoint and report") {
  const auto data = toy_data("sep.clsb", "10");
  const auto cfg = toy_config("fast.json", kFastTrain);
  const auto params = path("model.clsp"), report = path("train.json");
  auto r = run({"train", "--data", data, "--variant", "cnn-trans-enc", "--config", cfg, "--seed",
                "3", "--out-params", params, "--out-report", report});
  REQUIRE(r.code == 0);
  auto doc = json::parse(slurp(report));
  CHECK(doc["accuracy"].get<double>() >= 0.95);
  CHECK(doc["val_size"] == 9);
  CHECK(doc["train_size"] == 81);
  CHECK(doc["steps"] == 60);
  auto ckpt = models::read_checkpoint(params);
  CHECK(ckpt.config.variant == models::Variant::CnnTransEnc);
  CHECK(ckpt.config.hidden == 16);
  CHECK(ckpt.config.n_classes == 3);

  auto again = run({"train", "--data", data, "--variant", "cnn-trans-enc", "--config", cfg,
                    "--seed", "3", "--out-report", path("train2.json")});
  CHECK(again.code == 0);
  CHECK(slurp(report) == slurp(path("train2.json")));
}

TEST_CASE("train with folds") {
  const auto data = toy_data("sep.clsb", "10");
  const auto cfg = toy_config("fast.json", kFastTrain);
  auto r = run({"train", "--data", data, "--variant", "softmax", "--config", cfg, "--folds", "3",
                "--out-params", path("fold0.clsp")});
  REQUIRE(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["accuracies"].size() == 1);
  CHECK(doc["accuracies"][0].size() == 3);
  CHECK(models::read_checkpoint(path("fold0.clsp")).config.variant == models::Variant::Softmax);
}

TEST_CASE("divergence exits 3") {
  const auto data = toy_data("sep.clsb", "10");
  const auto cfg = toy_config("diverge.json", R"({"total_steps": 20, "warmup_steps": 1, "lr_max": 1e37})");
  auto r = run({"train", "--data", data, "--config", cfg, "--out-report", path("div.json"),
                "--out-params", path("div.clsp")});
  CHECK(r.code == 3);
  CHECK(r.err.rfind("error: training:", 0) == 0);
  CHECK(single_error_line(r.err));
  CHECK(json::parse(slurp(path("div.json")))["failed"] == true);
  CHECK_FALSE(fs::exists(path("div.clsp")));
}

TEST_CASE("config errors exit 1") {
  const auto data = toy_data("sep.clsb", "10");
  write(path("broken.json"), "{not json");
  CHECK(run({"train", "--data", data, "--config", path("broken.json")}).code == 1);
  write(path("unknown.json"), R"({"model": {"depth": 3}})");
  auto r = run({"train", "--data", data, "--config", path("unknown.json")});
  CHECK(r.code == 1);
  CHECK(r.err.find("depth") != std::string::npos);
}

TEST_CASE("evaluate is reproducible") {
  const auto data = toy_data("sep.clsb", "10");
  const auto cfg = toy_config("fast.json", kFastTrain);
  std::vector<std::string> args{"evaluate", "--data", data, "--variant", "kim-cnn", "--config",
                                cfg, "--folds", "3", "--seeds", "1,2", "--out"};
  auto a = args, b = args;
  a.push_back(path("eval_a.json"));
  b.push_back(path("eval_b.json"));
  REQUIRE(run(a).code == 0);
  REQUIRE(run(b).code == 0);
  CHECK(slurp(path("eval_a.json")) == slurp(path("eval_b.json")));
  auto doc = json::parse(slurp(path("eval_a.json")));
  CHECK(doc["seeds"] == json::array({1, 2}));
  CHECK(doc["accuracies"].size() == 2);
  CHECK(doc["accuracies"][0].size() == 3);
  CHECK(doc["model"] == "Kim-CNN");
  CHECK(doc["dataset"] == "sep");

  auto parallel = args;
  parallel.push_back(path("eval_p.json"));
  parallel.insert(parallel.end(), {"--parallel-folds", "3"});
  REQUIRE(run(parallel).code == 0);
  CHECK(slurp(path("eval_p.json")) == slurp(path("eval_a.json")));

  CHECK(run({"evaluate", "--data", data, "--seeds", "1,x"}).code == 1);
  CHECK(run({"evaluate", "--data", data, "--seeds", ""}).code == 1);
}

TEST_CASE("compare reports") {
  auto report = [](const std::string& model, double base) {
    json r{{"model", model},    {"variant", "x"}, {"dataset", "d"}, {"seeds", {1, 2, 3}},
           {"folds", 5},        {"failures", json::array()}};
    json acc = json::array(), means = json::array();
    for (int s = 0; s < 3; ++s) {
      acc.push_back(json::array({base + 0.01 * s}));
      means.push_back(base + 0.01 * s);
    }
    r["accuracies"] = acc;
    r["seed_means"] = means;
    r["grand_mean"] = base + 0.01;
    return r.dump();
  };
  std::vector<std::string> files;
  const char* names[] = {"M1", "M2", "M3", "M4", "M5"};
  for (int i = 0; i < 5; ++i) {
    files.push_back(path(std::string(names[i]) + ".json"));
    write(files.back(), report(names[i], 0.9 - 0.1 * i));
  }
  auto two = run({"compare", "--results", files[0], files[1], "--out", path("cmp2.json")});
  REQUIRE(two.code == 0);
  auto m = json::parse(slurp(path("cmp2.json")));
  CHECK(m["epsilon_min"][0][1] == 0.0);
  CHECK(m["epsilon_min"][1][0] == 1.0);
  CHECK(m["epsilon_min"][0][0].is_null());
  CHECK(two.out.find("M1") != std::string::npos);

  std::vector<std::string> args{"compare", "--out", path("cmp5.json"), "--results"};
  args.insert(args.end(), files.begin(), files.end());
  REQUIRE(run(args).code == 0);
  CHECK(json::parse(slurp(path("cmp5.json")))["adjusted_alpha"].get<double>() ==
        doctest::Approx(0.0025));

  auto one = run({"compare", "--results", files[0]});
  CHECK(one.code == 1);
  CHECK(single_error_line(one.err));
  CHECK(run({"compare", "--results", files[0], path("missing.json")}).code == 2);
}
