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

#include <cmath>
#include <numeric>

#include "clstx/errors.hpp"
#include "clstx/tensor/grad_check.hpp"
#include "clstx/tensor/init.hpp"
#include "clstx/tensor/ops.hpp"
#include "grad_suite.hpp"
#include "test_util.hpp"

using namespace clstx;
using clstx::testing::random_extent;
using clstx::testing::random_tensor;
using TensorD = Tensor<double>;

namespace {

constexpr int kTrials = 20;
constexpr double kOpTolerance = 1e-4;

// Independent oracles.
std::vector<double> loop_matmul(const TensorD& a, const TensorD& b) {
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> c(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < k; ++p) c[i * n + j] += a.at(i, p) * b.at(p, j);
  return c;
}

std::vector<double> sliding_conv(const TensorD& x, const TensorD& w, const TensorD& bias,
                                 std::size_t stride) {
  const std::size_t cin = x.dim(0), len = x.dim(1), cout = w.dim(0), width = w.dim(2);
  std::vector<double> out;
  for (std::size_t o = 0; o < cout; ++o) {
    for (std::size_t start = 0; start + width <= len; start += stride) {
      double acc = bias[o];
      for (std::size_t c = 0; c < cin; ++c)
        for (std::size_t j = 0; j < width; ++j)
          acc += w[(o * cin + c) * width + j] * x[c * len + start + j];
      out.push_back(acc);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("matmul matches identity, selector, and loop oracle") {
  Tape<double> tape(false);
  auto ident = TensorD::from({2, 2}, {1, 0, 0, 1});
  auto m = TensorD::from({2, 2}, {1, 2, 3, 4});
  auto r = ops::matmul(tape, ident, m);
  CHECK(std::vector<double>(r.values().begin(), r.values().end()) ==
        std::vector<double>{1, 2, 3, 4});

  auto sel = TensorD::from({1, 2}, {1, 0});
  auto col = TensorD::from({2, 1}, {7.5, -2});
  CHECK(ops::matmul(tape, sel, col).item() == 7.5);

  std::mt19937_64 rng(11);
  auto a = random_tensor({3, 4}, rng), b = random_tensor({4, 2}, rng);
  auto c = ops::matmul(tape, a, b);
  auto oracle = loop_matmul(a, b);
  for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(c[i] == doctest::Approx(oracle[i]).epsilon(1e-12));

  CHECK_THROWS_AS(ops::matmul(tape, a, a), DimensionError);
}

TEST_CASE("conv1d_strided hand example, oracle and output length") {
  Tape<double> tape(false);
  auto x = TensorD::from({1, 5}, {1, 2, 3, 4, 5});
  auto w = TensorD::from({1, 1, 3}, {1, 0, -1});
  auto b = TensorD::from({1}, {0});
  auto y = ops::conv1d_strided(tape, x, w, b, 2);
  REQUIRE(y.shape() == Shape{1, 2});
  CHECK(y[0] == -2);
  CHECK(y[1] == -2);

  CHECK(ops::conv1d_output_length(768, 5, 2) == 382);
  auto big = TensorD::zeros({12, 768});
  auto kernels = TensorD::zeros({4, 12, 5});
  CHECK(ops::conv1d_strided(tape, big, kernels, TensorD::zeros({4}), 2).shape() ==
        Shape{4, 382});

  std::mt19937_64 rng(5);
  auto xi = random_tensor({3, 10}, rng), wi = random_tensor({2, 3, 4}, rng),
       bi = random_tensor({2}, rng);
  auto yi = ops::conv1d_strided(tape, xi, wi, bi, 3);
  auto oracle = sliding_conv(xi, wi, bi, 3);
  REQUIRE(yi.size() == oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(yi[i] == doctest::Approx(oracle[i]).epsilon(1e-12));

  for (std::size_t len = 1; len <= 40; ++len)
    for (std::size_t width = 1; width <= len; ++width)
      for (std::size_t stride = 1; stride <= 5; ++stride) {
        auto in = TensorD::zeros({1, len});
        auto k = TensorD::zeros({1, 1, width});
        CHECK(ops::conv1d_strided(tape, in, k, TensorD::zeros({1}), stride).cols() ==
              (len - width) / stride + 1);
      }

  CHECK_THROWS_AS(ops::conv1d_strided(tape, x, TensorD::zeros({1, 1, 6}), b, 1), InvalidArgument);
  CHECK_THROWS_AS(ops::conv1d_strided(tape, x, w, b, 0), InvalidArgument);
}

TEST_CASE("adaptive_max_pool1d bins and values") {
  Tape<double> tape(false);
  auto y = ops::adaptive_max_pool1d(tape, TensorD::from({1, 4}, {1, 3, 2, 0}), 2);
  CHECK(y[0] == 3);
  CHECK(y[1] == 2);

  std::mt19937_64 rng(3);
  auto x = random_tensor({2, 9}, rng);
  auto same = ops::adaptive_max_pool1d(tape, x, 9);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(same[i] == x[i]);

  auto h = random_tensor({4, 382}, rng);
  auto p = ops::adaptive_max_pool1d(tape, h, 380);
  REQUIRE(p.shape() == Shape{4, 380});
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t i = 0; i < 380; ++i) {
      const std::size_t lo = (i * 382) / 380;
      const std::size_t hi = static_cast<std::size_t>(std::ceil((i + 1) * 382.0 / 380.0));
      double best = h.at(r, lo);
      for (std::size_t j = lo; j < hi; ++j) best = std::max(best, h.at(r, j));
      CHECK(p.at(r, i) == best);
    }

  CHECK_THROWS_AS(ops::adaptive_max_pool1d(tape, x, 10), InvalidArgument);
}

TEST_CASE("adaptive pool bins are contiguous, non-empty and cover the input") {
  for (std::size_t length = 1; length <= 64; ++length)
    for (std::size_t target = 1; target <= length; ++target) {
      std::vector<int> hits(length, 0);
      std::size_t prev_begin = 0;
      for (std::size_t i = 0; i < target; ++i) {
        const auto bin = ops::adaptive_pool_bin(i, length, target);
        REQUIRE(bin.begin < bin.end);
        REQUIRE(bin.end <= length);
        CHECK(bin.begin >= prev_begin);
        if (i == 0) CHECK(bin.begin == 0);
        if (i + 1 == target) CHECK(bin.end == length);
        if (i > 0) CHECK(bin.begin <= ops::adaptive_pool_bin(i - 1, length, target).end);
        prev_begin = bin.begin;
        for (auto j = bin.begin; j < bin.end; ++j) hits[j]++;
      }
      for (int hit : hits) CHECK(hit >= 1);
    }
}

TEST_CASE("adaptive pool routes ties to the first maximal index") {
  Tape<double> tape;
  auto x = TensorD::from({1, 4}, {2, 2, 1, 1});
  x.set_requires_grad(true);
  auto y = ops::adaptive_max_pool1d(tape, x, 2);
  auto s = ops::sum(tape, y);
  tape.backward(s);
  CHECK(x.grad()[0] == 1.0);
  CHECK(x.grad()[1] == 0.0);
  CHECK(x.grad()[2] == 1.0);
  CHECK(x.grad()[3] == 0.0);
}

TEST_CASE("softmax rows are normalized and shift invariant") {
  Tape<double> tape(false);
  auto u = ops::softmax_rows(tape, TensorD::from({1, 4}, {2, 2, 2, 2}));
  for (auto v : u.values()) CHECK(v == doctest::Approx(0.25));
  auto c = ops::softmax_rows(tape, TensorD::from({1, 2}, {0, std::log(3.0)}));
  CHECK(c[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(c[1] == doctest::Approx(0.75).epsilon(1e-12));

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < kTrials; ++trial) {
    auto x = random_tensor({random_extent(rng, 1, 6), random_extent(rng, 1, 9)}, rng, 3.0);
    auto shifted = x.clone();
    for (auto& v : shifted.values()) v += 1000.0;
    auto y = ops::softmax_rows(tape, x), ys = ops::softmax_rows(tape, shifted);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      double total = 0;
      for (std::size_t col = 0; col < x.cols(); ++col) {
        CHECK(y.at(r, col) >= 0.0);
        total += y.at(r, col);
      }
      CHECK(std::abs(total - 1.0) < 1e-6);
    }
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(y[i] - ys[i]) < 1e-9);
  }
}

TEST_CASE("layer_norm moments") {
  Tape<double> tape(false);
  auto ones = TensorD::from({3}, {1, 1, 1});
  auto zeros3 = TensorD::zeros({3});
  auto flat = ops::layer_norm(tape, TensorD::from({1, 3}, {4, 4, 4}), ones, zeros3);
  for (auto v : flat.values()) CHECK(v == 0.0);

  auto two = ops::layer_norm(tape, TensorD::from({1, 2}, {-1, 1}), TensorD::from({2}, {1, 1}),
                             TensorD::zeros({2}));
  CHECK(two[0] == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(two[1] == doctest::Approx(1.0).epsilon(1e-4));

  std::mt19937_64 rng(21);
  auto x = random_tensor({5, 8}, rng, 4.0);
  std::vector<double> g(8, 1.0);
  auto y = ops::layer_norm(tape, x, TensorD({8}, g), TensorD::zeros({8}));
  for (std::size_t r = 0; r < 5; ++r) {
    double mean = 0, sq = 0;
    for (std::size_t c = 0; c < 8; ++c) mean += y.at(r, c);
    mean /= 8;
    for (std::size_t c = 0; c < 8; ++c) sq += (y.at(r, c) - mean) * (y.at(r, c) - mean);
    CHECK(std::abs(mean) < 1e-9);
    CHECK(sq / 8 == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("tanh, dropout, concat and vectorize") {
  Tape<double> tape(false);
  CHECK(ops::tanh_map(tape, TensorD::from({1}, {0})).item() == 0.0);

  std::mt19937_64 rng(1);
  auto x = random_tensor({3, 4}, rng);
  auto same = ops::dropout_mask(tape, x, 0.0, true, rng);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(same[i] == x[i]);
  auto eval = ops::dropout_mask(tape, x, 0.3, false, rng);
  CHECK(eval.same_storage(x));
  CHECK_THROWS_AS(ops::dropout_mask(tape, x, 1.0, true, rng), InvalidArgument);
  CHECK_THROWS_AS(ops::dropout_mask(tape, x, -0.1, true, rng), InvalidArgument);

  auto ones = TensorD({200, 100}, std::vector<double>(20000, 1.0));
  auto dropped = ops::dropout_mask(tape, ones, 0.3, true, rng);
  std::size_t zeros = 0;
  for (auto v : dropped.values()) {
    if (v == 0.0) ++zeros;
    else CHECK(v == doctest::Approx(1.0 / 0.7));
  }
  CHECK(std::abs(static_cast<double>(zeros) / 20000.0 - 0.3) < 0.02);

  std::vector<TensorD> parts{TensorD::zeros({2, 3}), TensorD({1, 3}, {1, 2, 3})};
  auto stacked = ops::concat_rows<double>(tape, parts);
  CHECK(stacked.shape() == Shape{3, 3});
  CHECK(stacked.at(2, 1) == 2.0);
  std::vector<TensorD> bad{TensorD::zeros({2, 3}), TensorD::zeros({2, 4})};
  CHECK_THROWS_AS(ops::concat_rows<double>(tape, bad), DimensionError);

  auto v = ops::vectorize(tape, TensorD::zeros({12, 380}));
  CHECK(v.shape() == Shape{4560});
  auto m = TensorD::from({2, 3}, {1, 2, 3, 4, 5, 6});
  auto mv = ops::vectorize(tape, m);
  for (std::size_t i = 0; i < 6; ++i) CHECK(mv[i] == static_cast<double>(i + 1));
}

TEST_CASE("xavier bounds, determinism and mean") {
  auto a = xavier_init<double>({100, 100}, 42);
  const double bound = std::sqrt(6.0 / 200.0);
  for (auto v : a.values()) CHECK(std::abs(v) <= bound);
  auto b = xavier_init<double>({100, 100}, 42);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));

  auto w = xavier_init<double>({380, 19}, 9);
  const double lim = std::sqrt(6.0 / (380 + 19));
  const double sigma = lim / std::sqrt(3.0) / std::sqrt(static_cast<double>(w.size()));
  const double mean = std::accumulate(w.values().begin(), w.values().end(), 0.0) / w.size();
  CHECK(std::abs(mean) < 3 * sigma);

  CHECK(xavier_fans({4, 12, 5}) == std::pair<std::size_t, std::size_t>{60, 20});
}

TEST_CASE("tape replays in exact reverse order") {
  Tape<double> tape;
  auto x = TensorD::from({1, 2}, {0.5, -0.25});
  x.set_requires_grad(true);
  auto a = ops::tanh_map(tape, x);
  auto b = ops::scale(tape, a, 2.0);
  auto c = ops::softmax_rows(tape, b);
  auto d = ops::sum(tape, c);
  auto forward = tape.op_names();
  CHECK(forward == std::vector<std::string>{"tanh", "scale", "softmax_rows", "sum"});
  std::vector<std::string> replayed;
  tape.set_replay_observer([&](std::string_view op) { replayed.emplace_back(op); });
  tape.backward(d);
  CHECK(replayed == std::vector<std::string>(forward.rbegin(), forward.rend()));
  CHECK(x.grad().size() == x.size());
}

TEST_CASE("non-finite values are an error") {
  Tape<double> tape(false);
  auto x = TensorD::from({1, 2}, {1e308, 1e308});
  CHECK_THROWS_AS(ops::add(tape, x, x), NumericError);
}

TEST_CASE("grad_check basics") {
  auto x = TensorD::from({1}, {3.0});
  std::vector<TensorD> params{x};
  // f(x) = x * x as the product of x with its 1x1 row copy.
  auto r = grad_check<double>(
      [&](Tape<double>& tape) {
        return ops::matmul(tape, x, ops::concat_rows<double>(tape, std::vector<TensorD>{x}));
      },
      params, 1e-5);
  CHECK(r.analytic == doctest::Approx(6.0));
  CHECK(r.max_relative_error < 1e-8);
  CHECK_THROWS_AS(grad_check<double>([&](Tape<double>& t) { return ops::sum(t, x); }, params, 1.0),
                  InvalidArgument);
}

TEST_CASE("sum(tanh(Wx)) gradient") {
  std::mt19937_64 rng(17);
  auto w = random_tensor({4, 5}, rng, 0.3);
  auto x = random_tensor({5, 1}, rng, 0.3);
  std::vector<TensorD> params{w, x};
  auto r = grad_check<double>(
      [&](Tape<double>& t) { return ops::sum(t, ops::tanh_map(t, ops::matmul(t, w, x))); },
      params, 1e-6);
  CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("every primitive passes randomized gradient checks") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < kTrials; ++trial) {
    CAPTURE(trial);
    for (const auto& c : testing::primitive_grad_trial(rng)) {
      CAPTURE(c.op);
      CHECK(c.max_relative_error < kOpTolerance);
    }
  }
}

TEST_CASE("forward and backward are bit-reproducible") {
  auto run = [] {
    std::mt19937_64 rng(77);
    auto x = random_tensor({4, 20}, rng), k = random_tensor({2, 4, 3}, rng, 1.0, true),
         b = random_tensor({2}, rng, 1.0, true);
    Tape<double> tape;
    auto y = ops::adaptive_max_pool1d(tape, ops::tanh_map(tape, ops::conv1d_strided(tape, x, k, b, 2)), 5);
    auto s = ops::sum(tape, ops::softmax_rows(tape, y));
    auto loss = ops::sum(tape, ops::dropout_mask(tape, y, 0.3, true, rng));
    tape.backward(loss);
    std::vector<double> out(k.grad().begin(), k.grad().end());
    out.push_back(s.item());
    return out;
  };
  CHECK(run() == run());
}
