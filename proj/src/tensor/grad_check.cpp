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
#include "clstx/tensor/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "clstx/errors.hpp"

namespace clstx {
namespace {

template <typename T>
double evaluate(const ScalarFunction<T>& f) {
  Tape<T> off(false);
  const double value = static_cast<double>(f(off).item());
  if (!std::isfinite(value)) throw NumericError("grad_check: function value is not finite");
  return value;
}

}  // namespace

template <typename T>
GradCheckResult grad_check(const ScalarFunction<T>& f, std::span<Tensor<T>> params, double h) {
  if (!(h >= 1e-7 && h <= 1e-3)) {
    throw InvalidArgument("grad_check: step " + std::to_string(h) + " outside [1e-7, 1e-3]");
  }
  for (auto& p : params) {
    p.set_requires_grad(true);
    p.zero_grad();
  }
  {
    Tape<T> tape;
    Tensor<T> value = f(tape);
    if (!std::isfinite(static_cast<double>(value.item()))) {
      throw NumericError("grad_check: function value is not finite");
    }
    tape.backward(value);
  }

  GradCheckResult result;
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto& p = params[t];
    const std::vector<T> analytic(p.grad().begin(), p.grad().end());
    for (std::size_t i = 0; i < p.size(); ++i) {
      const T saved = p[i];
      p[i] = static_cast<T>(saved + h);
      const double plus = evaluate(f);
      p[i] = static_cast<T>(saved - h);
      const double minus = evaluate(f);
      p[i] = saved;

      const double numeric = (plus - minus) / (2.0 * h);
      const double a = static_cast<double>(analytic[i]);
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double err = std::abs(a - numeric) / denom;
      ++result.coordinates;
      if (err > result.max_relative_error || result.coordinates == 1) {
        result.max_relative_error = err;
        result.tensor_index = t;
        result.flat_index = i;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  return result;
}

template GradCheckResult grad_check<float>(const ScalarFunction<float>&, std::span<Tensor<float>>,
                                           double);
template GradCheckResult grad_check<double>(const ScalarFunction<double>&,
                                            std::span<Tensor<double>>, double);

}  // namespace clstx
