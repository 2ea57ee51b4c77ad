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
#include "clstx/tensor/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "clstx/errors.hpp"

namespace clstx {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (auto extent : shape) n *= extent;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

namespace {

void check_shape(const Shape& shape) {
  if (shape.empty()) throw DimensionError("tensor shape must have at least one extent");
  for (auto extent : shape) {
    if (extent == 0) {
      throw DimensionError("tensor extents must be positive, got " + shape_string(shape));
    }
  }
}

}  // namespace

template <typename T>
Tensor<T>::Tensor(Shape shape, bool requires_grad) : impl_(std::make_shared<Impl>()) {
  check_shape(shape);
  impl_->values.assign(shape_size(shape), T(0));
  impl_->shape = std::move(shape);
  set_requires_grad(requires_grad);
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> values, bool requires_grad)
    : impl_(std::make_shared<Impl>()) {
  check_shape(shape);
  if (shape_size(shape) != values.size()) {
    throw DimensionError("shape " + shape_string(shape) + " needs " +
                         std::to_string(shape_size(shape)) + " values, got " +
                         std::to_string(values.size()));
  }
  impl_->shape = std::move(shape);
  impl_->values = std::move(values);
  set_requires_grad(requires_grad);
}

template <typename T>
T Tensor<T>::item() const {
  if (size() != 1) {
    throw DimensionError("item() on tensor of shape " + shape_string(shape()));
  }
  return impl_->values[0];
}

template <typename T>
void Tensor<T>::set_requires_grad(bool flag) {
  impl_->requires_grad = flag;
  if (flag && impl_->grad.size() != impl_->values.size()) {
    impl_->grad.assign(impl_->values.size(), T(0));
  }
}

template <typename T>
void Tensor<T>::zero_grad() {
  std::fill(impl_->grad.begin(), impl_->grad.end(), T(0));
}

template <typename T>
Tensor<T> Tensor<T>::clone() const {
  Tensor out;
  out.impl_ = std::make_shared<Impl>(*impl_);
  return out;
}

template <typename T>
void Tape<T>::record(std::string_view op, std::function<void()> backward) {
  if (!enabled_) return;
  entries_.push_back(Entry{std::string(op), std::move(backward)});
}

template <typename T>
void Tape<T>::backward(Tensor<T>& loss, T seed) {
  if (loss.size() != 1) {
    throw DimensionError("backward() needs a scalar loss, got " + shape_string(loss.shape()));
  }
  if (!loss.requires_grad()) {
    entries_.clear();
    return;
  }
  loss.grad()[0] += seed;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (observer_) observer_(it->op);
    it->backward();
  }
  entries_.clear();
}

template <typename T>
std::vector<std::string> Tape<T>::op_names() const {
  std::vector<std::string> names;
  names.reserve(entries_.size());
  for (const auto& e : entries_) names.push_back(e.op);
  return names;
}

template <typename T>
void ensure_finite(std::string_view op, std::span<const T> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NumericError(std::string(op) + ": non-finite value at flat index " +
                         std::to_string(i));
    }
  }
}

template class Tensor<float>;
template class Tensor<double>;
template class Tape<float>;
template class Tape<double>;
template void ensure_finite<float>(std::string_view, std::span<const float>);
template void ensure_finite<double>(std::string_view, std::span<const double>);

}  // namespace clstx
