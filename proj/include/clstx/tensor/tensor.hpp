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
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clstx {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major tensor with an optional gradient buffer.
///
/// Copies share storage, so a tensor captured by the tape and the caller's
/// handle refer to the same values and gradient. Use clone() for a deep copy.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, bool requires_grad = false);
  Tensor(Shape shape, std::vector<T> values, bool requires_grad = false);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor from(std::initializer_list<std::size_t> shape,
                     std::initializer_list<T> values) {
    return Tensor(Shape(shape), std::vector<T>(values));
  }

  bool defined() const noexcept { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return impl_->shape.at(axis); }
  std::size_t size() const { return impl_->values.size(); }

  // Rank-1 tensors are treated as a single row by the row-wise ops.
  std::size_t rows() const { return rank() == 1 ? 1 : impl_->shape[0]; }
  std::size_t cols() const { return impl_->shape.back(); }

  std::span<T> values() { return impl_->values; }
  std::span<const T> values() const { return impl_->values; }
  T* data() { return impl_->values.data(); }
  const T* data() const { return impl_->values.data(); }

  T& operator[](std::size_t i) { return impl_->values[i]; }
  const T& operator[](std::size_t i) const { return impl_->values[i]; }
  T& at(std::size_t r, std::size_t c) { return impl_->values[r * cols() + c]; }
  const T& at(std::size_t r, std::size_t c) const {
    return impl_->values[r * cols() + c];
  }

  T item() const;

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool flag);

  /// Gradient buffer; allocated (zero-filled) for requires_grad tensors.
  /// Gradients are accumulation state shared by every handle, so the buffer
  /// stays writable through const handles.
  std::span<T> grad() const { return impl_->grad; }
  bool has_grad() const { return !impl_->grad.empty(); }
  void zero_grad();

  Tensor clone() const;
  bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }

 private:
  struct Impl {
    Shape shape;
    std::vector<T> values;
    std::vector<T> grad;
    bool requires_grad = false;
  };
  std::shared_ptr<Impl> impl_;
};

/// Ordered record of differentiable operations executed in one context.
///
/// Ops append a backward closure when the tape is enabled and at least one
/// input requires a gradient. backward() runs the closures in exact reverse
/// order. A disabled tape records nothing (evaluation / finite differences).
template <typename T>
class Tape {
 public:
  explicit Tape(bool enabled = true) : enabled_(enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool enabled() const noexcept { return enabled_; }

  void record(std::string_view op, std::function<void()> backward);

  /// Seeds d(loss)/d(loss) = seed and replays the tape backward. `loss` must
  /// hold a single element. The tape is cleared afterwards.
  void backward(Tensor<T>& loss, T seed = T(1));

  std::size_t size() const noexcept { return entries_.size(); }
  std::vector<std::string> op_names() const;
  void clear() { entries_.clear(); }

  // Invoked with each op name as it is replayed; test hook for ordering.
  void set_replay_observer(std::function<void(std::string_view)> observer) {
    observer_ = std::move(observer);
  }

 private:
  struct Entry {
    std::string op;
    std::function<void()> backward;
  };
  bool enabled_;
  std::vector<Entry> entries_;
  std::function<void(std::string_view)> observer_;
};

/// Throws NumericError naming `op` if any value is NaN or infinite.
template <typename T>
void ensure_finite(std::string_view op, std::span<const T> values);

extern template class Tensor<float>;
extern template class Tensor<double>;
extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace clstx
