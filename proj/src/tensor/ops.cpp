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
#include "clstx/tensor/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "clstx/errors.hpp"

namespace clstx::ops {
namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

template <typename T>
bool tracked(const Tape<T>& tape, std::initializer_list<const Tensor<T>*> inputs) {
  if (!tape.enabled()) return false;
  for (const auto* t : inputs) {
    if (t->requires_grad()) return true;
  }
  return false;
}

template <typename T>
Tensor<T> finish(const char* op, Tensor<T> out) {
  ensure_finite<T>(op, out.values());
  return out;
}

template <typename T>
void check_grad(const char* op, const Tensor<T>& t) {
  if (t.requires_grad()) ensure_finite<T>(op, t.grad());
}

template <typename T>
void require_matrix(const char* op, const Tensor<T>& a) {
  if (a.rank() > 2) {
    throw DimensionError(std::string(op) + ": expected a matrix or vector, got " +
                         shape_string(a.shape()));
  }
}

}  // namespace

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel, std::size_t stride) {
  if (stride < 1) throw InvalidArgument("conv1d: stride must be >= 1");
  if (kernel < 1 || kernel > length) {
    throw InvalidArgument("conv1d: kernel length " + std::to_string(kernel) +
                          " invalid for input length " + std::to_string(length));
  }
  return (length - kernel) / stride + 1;
}

PoolBin adaptive_pool_bin(std::size_t index, std::size_t length, std::size_t target) {
  std::size_t begin = (index * length) / target;
  std::size_t end = ((index + 1) * length + target - 1) / target;
  return {begin, end};
}

template <typename T>
Tensor<T> matmul(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
  require_matrix("matmul", a);
  if (b.rank() != 2 || a.cols() != b.dim(0)) {
    throw DimensionError("matmul: shape mismatch " + shape_string(a.shape()) + " x " +
                         shape_string(b.shape()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.dim(1);
  const bool grad = tracked(tape, {&a, &b});
  Shape out_shape = a.rank() == 1 ? Shape{n} : Shape{m, n};
  Tensor<T> out(out_shape, grad);
  ConstMatrixMap<T> am(a.data(), m, k), bm(b.data(), k, n);
  MatrixMap<T> cm(out.data(), m, n);
  cm.noalias() = am * bm;
  if (grad) {
    tape.record("matmul", [a, b, out, m, k, n]() mutable {
      ConstMatrixMap<T> dc(out.grad().data(), m, n);
      if (a.requires_grad()) {
        MatrixMap<T> da(a.grad().data(), m, k);
        da.noalias() += dc * ConstMatrixMap<T>(b.data(), k, n).transpose();
        check_grad("matmul", a);
      }
      if (b.requires_grad()) {
        MatrixMap<T> db(b.grad().data(), k, n);
        db.noalias() += ConstMatrixMap<T>(a.data(), m, k).transpose() * dc;
        check_grad("matmul", b);
      }
    });
  }
  return finish("matmul", std::move(out));
}

template <typename T>
Tensor<T> transpose(Tape<T>& tape, const Tensor<T>& a) {
  if (a.rank() != 2) throw DimensionError("transpose: expected a matrix, got " + shape_string(a.shape()));
  const std::size_t m = a.dim(0), n = a.dim(1);
  const bool grad = tracked(tape, {&a});
  Tensor<T> out({n, m}, grad);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.at(j, i) = a.at(i, j);
  if (grad) {
    tape.record("transpose", [a, out, m, n]() mutable {
      auto da = a.grad();
      auto dout = out.grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) da[i * n + j] += dout[j * m + i];
    });
  }
  return out;
}

template <typename T>
Tensor<T> add(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("add: shape mismatch " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
  const bool grad = tracked(tape, {&a, &b});
  Tensor<T> out(a.shape(), grad);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  if (grad) {
    tape.record("add", [a, b, out]() mutable {
      auto dout = out.grad();
      for (const Tensor<T>* t : {&a, &b}) {
        if (!t->requires_grad()) continue;
        auto g = t->grad();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += dout[i];
      }
    });
  }
  return finish("add", std::move(out));
}

template <typename T>
Tensor<T> add_bias(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& bias) {
  require_matrix("add_bias", a);
  if (bias.size() != a.cols()) {
    throw DimensionError("add_bias: bias " + shape_string(bias.shape()) + " does not match " +
                         shape_string(a.shape()));
  }
  const std::size_t m = a.rows(), n = a.cols();
  const bool grad = tracked(tape, {&a, &bias});
  Tensor<T> out(a.shape(), grad);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] = a[r * n + c] + bias[c];
  if (grad) {
    tape.record("add_bias", [a, bias, out, m, n]() mutable {
      auto dout = out.grad();
      if (a.requires_grad()) {
        auto da = a.grad();
        for (std::size_t i = 0; i < m * n; ++i) da[i] += dout[i];
      }
      if (bias.requires_grad()) {
        auto db = bias.grad();
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t c = 0; c < n; ++c) db[c] += dout[r * n + c];
      }
    });
  }
  return finish("add_bias", std::move(out));
}

template <typename T>
Tensor<T> scale(Tape<T>& tape, const Tensor<T>& a, T factor) {
  const bool grad = tracked(tape, {&a});
  Tensor<T> out(a.shape(), grad);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * factor;
  if (grad) {
    tape.record("scale", [a, out, factor]() mutable {
      auto da = a.grad();
      auto dout = out.grad();
      for (std::size_t i = 0; i < da.size(); ++i) da[i] += dout[i] * factor;
    });
  }
  return finish("scale", std::move(out));
}

template <typename T>
Tensor<T> tanh_map(Tape<T>& tape, const Tensor<T>& a) {
  const bool grad = tracked(tape, {&a});
  Tensor<T> out(a.shape(), grad);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::tanh(a[i]);
  if (grad) {
    tape.record("tanh", [a, out]() mutable {
      auto da = a.grad();
      auto dout = out.grad();
      for (std::size_t i = 0; i < da.size(); ++i) da[i] += dout[i] * (T(1) - out[i] * out[i]);
    });
  }
  return finish("tanh", std::move(out));
}

template <typename T>
Tensor<T> conv1d_strided(Tape<T>& tape, const Tensor<T>& input, const Tensor<T>& kernels,
                         const Tensor<T>& bias, std::size_t stride) {
  if (input.rank() != 2 || kernels.rank() != 3 || bias.size() != kernels.dim(0) ||
      kernels.dim(1) != input.dim(0)) {
    throw DimensionError("conv1d: incompatible input " + shape_string(input.shape()) +
                         ", kernels " + shape_string(kernels.shape()) + ", bias " +
                         shape_string(bias.shape()));
  }
  const std::size_t c_in = input.dim(0), length = input.dim(1);
  const std::size_t c_out = kernels.dim(0), width = kernels.dim(2);
  const std::size_t n = conv1d_output_length(length, width, stride);
  const bool grad = tracked(tape, {&input, &kernels, &bias});
  Tensor<T> out({c_out, n}, grad);
  for (std::size_t o = 0; o < c_out; ++o) {
    for (std::size_t i = 0; i < n; ++i) {
      T acc = bias[o];
      for (std::size_t c = 0; c < c_in; ++c) {
        const T* k = kernels.data() + (o * c_in + c) * width;
        const T* x = input.data() + c * length + i * stride;
        for (std::size_t j = 0; j < width; ++j) acc += k[j] * x[j];
      }
      out.at(o, i) = acc;
    }
  }
  if (grad) {
    tape.record("conv1d_strided", [input, kernels, bias, out, c_in, length, c_out, width, n,
                                   stride]() mutable {
      auto dout = out.grad();
      for (std::size_t o = 0; o < c_out; ++o) {
        for (std::size_t i = 0; i < n; ++i) {
          const T g = dout[o * n + i];
          if (g == T(0)) continue;
          if (bias.requires_grad()) bias.grad()[o] += g;
          for (std::size_t c = 0; c < c_in; ++c) {
            const std::size_t koff = (o * c_in + c) * width;
            const std::size_t xoff = c * length + i * stride;
            if (kernels.requires_grad()) {
              T* dk = kernels.grad().data() + koff;
              const T* x = input.data() + xoff;
              for (std::size_t j = 0; j < width; ++j) dk[j] += g * x[j];
            }
            if (input.requires_grad()) {
              T* dx = input.grad().data() + xoff;
              const T* k = kernels.data() + koff;
              for (std::size_t j = 0; j < width; ++j) dx[j] += g * k[j];
            }
          }
        }
      }
      check_grad("conv1d_strided", kernels);
      check_grad("conv1d_strided", input);
    });
  }
  return finish("conv1d_strided", std::move(out));
}

template <typename T>
Tensor<T> adaptive_max_pool1d(Tape<T>& tape, const Tensor<T>& input, std::size_t target) {
  require_matrix("adaptive_max_pool1d", input);
  const std::size_t rows = input.rows(), length = input.cols();
  if (target < 1 || target > length) {
    throw InvalidArgument("adaptive_max_pool1d: target " + std::to_string(target) +
                          " outside [1, " + std::to_string(length) + "]");
  }
  const bool grad = tracked(tape, {&input});
  Shape out_shape = input.rank() == 1 ? Shape{target} : Shape{rows, target};
  Tensor<T> out(out_shape, grad);
  std::vector<std::size_t> argmax(rows * target);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* x = input.data() + r * length;
    for (std::size_t i = 0; i < target; ++i) {
      const auto bin = adaptive_pool_bin(i, length, target);
      std::size_t best = bin.begin;
      for (std::size_t j = bin.begin + 1; j < bin.end; ++j) {
        if (x[j] > x[best]) best = j;
      }
      argmax[r * target + i] = r * length + best;
      out[r * target + i] = x[best];
    }
  }
  if (grad) {
    tape.record("adaptive_max_pool1d", [input, out, argmax = std::move(argmax)]() mutable {
      auto dx = input.grad();
      auto dout = out.grad();
      for (std::size_t i = 0; i < argmax.size(); ++i) dx[argmax[i]] += dout[i];
    });
  }
  return finish("adaptive_max_pool1d", std::move(out));
}

template <typename T>
Tensor<T> softmax_rows(Tape<T>& tape, const Tensor<T>& a) {
  require_matrix("softmax_rows", a);
  const std::size_t m = a.rows(), n = a.cols();
  const bool grad = tracked(tape, {&a});
  Tensor<T> out(a.shape(), grad);
  for (std::size_t r = 0; r < m; ++r) {
    const T* x = a.data() + r * n;
    T* y = out.data() + r * n;
    const T peak = *std::max_element(x, x + n);
    T total = 0;
    for (std::size_t c = 0; c < n; ++c) total += (y[c] = std::exp(x[c] - peak));
    for (std::size_t c = 0; c < n; ++c) y[c] /= total;
  }
  if (grad) {
    tape.record("softmax_rows", [a, out, m, n]() mutable {
      auto da = a.grad();
      auto dy = out.grad();
      for (std::size_t r = 0; r < m; ++r) {
        T dot = 0;
        for (std::size_t c = 0; c < n; ++c) dot += dy[r * n + c] * out[r * n + c];
        for (std::size_t c = 0; c < n; ++c) da[r * n + c] += out[r * n + c] * (dy[r * n + c] - dot);
      }
    });
  }
  return finish("softmax_rows", std::move(out));
}

template <typename T>
Tensor<T> log_softmax_rows(Tape<T>& tape, const Tensor<T>& a) {
  require_matrix("log_softmax_rows", a);
  const std::size_t m = a.rows(), n = a.cols();
  const bool grad = tracked(tape, {&a});
  Tensor<T> out(a.shape(), grad);
  for (std::size_t r = 0; r < m; ++r) {
    const T* x = a.data() + r * n;
    T* y = out.data() + r * n;
    const T peak = *std::max_element(x, x + n);
    T total = 0;
    for (std::size_t c = 0; c < n; ++c) total += std::exp(x[c] - peak);
    const T lse = peak + std::log(total);
    for (std::size_t c = 0; c < n; ++c) y[c] = x[c] - lse;
  }
  if (grad) {
    tape.record("log_softmax_rows", [a, out, m, n]() mutable {
      auto da = a.grad();
      auto dy = out.grad();
      for (std::size_t r = 0; r < m; ++r) {
        T total = 0;
        for (std::size_t c = 0; c < n; ++c) total += dy[r * n + c];
        for (std::size_t c = 0; c < n; ++c) {
          da[r * n + c] += dy[r * n + c] - std::exp(out[r * n + c]) * total;
        }
      }
    });
  }
  return finish("log_softmax_rows", std::move(out));
}

template <typename T>
Tensor<T> layer_norm(Tape<T>& tape, const Tensor<T>& input, const Tensor<T>& gain,
                     const Tensor<T>& shift, double eps) {
  require_matrix("layer_norm", input);
  const std::size_t m = input.rows(), n = input.cols();
  if (gain.size() != n || shift.size() != n) {
    throw DimensionError("layer_norm: gain/shift " + shape_string(gain.shape()) + "/" +
                         shape_string(shift.shape()) + " do not match " +
                         shape_string(input.shape()));
  }
  if (!(eps > 0)) throw InvalidArgument("layer_norm: eps must be positive");
  const bool grad = tracked(tape, {&input, &gain, &shift});
  Tensor<T> out(input.shape(), grad);
  std::vector<T> normalized(m * n), inv_std(m);
  for (std::size_t r = 0; r < m; ++r) {
    const T* x = input.data() + r * n;
    T mean = 0;
    for (std::size_t c = 0; c < n; ++c) mean += x[c];
    mean /= T(n);
    T var = 0;
    for (std::size_t c = 0; c < n; ++c) var += (x[c] - mean) * (x[c] - mean);
    var /= T(n);
    inv_std[r] = T(1) / std::sqrt(var + T(eps));
    for (std::size_t c = 0; c < n; ++c) {
      const T xhat = (x[c] - mean) * inv_std[r];
      normalized[r * n + c] = xhat;
      out[r * n + c] = xhat * gain[c] + shift[c];
    }
  }
  if (grad) {
    tape.record("layer_norm", [input, gain, shift, out, m, n, normalized = std::move(normalized),
                               inv_std = std::move(inv_std)]() mutable {
      auto dy = out.grad();
      for (std::size_t r = 0; r < m; ++r) {
        const T* xhat = normalized.data() + r * n;
        const T* g = dy.data() + r * n;
        if (gain.requires_grad()) {
          auto dg = gain.grad();
          for (std::size_t c = 0; c < n; ++c) dg[c] += g[c] * xhat[c];
        }
        if (shift.requires_grad()) {
          auto db = shift.grad();
          for (std::size_t c = 0; c < n; ++c) db[c] += g[c];
        }
        if (input.requires_grad()) {
          T mean_d = 0, mean_dx = 0;
          for (std::size_t c = 0; c < n; ++c) {
            const T d = g[c] * gain[c];
            mean_d += d;
            mean_dx += d * xhat[c];
          }
          mean_d /= T(n);
          mean_dx /= T(n);
          T* dx = input.grad().data() + r * n;
          for (std::size_t c = 0; c < n; ++c) {
            dx[c] += inv_std[r] * (g[c] * gain[c] - mean_d - xhat[c] * mean_dx);
          }
        }
      }
      check_grad("layer_norm", input);
    });
  }
  return finish("layer_norm", std::move(out));
}

template <typename T>
Tensor<T> dropout_mask(Tape<T>& tape, const Tensor<T>& a, double ratio, bool training,
                       std::mt19937_64& rng) {
  if (!(ratio >= 0.0 && ratio < 1.0)) {
    throw InvalidArgument("dropout: ratio " + std::to_string(ratio) + " outside [0, 1)");
  }
  if (!training || ratio == 0.0) return a;
  const T keep_scale = T(1.0 / (1.0 - ratio));
  std::bernoulli_distribution drop(ratio);
  std::vector<T> mask(a.size());
  for (auto& v : mask) v = drop(rng) ? T(0) : keep_scale;
  const bool grad = tracked(tape, {&a});
  Tensor<T> out(a.shape(), grad);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * mask[i];
  if (grad) {
    tape.record("dropout", [a, out, mask = std::move(mask)]() mutable {
      auto da = a.grad();
      auto dout = out.grad();
      for (std::size_t i = 0; i < da.size(); ++i) da[i] += dout[i] * mask[i];
    });
  }
  return out;
}

template <typename T>
Tensor<T> concat_rows(Tape<T>& tape, std::span<const Tensor<T>> parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no inputs");
  const std::size_t n = parts[0].cols();
  std::size_t rows = 0;
  bool grad = false;
  for (const auto& p : parts) {
    require_matrix("concat_rows", p);
    if (p.cols() != n) {
      throw DimensionError("concat_rows: trailing extent mismatch " + shape_string(p.shape()) +
                           " vs " + shape_string(parts[0].shape()));
    }
    rows += p.rows();
    grad = grad || (tape.enabled() && p.requires_grad());
  }
  Tensor<T> out({rows, n}, grad);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    std::copy(p.values().begin(), p.values().end(), out.values().begin() + offset);
    offset += p.size();
  }
  if (grad) {
    tape.record("concat_rows", [inputs = std::vector<Tensor<T>>(parts.begin(), parts.end()),
                                out]() mutable {
      auto dout = out.grad();
      std::size_t offset = 0;
      for (auto& p : inputs) {
        if (p.requires_grad()) {
          auto g = p.grad();
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += dout[offset + i];
        }
        offset += p.size();
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> concat_cols(Tape<T>& tape, std::span<const Tensor<T>> parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  const std::size_t m = parts[0].rows();
  std::size_t cols = 0;
  bool grad = false;
  for (const auto& p : parts) {
    if (p.rank() != 2 || p.rows() != m) {
      throw DimensionError("concat_cols: leading extent mismatch " + shape_string(p.shape()) +
                           " vs " + shape_string(parts[0].shape()));
    }
    cols += p.cols();
    grad = grad || (tape.enabled() && p.requires_grad());
  }
  Tensor<T> out({m, cols}, grad);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < p.cols(); ++c) out.at(r, offset + c) = p.at(r, c);
    offset += p.cols();
  }
  if (grad) {
    tape.record("concat_cols", [inputs = std::vector<Tensor<T>>(parts.begin(), parts.end()), out,
                                m, cols]() mutable {
      auto dout = out.grad();
      std::size_t offset = 0;
      for (auto& p : inputs) {
        const std::size_t w = p.cols();
        if (p.requires_grad()) {
          auto g = p.grad();
          for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < w; ++c) g[r * w + c] += dout[r * cols + offset + c];
        }
        offset += w;
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> slice_rows(Tape<T>& tape, const Tensor<T>& a, std::size_t begin, std::size_t count) {
  if (a.rank() != 2 || count == 0 || begin + count > a.dim(0)) {
    throw DimensionError("slice_rows: rows [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of " + shape_string(a.shape()));
  }
  const std::size_t n = a.cols();
  const bool grad = tracked(tape, {&a});
  Tensor<T> out({count, n}, grad);
  std::copy_n(a.data() + begin * n, count * n, out.data());
  if (grad) {
    tape.record("slice_rows", [a, out, begin, n]() mutable {
      auto da = a.grad();
      auto dout = out.grad();
      for (std::size_t i = 0; i < dout.size(); ++i) da[begin * n + i] += dout[i];
    });
  }
  return out;
}

template <typename T>
Tensor<T> slice_cols(Tape<T>& tape, const Tensor<T>& a, std::size_t begin, std::size_t count) {
  if (a.rank() != 2 || count == 0 || begin + count > a.dim(1)) {
    throw DimensionError("slice_cols: cols [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of " + shape_string(a.shape()));
  }
  const std::size_t m = a.dim(0), n = a.dim(1);
  const bool grad = tracked(tape, {&a});
  Tensor<T> out({m, count}, grad);
  for (std::size_t r = 0; r < m; ++r)
    std::copy_n(a.data() + r * n + begin, count, out.data() + r * count);
  if (grad) {
    tape.record("slice_cols", [a, out, begin, m, n, count]() mutable {
      auto da = a.grad();
      auto dout = out.grad();
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < count; ++c) da[r * n + begin + c] += dout[r * count + c];
    });
  }
  return out;
}

template <typename T>
Tensor<T> vectorize(Tape<T>& tape, const Tensor<T>& a) {
  const bool grad = tracked(tape, {&a});
  Tensor<T> out({a.size()}, std::vector<T>(a.values().begin(), a.values().end()), grad);
  if (grad) {
    tape.record("vectorize", [a, out]() mutable {
      auto da = a.grad();
      auto dout = out.grad();
      for (std::size_t i = 0; i < da.size(); ++i) da[i] += dout[i];
    });
  }
  return out;
}

template <typename T>
Tensor<T> sum(Tape<T>& tape, const Tensor<T>& a) {
  const bool grad = tracked(tape, {&a});
  T total = 0;
  for (auto v : a.values()) total += v;
  Tensor<T> out({1}, {total}, grad);
  if (grad) {
    tape.record("sum", [a, out]() mutable {
      const T g = out.grad()[0];
      for (auto& d : a.grad()) d += g;
    });
  }
  return finish("sum", std::move(out));
}

template <typename T>
Tensor<T> nll_loss(Tape<T>& tape, const Tensor<T>& log_probs, std::size_t label) {
  if (log_probs.rank() != 1 || label >= log_probs.size()) {
    throw DimensionError("nll_loss: label " + std::to_string(label) + " invalid for " +
                         shape_string(log_probs.shape()));
  }
  const bool grad = tracked(tape, {&log_probs});
  Tensor<T> out({1}, {-log_probs[label]}, grad);
  if (grad) {
    tape.record("nll_loss", [log_probs, out, label]() mutable {
      log_probs.grad()[label] -= out.grad()[0];
    });
  }
  return finish("nll_loss", std::move(out));
}

#define CLSTX_INSTANTIATE_OPS(T)                                                              \
  template Tensor<T> matmul(Tape<T>&, const Tensor<T>&, const Tensor<T>&);                    \
  template Tensor<T> transpose(Tape<T>&, const Tensor<T>&);                                   \
  template Tensor<T> add(Tape<T>&, const Tensor<T>&, const Tensor<T>&);                       \
  template Tensor<T> add_bias(Tape<T>&, const Tensor<T>&, const Tensor<T>&);                  \
  template Tensor<T> scale(Tape<T>&, const Tensor<T>&, T);                                    \
  template Tensor<T> tanh_map(Tape<T>&, const Tensor<T>&);                                    \
  template Tensor<T> conv1d_strided(Tape<T>&, const Tensor<T>&, const Tensor<T>&,             \
                                    const Tensor<T>&, std::size_t);                           \
  template Tensor<T> adaptive_max_pool1d(Tape<T>&, const Tensor<T>&, std::size_t);            \
  template Tensor<T> softmax_rows(Tape<T>&, const Tensor<T>&);                                \
  template Tensor<T> log_softmax_rows(Tape<T>&, const Tensor<T>&);                            \
  template Tensor<T> layer_norm(Tape<T>&, const Tensor<T>&, const Tensor<T>&,                 \
                                const Tensor<T>&, double);                                    \
  template Tensor<T> dropout_mask(Tape<T>&, const Tensor<T>&, double, bool, std::mt19937_64&); \
  template Tensor<T> concat_rows(Tape<T>&, std::span<const Tensor<T>>);                       \
  template Tensor<T> concat_cols(Tape<T>&, std::span<const Tensor<T>>);                       \
  template Tensor<T> slice_rows(Tape<T>&, const Tensor<T>&, std::size_t, std::size_t);        \
  template Tensor<T> slice_cols(Tape<T>&, const Tensor<T>&, std::size_t, std::size_t);        \
  template Tensor<T> vectorize(Tape<T>&, const Tensor<T>&);                                   \
  template Tensor<T> sum(Tape<T>&, const Tensor<T>&);                                         \
  template Tensor<T> nll_loss(Tape<T>&, const Tensor<T>&, std::size_t);

CLSTX_INSTANTIATE_OPS(float)
CLSTX_INSTANTIATE_OPS(double)

#undef CLSTX_INSTANTIATE_OPS

}  // namespace clstx::ops
