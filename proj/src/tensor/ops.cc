// Copyright 2026 The MTSS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mtss/tensor/ops.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "mtss/errors.h"

namespace mtss {
namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

template <typename T>
ConstMatrixMap<T> AsMatrix(const Tensor<T> &t) {
  return ConstMatrixMap<T>(t.raw(), t.dim(0), t.dim(1));
}

template <typename T>
MatrixMap<T> GradMatrix(Tensor<T> &t) {
  return MatrixMap<T>(t.mutable_grad().data(), t.dim(0), t.dim(1));
}

template <typename T>
ConstMatrixMap<T> OutGradMatrix(const Tensor<T> &t) {
  return ConstMatrixMap<T>(t.grad().data(), t.dim(0), t.dim(1));
}

void Require(bool condition, const std::string &op, const std::string &what) {
  if (!condition) throw DimensionError(op + ": " + what);
}

template <typename T>
void RequireRank(const Tensor<T> &t, int64_t rank, const std::string &op) {
  Require(t.rank() == rank, op,
          "expected rank " + std::to_string(rank) + ", got shape " +
              ShapeString(t.shape()));
}

template <typename T>
void RequireSameShape(const Tensor<T> &a, const Tensor<T> &b,
                      const std::string &op) {
  Require(a.shape() == b.shape(), op,
          "shape mismatch " + ShapeString(a.shape()) + " vs " +
              ShapeString(b.shape()));
}

// Wraps forward values into the op output, checks them, and decides whether
// the op is recorded.
template <typename T>
Tensor<T> MakeOutput(Tape<T> &tape, const char *op, const Shape &shape,
                     std::vector<T> values,
                     std::initializer_list<const Tensor<T> *> inputs) {
  for (T v : values) {
    if (!std::isfinite(v)) {
      throw NumericalError(std::string("non-finite value produced by op '") +
                           op + "'");
    }
  }
  Tensor<T> out = Tensor<T>::FromData(shape, std::move(values));
  if (tape.ShouldRecord(inputs)) out.set_requires_grad(true, false);
  return out;
}

// Iteration geometry for an axis of a row-major tensor.
struct AxisLayout {
  int64_t outer = 1;
  int64_t extent = 1;
  int64_t inner = 1;
};

AxisLayout LayoutOf(const Shape &shape, int64_t axis) {
  AxisLayout layout;
  for (int64_t i = 0; i < axis; ++i) layout.outer *= shape[i];
  layout.extent = shape[axis];
  for (size_t i = axis + 1; i < shape.size(); ++i) layout.inner *= shape[i];
  return layout;
}

}  // namespace

template <typename T>
Tensor<T> MatMul(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b) {
  RequireRank(a, 2, "matmul");
  RequireRank(b, 2, "matmul");
  Require(a.dim(1) == b.dim(0), "matmul",
          "inner dimensions disagree: " + ShapeString(a.shape()) + " x " +
              ShapeString(b.shape()));
  std::vector<T> values(a.dim(0) * b.dim(1));
  MatrixMap<T>(values.data(), a.dim(0), b.dim(1)).noalias() =
      AsMatrix(a) * AsMatrix(b);
  Tensor<T> out = MakeOutput(tape, "matmul", {a.dim(0), b.dim(1)},
                             std::move(values), {&a, &b});
  if (out.requires_grad()) {
    tape.Record("matmul", {a, b}, out, [a = a, b = b, out]() mutable {
      auto g = OutGradMatrix(out);
      if (a.requires_grad()) GradMatrix(a).noalias() += g * AsMatrix(b).transpose();
      if (b.requires_grad()) GradMatrix(b).noalias() += AsMatrix(a).transpose() * g;
    });
  }
  return out;
}

template <typename T>
Tensor<T> Add(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b) {
  RequireSameShape(a, b, "add");
  std::vector<T> values(a.size());
  for (int64_t i = 0; i < a.size(); ++i) values[i] = a[i] + b[i];
  Tensor<T> out = MakeOutput(tape, "add", a.shape(), std::move(values), {&a, &b});
  if (out.requires_grad()) {
    tape.Record("add", {a, b}, out, [a = a, b = b, out]() mutable {
      auto g = out.grad();
      for (Tensor<T> *t : {&a, &b}) {
        if (!t->requires_grad()) continue;
        auto gt = t->mutable_grad();
        for (size_t i = 0; i < g.size(); ++i) gt[i] += g[i];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> AddRowBias(Tape<T> &tape, const Tensor<T> &x, const Tensor<T> &bias) {
  RequireRank(x, 2, "add_row_bias");
  RequireRank(bias, 1, "add_row_bias");
  Require(x.dim(1) == bias.dim(0), "add_row_bias",
          "bias " + ShapeString(bias.shape()) + " does not fit rows of " +
              ShapeString(x.shape()));
  const int64_t rows = x.dim(0), cols = x.dim(1);
  std::vector<T> values(x.size());
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t c = 0; c < cols; ++c) values[r * cols + c] = x[r * cols + c] + bias[c];
  }
  Tensor<T> out = MakeOutput(tape, "add_row_bias", x.shape(), std::move(values),
                             {&x, &bias});
  if (out.requires_grad()) {
    tape.Record("add_row_bias", {x, bias}, out, [x = x, bias = bias, out, rows, cols]() mutable {
      auto g = out.grad();
      if (x.requires_grad()) {
        auto gx = x.mutable_grad();
        for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
      }
      if (bias.requires_grad()) {
        auto gb = bias.mutable_grad();
        for (int64_t r = 0; r < rows; ++r) {
          for (int64_t c = 0; c < cols; ++c) gb[c] += g[r * cols + c];
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Mul(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b) {
  RequireSameShape(a, b, "mul");
  std::vector<T> values(a.size());
  for (int64_t i = 0; i < a.size(); ++i) values[i] = a[i] * b[i];
  Tensor<T> out = MakeOutput(tape, "mul", a.shape(), std::move(values), {&a, &b});
  if (out.requires_grad()) {
    tape.Record("mul", {a, b}, out, [a = a, b = b, out]() mutable {
      auto g = out.grad();
      if (a.requires_grad()) {
        auto ga = a.mutable_grad();
        for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b[i];
      }
      if (b.requires_grad()) {
        auto gb = b.mutable_grad();
        for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a[i];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> MulRow(Tape<T> &tape, const Tensor<T> &x, const Tensor<T> &w) {
  RequireRank(x, 2, "mul_row");
  RequireRank(w, 1, "mul_row");
  Require(x.dim(1) == w.dim(0), "mul_row",
          "weights " + ShapeString(w.shape()) + " do not fit rows of " +
              ShapeString(x.shape()));
  const int64_t rows = x.dim(0), cols = x.dim(1);
  std::vector<T> values(x.size());
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t c = 0; c < cols; ++c) values[r * cols + c] = x[r * cols + c] * w[c];
  }
  Tensor<T> out = MakeOutput(tape, "mul_row", x.shape(), std::move(values), {&x, &w});
  if (out.requires_grad()) {
    tape.Record("mul_row", {x, w}, out, [x = x, w = w, out, rows, cols]() mutable {
      auto g = out.grad();
      if (x.requires_grad()) {
        auto gx = x.mutable_grad();
        for (int64_t r = 0; r < rows; ++r) {
          for (int64_t c = 0; c < cols; ++c) gx[r * cols + c] += g[r * cols + c] * w[c];
        }
      }
      if (w.requires_grad()) {
        auto gw = w.mutable_grad();
        for (int64_t r = 0; r < rows; ++r) {
          for (int64_t c = 0; c < cols; ++c) gw[c] += g[r * cols + c] * x[r * cols + c];
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Scale(Tape<T> &tape, const Tensor<T> &x, T factor) {
  std::vector<T> values(x.size());
  for (int64_t i = 0; i < x.size(); ++i) values[i] = x[i] * factor;
  Tensor<T> out = MakeOutput(tape, "scale", x.shape(), std::move(values), {&x});
  if (out.requires_grad()) {
    tape.Record("scale", {x}, out, [x = x, out, factor]() mutable {
      auto g = out.grad();
      auto gx = x.mutable_grad();
      for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * factor;
    });
  }
  return out;
}

template <typename T>
Tensor<T> Tanh(Tape<T> &tape, const Tensor<T> &x) {
  std::vector<T> values(x.size());
  for (int64_t i = 0; i < x.size(); ++i) values[i] = std::tanh(x[i]);
  Tensor<T> out = MakeOutput(tape, "tanh", x.shape(), std::move(values), {&x});
  if (out.requires_grad()) {
    tape.Record("tanh", {x}, out, [x = x, out]() mutable {
      auto g = out.grad();
      auto gx = x.mutable_grad();
      for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (T(1) - out[i] * out[i]);
    });
  }
  return out;
}

template <typename T>
Tensor<T> Relu(Tape<T> &tape, const Tensor<T> &x) {
  std::vector<T> values(x.size());
  for (int64_t i = 0; i < x.size(); ++i) values[i] = x[i] > 0 ? x[i] : T(0);
  Tensor<T> out = MakeOutput(tape, "relu", x.shape(), std::move(values), {&x});
  if (out.requires_grad()) {
    tape.Record("relu", {x}, out, [x = x, out]() mutable {
      auto g = out.grad();
      auto gx = x.mutable_grad();
      for (size_t i = 0; i < g.size(); ++i) {
        if (x[i] > 0) gx[i] += g[i];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Sigmoid(Tape<T> &tape, const Tensor<T> &x) {
  std::vector<T> values(x.size());
  for (int64_t i = 0; i < x.size(); ++i) {
    // Split by sign so exp never overflows.
    const T v = x[i];
    if (v >= 0) {
      values[i] = T(1) / (T(1) + std::exp(-v));
    } else {
      const T e = std::exp(v);
      values[i] = e / (T(1) + e);
    }
  }
  Tensor<T> out = MakeOutput(tape, "sigmoid", x.shape(), std::move(values), {&x});
  if (out.requires_grad()) {
    tape.Record("sigmoid", {x}, out, [x = x, out]() mutable {
      auto g = out.grad();
      auto gx = x.mutable_grad();
      for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * out[i] * (T(1) - out[i]);
    });
  }
  return out;
}

template <typename T>
Tensor<T> SoftmaxRows(Tape<T> &tape, const Tensor<T> &x) {
  RequireRank(x, 2, "softmax_rows");
  const int64_t rows = x.dim(0), cols = x.dim(1);
  std::vector<T> values(x.size());
  for (int64_t r = 0; r < rows; ++r) {
    const T *in = x.raw() + r * cols;
    T *row = values.data() + r * cols;
    const T max = *std::max_element(in, in + cols);
    T total = 0;
    for (int64_t c = 0; c < cols; ++c) {
      row[c] = std::exp(in[c] - max);
      total += row[c];
    }
    for (int64_t c = 0; c < cols; ++c) row[c] /= total;
  }
  Tensor<T> out = MakeOutput(tape, "softmax_rows", x.shape(), std::move(values), {&x});
  if (out.requires_grad()) {
    tape.Record("softmax_rows", {x}, out, [x = x, out, rows, cols]() mutable {
      auto g = out.grad();
      auto gx = x.mutable_grad();
      for (int64_t r = 0; r < rows; ++r) {
        T dot = 0;
        for (int64_t c = 0; c < cols; ++c) dot += g[r * cols + c] * out[r * cols + c];
        for (int64_t c = 0; c < cols; ++c) {
          gx[r * cols + c] += out[r * cols + c] * (g[r * cols + c] - dot);
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Concat(Tape<T> &tape, std::span<const Tensor<T>> parts, int64_t axis) {
  Require(!parts.empty(), "concat", "no inputs");
  const Shape &first = parts[0].shape();
  Require(axis >= 0 && axis < static_cast<int64_t>(first.size()), "concat",
          "axis " + std::to_string(axis) + " out of range for " + ShapeString(first));
  Shape out_shape = first;
  out_shape[axis] = 0;
  for (const Tensor<T> &part : parts) {
    Shape probe = part.shape();
    Require(probe.size() == first.size(), "concat",
            "rank mismatch " + ShapeString(first) + " vs " + ShapeString(probe));
    out_shape[axis] += probe[axis];
    probe[axis] = first[axis];
    Require(probe == first, "concat",
            "incompatible shapes " + ShapeString(first) + " and " +
                ShapeString(part.shape()) + " on axis " + std::to_string(axis));
  }
  const AxisLayout out_layout = LayoutOf(out_shape, axis);
  std::vector<T> values(NumElements(out_shape));
  int64_t offset = 0;
  for (const Tensor<T> &part : parts) {
    const int64_t block = part.dim(axis) * out_layout.inner;
    for (int64_t o = 0; o < out_layout.outer; ++o) {
      std::copy_n(part.raw() + o * block, block,
                  values.data() + o * out_layout.extent * out_layout.inner + offset);
    }
    offset += block;
  }
  bool any_grad = false;
  for (const Tensor<T> &part : parts) any_grad = any_grad || part.requires_grad();
  Tensor<T> out = Tensor<T>::FromData(out_shape, std::move(values));
  if (tape.recording() && any_grad) {
    out.set_requires_grad(true, false);
    std::vector<Tensor<T>> inputs(parts.begin(), parts.end());
    tape.Record("concat", inputs, out, [inputs, out, out_layout, axis]() mutable {
      auto g = out.grad();
      int64_t offset = 0;
      for (Tensor<T> &part : inputs) {
        const int64_t block = part.dim(axis) * out_layout.inner;
        if (part.requires_grad()) {
          auto gp = part.mutable_grad();
          for (int64_t o = 0; o < out_layout.outer; ++o) {
            const T *src = g.data() + o * out_layout.extent * out_layout.inner + offset;
            T *dst = gp.data() + o * block;
            for (int64_t i = 0; i < block; ++i) dst[i] += src[i];
          }
        }
        offset += block;
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Concat(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b, int64_t axis) {
  const Tensor<T> parts[] = {a, b};
  return Concat<T>(tape, std::span<const Tensor<T>>(parts), axis);
}

template <typename T>
Tensor<T> Slice(Tape<T> &tape, const Tensor<T> &x, int64_t axis, int64_t start,
                int64_t length) {
  Require(axis >= 0 && axis < x.rank(), "slice",
          "axis " + std::to_string(axis) + " out of range for " + ShapeString(x.shape()));
  Require(start >= 0 && length > 0 && start + length <= x.dim(axis), "slice",
          "range [" + std::to_string(start) + ", " + std::to_string(start + length) +
              ") outside extent of " + ShapeString(x.shape()));
  const AxisLayout in_layout = LayoutOf(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape[axis] = length;
  const int64_t block = length * in_layout.inner;
  const int64_t in_block = in_layout.extent * in_layout.inner;
  const int64_t skip = start * in_layout.inner;
  std::vector<T> values(NumElements(out_shape));
  for (int64_t o = 0; o < in_layout.outer; ++o) {
    std::copy_n(x.raw() + o * in_block + skip, block, values.data() + o * block);
  }
  Tensor<T> out = MakeOutput(tape, "slice", out_shape, std::move(values), {&x});
  if (out.requires_grad()) {
    tape.Record("slice", {x}, out, [x = x, out, in_layout, block, in_block, skip]() mutable {
      auto g = out.grad();
      auto gx = x.mutable_grad();
      for (int64_t o = 0; o < in_layout.outer; ++o) {
        T *dst = gx.data() + o * in_block + skip;
        const T *src = g.data() + o * block;
        for (int64_t i = 0; i < block; ++i) dst[i] += src[i];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> Reshape(Tape<T> &tape, const Tensor<T> &x, const Shape &shape) {
  Require(NumElements(shape) == x.size(), "reshape",
          "cannot reshape " + ShapeString(x.shape()) + " to " + ShapeString(shape));
  std::vector<T> values(x.data().begin(), x.data().end());
  Tensor<T> out = MakeOutput(tape, "reshape", shape, std::move(values), {&x});
  if (out.requires_grad()) {
    tape.Record("reshape", {x}, out, [x = x, out]() mutable {
      auto g = out.grad();
      auto gx = x.mutable_grad();
      for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    });
  }
  return out;
}

template <typename T>
Tensor<T> Flatten(Tape<T> &tape, const Tensor<T> &x) {
  return Reshape(tape, x, {x.size()});
}

template <typename T>
Tensor<T> Transpose(Tape<T> &tape, const Tensor<T> &x) {
  RequireRank(x, 2, "transpose");
  const int64_t rows = x.dim(0), cols = x.dim(1);
  std::vector<T> values(x.size());
  MatrixMap<T>(values.data(), cols, rows) = AsMatrix(x).transpose();
  Tensor<T> out = MakeOutput(tape, "transpose", {cols, rows}, std::move(values), {&x});
  if (out.requires_grad()) {
    tape.Record("transpose", {x}, out, [x = x, out]() mutable {
      GradMatrix(x) += OutGradMatrix(out).transpose();
    });
  }
  return out;
}

template <typename T>
Tensor<T> Sum(Tape<T> &tape, const Tensor<T> &x) {
  T total = 0;
  for (T v : x.data()) total += v;
  Tensor<T> out = MakeOutput(tape, "sum", {}, std::vector<T>{total}, {&x});
  if (out.requires_grad()) {
    tape.Record("sum", {x}, out, [x = x, out]() mutable {
      const T g = out.grad()[0];
      for (T &v : x.mutable_grad()) v += g;
    });
  }
  return out;
}

template <typename T>
Tensor<T> GatherRows(Tape<T> &tape, const Tensor<T> &table,
                     std::span<const int32_t> ids) {
  RequireRank(table, 2, "gather_rows");
  Require(!ids.empty(), "gather_rows", "no ids");
  const int64_t vocab = table.dim(0), width = table.dim(1);
  std::vector<T> values(ids.size() * width);
  for (size_t r = 0; r < ids.size(); ++r) {
    Require(ids[r] >= 0 && ids[r] < vocab, "gather_rows",
            "id " + std::to_string(ids[r]) + " outside table " + ShapeString(table.shape()));
    std::copy_n(table.raw() + ids[r] * width, width, values.data() + r * width);
  }
  Tensor<T> out = MakeOutput(tape, "gather_rows",
                             {static_cast<int64_t>(ids.size()), width},
                             std::move(values), {&table});
  if (out.requires_grad()) {
    std::vector<int32_t> rows(ids.begin(), ids.end());
    tape.Record("gather_rows", {table}, out,
                [table = table, out, rows = std::move(rows), width]() mutable {
                  auto g = out.grad();
                  auto gt = table.mutable_grad();
                  for (size_t r = 0; r < rows.size(); ++r) {
                    T *dst = gt.data() + rows[r] * width;
                    const T *src = g.data() + r * width;
                    for (int64_t c = 0; c < width; ++c) dst[c] += src[c];
                  }
                });
  }
  return out;
}

template <typename T>
Tensor<T> Bilinear(Tape<T> &tape, const Tensor<T> &left, const Tensor<T> &tensor,
                   const Tensor<T> &right) {
  RequireRank(left, 2, "bilinear");
  RequireRank(right, 2, "bilinear");
  RequireRank(tensor, 3, "bilinear");
  Require(left.dim(0) == right.dim(0) && tensor.dim(1) == left.dim(1) &&
              tensor.dim(2) == right.dim(1),
          "bilinear",
          "incompatible shapes " + ShapeString(left.shape()) + ", " +
              ShapeString(tensor.shape()) + ", " + ShapeString(right.shape()));
  const int64_t batch = left.dim(0), slices = tensor.dim(0);
  const int64_t n = tensor.dim(1), m = tensor.dim(2);
  auto slice_of = [n, m](const Tensor<T> &t, int64_t k) {
    return ConstMatrixMap<T>(t.raw() + k * n * m, n, m);
  };
  std::vector<T> values(batch * slices);
  for (int64_t k = 0; k < slices; ++k) {
    RowMatrix<T> projected = AsMatrix(left) * slice_of(tensor, k);
    auto dots = (projected.array() * AsMatrix(right).array()).rowwise().sum();
    for (int64_t b = 0; b < batch; ++b) values[b * slices + k] = dots(b);
  }
  Tensor<T> out = MakeOutput(tape, "bilinear", {batch, slices}, std::move(values),
                             {&left, &tensor, &right});
  if (out.requires_grad()) {
    tape.Record("bilinear", {left, tensor, right}, out,
                [left = left, tensor = tensor, right = right, out, slices, n, m, slice_of]() mutable {
                  auto g = OutGradMatrix(out);
                  for (int64_t k = 0; k < slices; ++k) {
                    auto tk = slice_of(tensor, k);
                    auto weight = g.col(k).asDiagonal();
                    if (left.requires_grad()) {
                      GradMatrix(left).noalias() += weight * (AsMatrix(right) * tk.transpose());
                    }
                    if (right.requires_grad()) {
                      GradMatrix(right).noalias() += weight * (AsMatrix(left) * tk);
                    }
                    if (tensor.requires_grad()) {
                      MatrixMap<T> gk(tensor.mutable_grad().data() + k * n * m, n, m);
                      gk.noalias() += AsMatrix(left).transpose() * (weight * AsMatrix(right));
                    }
                  }
                });
  }
  return out;
}

template <typename T>
Tensor<T> TimeWeightedSum(Tape<T> &tape, const Tensor<T> &weights, const Tensor<T> &seq) {
  RequireRank(weights, 2, "time_weighted_sum");
  RequireRank(seq, 2, "time_weighted_sum");
  const int64_t batch = weights.dim(0), steps = weights.dim(1), width = seq.dim(1);
  Require(seq.dim(0) == batch * steps, "time_weighted_sum",
          "sequence " + ShapeString(seq.shape()) + " is not time-major for weights " +
              ShapeString(weights.shape()));
  std::vector<T> values(batch * width, T(0));
  for (int64_t t = 0; t < steps; ++t) {
    for (int64_t b = 0; b < batch; ++b) {
      const T w = weights[b * steps + t];
      const T *row = seq.raw() + (t * batch + b) * width;
      T *dst = values.data() + b * width;
      for (int64_t d = 0; d < width; ++d) dst[d] += w * row[d];
    }
  }
  Tensor<T> out = MakeOutput(tape, "time_weighted_sum", {batch, width}, std::move(values),
                             {&weights, &seq});
  if (out.requires_grad()) {
    tape.Record("time_weighted_sum", {weights, seq}, out,
                [weights = weights, seq = seq, out, batch, steps, width]() mutable {
                  auto g = out.grad();
                  for (int64_t t = 0; t < steps; ++t) {
                    for (int64_t b = 0; b < batch; ++b) {
                      const T *go = g.data() + b * width;
                      const int64_t row = (t * batch + b) * width;
                      if (weights.requires_grad()) {
                        T dot = 0;
                        for (int64_t d = 0; d < width; ++d) dot += go[d] * seq[row + d];
                        weights.mutable_grad()[b * steps + t] += dot;
                      }
                      if (seq.requires_grad()) {
                        const T w = weights[b * steps + t];
                        T *gs = seq.mutable_grad().data() + row;
                        for (int64_t d = 0; d < width; ++d) gs[d] += w * go[d];
                      }
                    }
                  }
                });
  }
  return out;
}

template <typename T>
Tensor<T> CrossEntropy(Tape<T> &tape, const Tensor<T> &probs, const Tensor<T> &onehot) {
  RequireRank(probs, 2, "cross_entropy");
  RequireSameShape(probs, onehot, "cross_entropy");
  const int64_t rows = probs.dim(0);
  const T clamp = static_cast<T>(kLogClamp);
  T total = 0;
  for (int64_t i = 0; i < probs.size(); ++i) {
    if (onehot[i] != T(0)) total -= onehot[i] * std::log(std::max(probs[i], clamp));
  }
  Tensor<T> out = MakeOutput(tape, "cross_entropy", {}, std::vector<T>{total / rows},
                             {&probs, &onehot});
  if (out.requires_grad()) {
    tape.Record("cross_entropy", {probs, onehot}, out,
                [probs = probs, onehot = onehot, out, rows, clamp]() mutable {
                  const T g = out.grad()[0] / static_cast<T>(rows);
                  if (probs.requires_grad()) {
                    auto gp = probs.mutable_grad();
                    for (int64_t i = 0; i < probs.size(); ++i) {
                      if (probs[i] > clamp) gp[i] -= g * onehot[i] / probs[i];
                    }
                  }
                  if (onehot.requires_grad()) {
                    auto gy = onehot.mutable_grad();
                    for (int64_t i = 0; i < probs.size(); ++i) {
                      gy[i] -= g * std::log(std::max(probs[i], clamp));
                    }
                  }
                });
  }
  return out;
}

#define MTSS_INSTANTIATE_OPS(T)                                                      \
  template Tensor<T> MatMul(Tape<T> &, const Tensor<T> &, const Tensor<T> &);         \
  template Tensor<T> Add(Tape<T> &, const Tensor<T> &, const Tensor<T> &);            \
  template Tensor<T> AddRowBias(Tape<T> &, const Tensor<T> &, const Tensor<T> &);     \
  template Tensor<T> Mul(Tape<T> &, const Tensor<T> &, const Tensor<T> &);            \
  template Tensor<T> MulRow(Tape<T> &, const Tensor<T> &, const Tensor<T> &);         \
  template Tensor<T> Scale(Tape<T> &, const Tensor<T> &, T);                          \
  template Tensor<T> Tanh(Tape<T> &, const Tensor<T> &);                              \
  template Tensor<T> Sigmoid(Tape<T> &, const Tensor<T> &);                           \
  template Tensor<T> Relu(Tape<T> &, const Tensor<T> &);                              \
  template Tensor<T> SoftmaxRows(Tape<T> &, const Tensor<T> &);                       \
  template Tensor<T> Concat(Tape<T> &, std::span<const Tensor<T>>, int64_t);          \
  template Tensor<T> Concat(Tape<T> &, const Tensor<T> &, const Tensor<T> &, int64_t); \
  template Tensor<T> Slice(Tape<T> &, const Tensor<T> &, int64_t, int64_t, int64_t);  \
  template Tensor<T> Reshape(Tape<T> &, const Tensor<T> &, const Shape &);            \
  template Tensor<T> Flatten(Tape<T> &, const Tensor<T> &);                           \
  template Tensor<T> Transpose(Tape<T> &, const Tensor<T> &);                         \
  template Tensor<T> Sum(Tape<T> &, const Tensor<T> &);                               \
  template Tensor<T> GatherRows(Tape<T> &, const Tensor<T> &, std::span<const int32_t>); \
  template Tensor<T> Bilinear(Tape<T> &, const Tensor<T> &, const Tensor<T> &,        \
                              const Tensor<T> &);                                     \
  template Tensor<T> TimeWeightedSum(Tape<T> &, const Tensor<T> &, const Tensor<T> &); \
  template Tensor<T> CrossEntropy(Tape<T> &, const Tensor<T> &, const Tensor<T> &);

MTSS_INSTANTIATE_OPS(float)
MTSS_INSTANTIATE_OPS(double)

#undef MTSS_INSTANTIATE_OPS

}  // namespace mtss
