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

// Differentiable operations. Each op computes its forward value eagerly and,
// when the tape records and some input requires gradients, appends its
// backward rule to the tape.
//
// There is no implicit broadcasting. The only broadcasts are the explicit
// row forms AddRowBias and MulRow.
//
// Every op checks its output for NaN/Inf and throws NumericalError naming
// itself.

#ifndef MTSS_TENSOR_OPS_H_
#define MTSS_TENSOR_OPS_H_

#include <cstdint>
#include <span>

#include "mtss/tensor/tape.h"
#include "mtss/tensor/tensor.h"

namespace mtss {

// [m x k] * [k x n] -> [m x n].
template <typename T>
Tensor<T> MatMul(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b);

template <typename T>
Tensor<T> Add(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b);

// x[m x n] + bias[n] added to every row.
template <typename T>
Tensor<T> AddRowBias(Tape<T> &tape, const Tensor<T> &x, const Tensor<T> &bias);

// Elementwise product of equal shapes.
template <typename T>
Tensor<T> Mul(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b);

// x[m x n] * w[n] applied to every row (a diagonal matrix product).
template <typename T>
Tensor<T> MulRow(Tape<T> &tape, const Tensor<T> &x, const Tensor<T> &w);

template <typename T>
Tensor<T> Scale(Tape<T> &tape, const Tensor<T> &x, T factor);

template <typename T>
Tensor<T> Tanh(Tape<T> &tape, const Tensor<T> &x);

template <typename T>
Tensor<T> Relu(Tape<T> &tape, const Tensor<T> &x);

template <typename T>
Tensor<T> Sigmoid(Tape<T> &tape, const Tensor<T> &x);

// Row-wise softmax of a rank-2 tensor, computed after subtracting each row's
// maximum.
template <typename T>
Tensor<T> SoftmaxRows(Tape<T> &tape, const Tensor<T> &x);

// Joins tensors along `axis`; all other extents must agree.
template <typename T>
Tensor<T> Concat(Tape<T> &tape, std::span<const Tensor<T>> parts,
                 int64_t axis);
template <typename T>
Tensor<T> Concat(Tape<T> &tape, const Tensor<T> &a, const Tensor<T> &b,
                 int64_t axis);

// The `length` entries starting at `start` along `axis`.
template <typename T>
Tensor<T> Slice(Tape<T> &tape, const Tensor<T> &x, int64_t axis,
                int64_t start, int64_t length);

template <typename T>
Tensor<T> Reshape(Tape<T> &tape, const Tensor<T> &x, const Shape &shape);

// Rank-1 view of x in row-major order.
template <typename T>
Tensor<T> Flatten(Tape<T> &tape, const Tensor<T> &x);

// Rank-2 transpose.
template <typename T>
Tensor<T> Transpose(Tape<T> &tape, const Tensor<T> &x);

// Sum of all elements as a rank-0 tensor.
template <typename T>
Tensor<T> Sum(Tape<T> &tape, const Tensor<T> &x);

// Rows of table[V x D] selected by ids -> [ids.size() x D]. The backward
// rule scatter-adds into the table gradient.
template <typename T>
Tensor<T> GatherRows(Tape<T> &tape, const Tensor<T> &table,
                     std::span<const int32_t> ids);

// out[b, k] = left[b]^T * tensor[k] * right[b] for left[B x n],
// tensor[K x n x m], right[B x m].
template <typename T>
Tensor<T> Bilinear(Tape<T> &tape, const Tensor<T> &left,
                   const Tensor<T> &tensor, const Tensor<T> &right);

// out[b] = sum_t weights[b, t] * seq[t * B + b] for weights[B x L] and a
// time-major sequence seq[(L * B) x D].
template <typename T>
Tensor<T> TimeWeightedSum(Tape<T> &tape, const Tensor<T> &weights,
                          const Tensor<T> &seq);

// Mean over rows of -log(max(probs[i, c], 1e-12)) weighted by the one-hot
// targets. Returns a rank-0 tensor.
template <typename T>
Tensor<T> CrossEntropy(Tape<T> &tape, const Tensor<T> &probs,
                       const Tensor<T> &onehot);

inline constexpr double kLogClamp = 1e-12;

}  // namespace mtss

#endif  // MTSS_TENSOR_OPS_H_
