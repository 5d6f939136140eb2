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

#ifndef MTSS_TENSOR_TENSOR_H_
#define MTSS_TENSOR_TENSOR_H_

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mtss {

// Extents of a tensor, outermost first. A rank-0 shape holds one scalar.
using Shape = std::vector<int64_t>;

int64_t NumElements(const Shape &shape);
std::string ShapeString(const Shape &shape);

// Dense row-major array with an optional gradient accumulator.
//
// Tensor is a handle: copies share storage, which is what lets a computation
// tape refer back to the operands of an op. Use Clone() for a deep copy.
// A default-constructed Tensor is undefined and only valid as a placeholder.
template <typename T>
class Tensor {
 public:
  using Scalar = T;

  Tensor() = default;

  static Tensor Zeros(const Shape &shape, bool requires_grad = false);
  static Tensor Filled(const Shape &shape, T value, bool requires_grad = false);
  static Tensor FromData(const Shape &shape, std::vector<T> data,
                         bool requires_grad = false);
  static Tensor FromScalar(T value);

  bool defined() const { return impl_ != nullptr; }

  const Shape &shape() const { return impl_->shape; }
  int64_t rank() const { return static_cast<int64_t>(impl_->shape.size()); }
  int64_t dim(int64_t axis) const { return impl_->shape.at(axis); }
  int64_t size() const { return static_cast<int64_t>(impl_->data.size()); }

  std::span<T> data() { return impl_->data; }
  std::span<const T> data() const { return impl_->data; }
  T *raw() { return impl_->data.data(); }
  const T *raw() const { return impl_->data.data(); }

  T &operator[](int64_t i) { return impl_->data[i]; }
  const T &operator[](int64_t i) const { return impl_->data[i]; }
  // Rank-2 element access.
  T &at(int64_t row, int64_t col) {
    return impl_->data[row * impl_->shape[1] + col];
  }
  const T &at(int64_t row, int64_t col) const {
    return impl_->data[row * impl_->shape[1] + col];
  }
  // The single value of a one-element tensor.
  T item() const;

  bool requires_grad() const { return impl_->requires_grad; }
  // Turning gradients on allocates a zeroed accumulator unless `allocate` is
  // false (op outputs allocate lazily in backward). Turning them off drops
  // the accumulator.
  void set_requires_grad(bool value, bool allocate = true);

  bool has_grad() const { return !impl_->grad.empty(); }
  std::span<T> grad() { return impl_->grad; }
  std::span<const T> grad() const { return impl_->grad; }
  // Accumulator, allocated as zeros on first use.
  std::span<T> mutable_grad();
  void ZeroGrad();

  // Deep copy of values (and gradient, if any). The copy is detached from
  // any tape.
  Tensor Clone() const;
  bool SharesStorage(const Tensor &other) const { return impl_ == other.impl_; }

 private:
  struct Impl {
    Shape shape;
    std::vector<T> data;
    std::vector<T> grad;
    bool requires_grad = false;
  };

  explicit Tensor(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<Impl> impl_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace mtss

#endif  // MTSS_TENSOR_TENSOR_H_
