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

#include "mtss/tensor/tensor.h"

#include <algorithm>
#include <sstream>

#include "mtss/errors.h"

namespace mtss {

int64_t NumElements(const Shape &shape) {
  int64_t n = 1;
  for (int64_t extent : shape) n *= extent;
  return n;
}

std::string ShapeString(const Shape &shape) {
  std::ostringstream out;
  out << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << "x";
    out << shape[i];
  }
  out << "]";
  return out.str();
}

namespace {

void CheckShape(const Shape &shape) {
  for (int64_t extent : shape) {
    if (extent <= 0) {
      throw DimensionError("tensor extents must be positive, got " +
                           ShapeString(shape));
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> Tensor<T>::Zeros(const Shape &shape, bool requires_grad) {
  return Filled(shape, T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::Filled(const Shape &shape, T value, bool requires_grad) {
  CheckShape(shape);
  return FromData(shape, std::vector<T>(NumElements(shape), value),
                  requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::FromData(const Shape &shape, std::vector<T> data,
                              bool requires_grad) {
  CheckShape(shape);
  if (static_cast<int64_t>(data.size()) != NumElements(shape)) {
    throw DimensionError("data length " + std::to_string(data.size()) +
                         " does not match shape " + ShapeString(shape));
  }
  auto impl = std::make_shared<Impl>();
  impl->shape = shape;
  impl->data = std::move(data);
  Tensor t(std::move(impl));
  t.set_requires_grad(requires_grad);
  return t;
}

template <typename T>
Tensor<T> Tensor<T>::FromScalar(T value) {
  return FromData({}, {value});
}

template <typename T>
T Tensor<T>::item() const {
  if (impl_->data.size() != 1) {
    throw UsageError("item() on tensor of shape " + ShapeString(shape()));
  }
  return impl_->data[0];
}

template <typename T>
void Tensor<T>::set_requires_grad(bool value, bool allocate) {
  impl_->requires_grad = value;
  if (value && allocate) {
    impl_->grad.assign(impl_->data.size(), T(0));
  } else if (!value) {
    impl_->grad.clear();
    impl_->grad.shrink_to_fit();
  }
}

template <typename T>
std::span<T> Tensor<T>::mutable_grad() {
  if (impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), T(0));
  return impl_->grad;
}

template <typename T>
void Tensor<T>::ZeroGrad() {
  std::fill(impl_->grad.begin(), impl_->grad.end(), T(0));
}

template <typename T>
Tensor<T> Tensor<T>::Clone() const {
  auto impl = std::make_shared<Impl>(*impl_);
  return Tensor(std::move(impl));
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace mtss
