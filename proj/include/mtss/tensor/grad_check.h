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

#ifndef MTSS_TENSOR_GRAD_CHECK_H_
#define MTSS_TENSOR_GRAD_CHECK_H_

#include <functional>
#include <span>
#include <string>

#include "mtss/tensor/tape.h"
#include "mtss/tensor/tensor.h"

namespace mtss {

// A scalar-valued function of tensors the caller closes over.
using ScalarFunction = std::function<Tensor<double>(Tape<double> &)>;

struct GradCheckReport {
  double max_relative_error = 0.0;
  // Input index and flat coordinate of the worst disagreement.
  int worst_input = -1;
  int64_t worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  int64_t coordinates = 0;
};

// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
double RelativeError(double analytic, double numeric);

// Compares reverse-mode gradients of f against the five-point difference
// (f(x-2h) - 8 f(x-h) + 8 f(x+h) - f(x+2h)) / 12h over every coordinate of
// every input. Its truncation error is O(h^4), which allows a step large
// enough to keep rounding error near 1e-12 for losses of order 1.
// Runs in 64-bit only. Input gradients are overwritten with the analytic
// gradient. A non-finite intermediate surfaces as the NumericalError thrown
// by the offending op.
GradCheckReport GradCheck(const ScalarFunction &f,
                          std::span<Tensor<double>> inputs,
                          double step = 1e-3);

}  // namespace mtss

#endif  // MTSS_TENSOR_GRAD_CHECK_H_
