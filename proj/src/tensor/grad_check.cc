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

#include "mtss/tensor/grad_check.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mtss/errors.h"

namespace mtss {

double RelativeError(double analytic, double numeric) {
  const double scale =
      std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / scale;
}

GradCheckReport GradCheck(const ScalarFunction &f,
                          std::span<Tensor<double>> inputs, double step) {
  for (Tensor<double> &input : inputs) {
    if (!input.requires_grad()) {
      throw UsageError("grad check inputs must require gradients");
    }
    input.ZeroGrad();
  }
  std::vector<std::vector<double>> analytic;
  {
    Tape<double> tape;
    Tensor<double> loss = f(tape);
    if (loss.requires_grad()) tape.Backward(loss);
    for (const Tensor<double> &input : inputs) {
      analytic.emplace_back(input.grad().begin(), input.grad().end());
    }
  }

  auto evaluate = [&f]() {
    Tape<double> tape(/*recording=*/false);
    return f(tape).item();
  };

  GradCheckReport report;
  for (size_t i = 0; i < inputs.size(); ++i) {
    auto values = inputs[i].data();
    for (size_t j = 0; j < values.size(); ++j) {
      const double saved = values[j];
      auto at = [&](double offset) {
        values[j] = saved + offset;
        return evaluate();
      };
      const double numeric =
          (at(-2 * step) - 8 * at(-step) + 8 * at(step) - at(2 * step)) / (12.0 * step);
      values[j] = saved;
      const double error = RelativeError(analytic[i][j], numeric);
      ++report.coordinates;
      if (error > report.max_relative_error || report.worst_input < 0) {
        report.max_relative_error = std::max(report.max_relative_error, error);
        report.worst_input = static_cast<int>(i);
        report.worst_index = static_cast<int64_t>(j);
        report.worst_analytic = analytic[i][j];
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace mtss
