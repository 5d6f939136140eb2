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

#ifndef MTSS_CLI_GRADCHECK_SUITE_H_
#define MTSS_CLI_GRADCHECK_SUITE_H_

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "mtss/tensor/grad_check.h"

namespace mtss {

inline constexpr double kGradCheckTolerance = 1e-4;

// One named check. `run` returns the worst report over its trials.
struct GradCheckCase {
  std::string name;
  std::function<GradCheckReport()> run;
};

struct GradCheckRow {
  std::string name;
  double max_relative_error = 0.0;
  int64_t coordinates = 0;
  double seconds = 0.0;
  bool passed = false;
  std::string error;  // set when the case threw
};

// Every differentiable op, every layer, and the tiny end-to-end model
// (L=3, all widths 2) in each mode and embedding kind.
std::vector<GradCheckCase> StandardGradCheckSuite();

std::vector<GradCheckRow> RunGradCheckSuite(const std::vector<GradCheckCase> &cases,
                                            double tolerance = kGradCheckTolerance);

// Fixed-width table with one line per row and a closing summary.
void PrintGradCheckTable(std::ostream &out, const std::vector<GradCheckRow> &rows,
                         double tolerance = kGradCheckTolerance);

}  // namespace mtss

#endif  // MTSS_CLI_GRADCHECK_SUITE_H_
