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

#ifndef MTSS_TRAIN_OPTIMIZER_H_
#define MTSS_TRAIN_OPTIMIZER_H_

#include <cstdint>
#include <vector>

#include "mtss/model/parameters.h"

namespace mtss {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Global gradient-norm clipping threshold; 0 disables clipping.
  double clip_norm = 0.0;
};

// Adam with bias correction:
//   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2,
//   theta <- theta - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps).
// Parameters without an allocated gradient are treated as having g = 0.
template <typename T>
class Adam {
 public:
  Adam(ParameterSet<T> &params, const AdamConfig &config);

  void Step();

  const AdamConfig &config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  int64_t step_count() const { return step_; }
  // Moments in parameter registration order, each shaped like its tensor.
  const std::vector<std::vector<T>> &first_moment() const { return m_; }
  const std::vector<std::vector<T>> &second_moment() const { return v_; }

  // Replaces the state; throws DimensionError if any moment does not match
  // its parameter's size.
  void SetState(int64_t step, std::vector<std::vector<T>> m, std::vector<std::vector<T>> v);
  void Reset();

 private:
  ParameterSet<T> &params_;
  AdamConfig config_;
  int64_t step_ = 0;
  std::vector<std::vector<T>> m_;
  std::vector<std::vector<T>> v_;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace mtss

#endif  // MTSS_TRAIN_OPTIMIZER_H_
