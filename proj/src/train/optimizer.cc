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

#include "mtss/train/optimizer.h"

#include <cmath>
#include <string>

#include "mtss/errors.h"

namespace mtss {

template <typename T>
Adam<T>::Adam(ParameterSet<T> &params, const AdamConfig &config)
    : params_(params), config_(config) {
  if (!(config.learning_rate > 0.0) || config.beta1 < 0.0 || config.beta1 >= 1.0 ||
      config.beta2 < 0.0 || config.beta2 >= 1.0 || !(config.epsilon > 0.0) ||
      config.clip_norm < 0.0) {
    throw ConfigError("invalid Adam hyperparameters");
  }
  Reset();
}

template <typename T>
void Adam<T>::Reset() {
  step_ = 0;
  m_.clear();
  v_.clear();
  for (const auto &entry : params_.entries()) {
    m_.emplace_back(entry.tensor.size(), T(0));
    v_.emplace_back(entry.tensor.size(), T(0));
  }
}

template <typename T>
void Adam<T>::SetState(int64_t step, std::vector<std::vector<T>> m,
                       std::vector<std::vector<T>> v) {
  const auto &entries = params_.entries();
  if (m.size() != entries.size() || v.size() != entries.size()) {
    throw DimensionError("optimizer state has " + std::to_string(m.size()) +
                         " tensors, model has " + std::to_string(entries.size()));
  }
  for (size_t i = 0; i < entries.size(); ++i) {
    const auto n = static_cast<size_t>(entries[i].tensor.size());
    if (m[i].size() != n || v[i].size() != n) {
      throw DimensionError("optimizer state for " + entries[i].name + " does not match " +
                           ShapeString(entries[i].tensor.shape()));
    }
  }
  step_ = step;
  m_ = std::move(m);
  v_ = std::move(v);
}

template <typename T>
void Adam<T>::Step() {
  auto &entries = params_.entries();
  if (entries.size() != m_.size()) {
    throw UsageError("parameters were added after the optimizer was created");
  }
  double scale = 1.0;
  if (config_.clip_norm > 0.0) {
    double sq = 0.0;
    for (const auto &entry : entries) {
      for (T g : entry.tensor.grad()) sq += static_cast<double>(g) * g;
    }
    const double norm = std::sqrt(sq);
    if (norm > config_.clip_norm) scale = config_.clip_norm / norm;
  }

  ++step_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double correct1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double correct2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double lr = config_.learning_rate, eps = config_.epsilon;
  for (size_t i = 0; i < entries.size(); ++i) {
    Tensor<T> &param = entries[i].tensor;
    auto grad = param.grad();
    const bool has_grad = !grad.empty();
    T *theta = param.raw();
    T *m = m_[i].data();
    T *v = v_[i].data();
    for (int64_t j = 0; j < param.size(); ++j) {
      const double g = has_grad ? static_cast<double>(grad[j]) * scale : 0.0;
      const double mj = b1 * m[j] + (1.0 - b1) * g;
      const double vj = b2 * v[j] + (1.0 - b2) * g * g;
      m[j] = static_cast<T>(mj);
      v[j] = static_cast<T>(vj);
      theta[j] = static_cast<T>(theta[j] - lr * (mj / correct1) / (std::sqrt(vj / correct2) + eps));
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace mtss
