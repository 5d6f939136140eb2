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

#include "mtss/tensor/tape.h"

#include "mtss/errors.h"

namespace mtss {

template <typename T>
bool Tape<T>::ShouldRecord(
    std::initializer_list<const Tensor<T> *> inputs) const {
  if (!recording_) return false;
  for (const Tensor<T> *t : inputs) {
    if (t->requires_grad()) return true;
  }
  return false;
}

template <typename T>
void Tape<T>::Record(std::string name, std::vector<Tensor<T>> inputs,
                     Tensor<T> output, BackwardFn backward) {
  entries_.push_back(Entry{std::move(name), std::move(inputs),
                           std::move(output), std::move(backward)});
}

template <typename T>
void Tape<T>::Backward(const Tensor<T> &loss) {
  if (loss.size() != 1) {
    throw UsageError("backward requires a scalar loss, got shape " +
                     ShapeString(loss.shape()));
  }
  if (!loss.requires_grad()) {
    throw UsageError("loss was not produced through a recording tape");
  }
  // Intermediate gradients restart from zero on every pass; only leaves
  // accumulate across calls.
  for (Entry &entry : entries_) entry.output.ZeroGrad();
  Tensor<T> seed = loss;
  seed.mutable_grad()[0] += T(1);
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    // Ops that do not lead to the loss never received a gradient.
    if (!it->output.has_grad()) continue;
    it->backward();
  }
}

template class Tape<float>;
template class Tape<double>;

}  // namespace mtss
