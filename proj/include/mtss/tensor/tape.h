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

#ifndef MTSS_TENSOR_TAPE_H_
#define MTSS_TENSOR_TAPE_H_

#include <functional>
#include <string>
#include <vector>

#include "mtss/tensor/tensor.h"

namespace mtss {

// Ordered record of differentiable operations for reverse-mode gradients.
//
// Ops append themselves in execution order, so every entry's inputs were
// produced by earlier entries (or are leaves). Backward walks the entries in
// reverse and runs each backward rule once. A tape built with
// recording=false keeps nothing, which is how evaluation passes run.
//
// A tape belongs to one thread and one training step.
template <typename T>
class Tape {
 public:
  // Reads the output's gradient and accumulates into the inputs' gradients.
  using BackwardFn = std::function<void()>;

  explicit Tape(bool recording = true) : recording_(recording) {}

  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  bool recording() const { return recording_; }

  // True when an op over `inputs` must be recorded.
  bool ShouldRecord(std::initializer_list<const Tensor<T> *> inputs) const;

  // Appends an op. `output` must already carry requires_grad.
  void Record(std::string name, std::vector<Tensor<T>> inputs,
              Tensor<T> output, BackwardFn backward);

  // Seeds d(loss)/d(loss) = 1 and propagates. Gradients accumulate into
  // whatever the leaves already hold.
  void Backward(const Tensor<T> &loss);

  size_t size() const { return entries_.size(); }
  const std::string &op_name(size_t i) const { return entries_[i].name; }
  void Clear() { entries_.clear(); }

 private:
  struct Entry {
    std::string name;
    std::vector<Tensor<T>> inputs;
    Tensor<T> output;
    BackwardFn backward;
  };

  bool recording_;
  std::vector<Entry> entries_;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace mtss

#endif  // MTSS_TENSOR_TAPE_H_
