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

#ifndef MTSS_MODEL_PARAMETERS_H_
#define MTSS_MODEL_PARAMETERS_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mtss/tensor/tensor.h"

namespace mtss {

// Named trainable tensors in registration order. Names are unique.
template <typename T>
class ParameterSet {
 public:
  struct Entry {
    std::string name;
    Tensor<T> tensor;
  };

  // Registers `tensor` (which gains requires_grad) and returns it.
  Tensor<T> Add(std::string name, Tensor<T> tensor);

  bool Contains(const std::string &name) const { return Find(name) != nullptr; }
  // Throws UsageError for unknown names.
  Tensor<T> &Get(const std::string &name);
  const Tensor<T> &Get(const std::string &name) const;

  const std::vector<Entry> &entries() const { return entries_; }
  std::vector<Entry> &entries() { return entries_; }
  size_t size() const { return entries_.size(); }

  // Total element count.
  int64_t ElementCount() const;
  void ZeroGrad();
  // Deep copy of every value, for snapshots.
  std::vector<std::vector<T>> SnapshotValues() const;
  void RestoreValues(const std::vector<std::vector<T>> &values);

 private:
  const Entry *Find(const std::string &name) const;

  std::vector<Entry> entries_;
};

extern template class ParameterSet<float>;
extern template class ParameterSet<double>;

}  // namespace mtss

#endif  // MTSS_MODEL_PARAMETERS_H_
