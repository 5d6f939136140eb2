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

#include "mtss/model/parameters.h"

#include <algorithm>

#include "mtss/errors.h"

namespace mtss {

template <typename T>
Tensor<T> ParameterSet<T>::Add(std::string name, Tensor<T> tensor) {
  if (Contains(name)) throw UsageError("duplicate parameter name " + name);
  tensor.set_requires_grad(true);
  entries_.push_back(Entry{std::move(name), tensor});
  return tensor;
}

template <typename T>
const typename ParameterSet<T>::Entry *ParameterSet<T>::Find(const std::string &name) const {
  for (const Entry &entry : entries_) {
    if (entry.name == name) return &entry;
  }
  return nullptr;
}

template <typename T>
Tensor<T> &ParameterSet<T>::Get(const std::string &name) {
  return const_cast<Tensor<T> &>(std::as_const(*this).Get(name));
}

template <typename T>
const Tensor<T> &ParameterSet<T>::Get(const std::string &name) const {
  const Entry *entry = Find(name);
  if (entry == nullptr) throw UsageError("unknown parameter " + name);
  return entry->tensor;
}

template <typename T>
int64_t ParameterSet<T>::ElementCount() const {
  int64_t total = 0;
  for (const Entry &entry : entries_) total += entry.tensor.size();
  return total;
}

template <typename T>
void ParameterSet<T>::ZeroGrad() {
  for (Entry &entry : entries_) entry.tensor.ZeroGrad();
}

template <typename T>
std::vector<std::vector<T>> ParameterSet<T>::SnapshotValues() const {
  std::vector<std::vector<T>> values;
  values.reserve(entries_.size());
  for (const Entry &entry : entries_) {
    values.emplace_back(entry.tensor.data().begin(), entry.tensor.data().end());
  }
  return values;
}

template <typename T>
void ParameterSet<T>::RestoreValues(const std::vector<std::vector<T>> &values) {
  if (values.size() != entries_.size()) throw UsageError("snapshot does not match parameters");
  for (size_t i = 0; i < entries_.size(); ++i) {
    auto dst = entries_[i].tensor.data();
    if (values[i].size() != dst.size()) throw UsageError("snapshot does not match " + entries_[i].name);
    std::copy(values[i].begin(), values[i].end(), dst.begin());
  }
}

template class ParameterSet<float>;
template class ParameterSet<double>;

}  // namespace mtss
