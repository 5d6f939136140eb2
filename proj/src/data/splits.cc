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

#include "mtss/data/splits.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "mtss/errors.h"
#include "mtss/random.h"

namespace mtss {

Splits SplitDataset(std::span<const int32_t> labels, const SplitSpec &spec) {
  const auto n = static_cast<int64_t>(labels.size());
  if (n < kMinSplitCorpus) {
    throw ConfigError("refusing to split a corpus of " + std::to_string(n) +
                      " records (minimum " + std::to_string(kMinSplitCorpus) + ")");
  }
  if (spec.train < 0 || spec.dev < 0 || spec.test < 0 ||
      std::abs(spec.train + spec.dev + spec.test - 1.0) > 1e-9) {
    throw ConfigError("split fractions must be nonnegative and sum to 1");
  }
  const int64_t n_test = std::llround(spec.test * n);
  const int64_t n_dev = std::llround(spec.dev * n);
  if (n_test + n_dev > n) throw ConfigError("split fractions leave no room for training");

  std::mt19937_64 rng = MakeRng(spec.seed, kStreamSplit);
  std::vector<int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (spec.stratified) {
    // Shuffle within each class, then interleave classes so that every prefix
    // of the order has close to the corpus class mix.
    std::map<int32_t, std::vector<int64_t>> by_class;
    for (int64_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);
    struct Keyed {
      double key;
      int32_t label;
      int64_t index;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(n);
    for (auto &[label, members] : by_class) {
      std::shuffle(members.begin(), members.end(), rng);
      const double size = static_cast<double>(members.size());
      for (size_t rank = 0; rank < members.size(); ++rank) {
        keyed.push_back({(static_cast<double>(rank) + 0.5) / size, label, members[rank]});
      }
    }
    std::sort(keyed.begin(), keyed.end(), [](const Keyed &a, const Keyed &b) {
      return a.key != b.key ? a.key < b.key : a.label < b.label;
    });
    for (int64_t i = 0; i < n; ++i) order[i] = keyed[i].index;
  } else {
    std::shuffle(order.begin(), order.end(), rng);
  }

  Splits splits;
  splits.test.assign(order.begin(), order.begin() + n_test);
  splits.dev.assign(order.begin() + n_test, order.begin() + n_test + n_dev);
  splits.train.assign(order.begin() + n_test + n_dev, order.end());
  for (auto *part : {&splits.train, &splits.dev, &splits.test}) {
    std::sort(part->begin(), part->end());
  }
  return splits;
}

}  // namespace mtss
