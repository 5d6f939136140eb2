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

#ifndef MTSS_DATA_SPLITS_H_
#define MTSS_DATA_SPLITS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace mtss {

// Train/dev/test fractions. The defaults compose an 80:20 train/test split
// with a 90:10 train/dev split of the training part.
struct SplitSpec {
  uint64_t seed = 1;
  double train = 0.72;
  double dev = 0.08;
  double test = 0.20;
  // Keep each split's class mix close to the corpus mix.
  bool stratified = true;
};

struct Splits {
  std::vector<int64_t> train;
  std::vector<int64_t> dev;
  std::vector<int64_t> test;
};

inline constexpr int64_t kMinSplitCorpus = 10;

// Partitions record indices 0..labels.size()-1. Test and dev sizes are
// round(fraction * n); train takes the rest. Throws ConfigError for fewer
// than kMinSplitCorpus records or fractions that do not sum to 1.
Splits SplitDataset(std::span<const int32_t> labels, const SplitSpec &spec);

}  // namespace mtss

#endif  // MTSS_DATA_SPLITS_H_
