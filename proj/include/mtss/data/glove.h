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

#ifndef MTSS_DATA_GLOVE_H_
#define MTSS_DATA_GLOVE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mtss/data/tokenizer.h"

namespace mtss {

struct GloveTable {
  int64_t rows = 0;
  int64_t dim = 0;
  std::vector<float> values;  // [rows x dim]
  int64_t found = 0;          // vocabulary words present in the file
};

// Builds the initial embedding table for `vocab` from a text file of
// "word v1 ... vD" lines. Words in the file are parsed as doubles and cast;
// words missing from the file get uniform(-0.05, 0.05) rows drawn from
// `seed`; the padding row is zero. A line with the wrong number of values
// throws FormatError naming the line.
GloveTable LoadGlove(const std::string &path, const Vocabulary &vocab,
                     int64_t dim, uint64_t seed);

// Random table with the same initialization as unmatched words.
GloveTable RandomEmbeddingTable(const Vocabulary &vocab, int64_t dim,
                                uint64_t seed);

}  // namespace mtss

#endif  // MTSS_DATA_GLOVE_H_
