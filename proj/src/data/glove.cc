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

#include "mtss/data/glove.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <random>

#include "mtss/errors.h"
#include "mtss/random.h"

namespace mtss {

GloveTable RandomEmbeddingTable(const Vocabulary &vocab, int64_t dim, uint64_t seed) {
  if (dim < 1) throw ConfigError("embedding dimension must be positive");
  GloveTable table;
  table.rows = vocab.size();
  table.dim = dim;
  table.values.resize(table.rows * dim);
  std::mt19937_64 rng = MakeRng(seed, kStreamGlove);
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  for (float &v : table.values) v = static_cast<float>(dist(rng));
  std::fill_n(table.values.begin(), dim, 0.0f);
  return table;
}

GloveTable LoadGlove(const std::string &path, const Vocabulary &vocab, int64_t dim,
                     uint64_t seed) {
  GloveTable table = RandomEmbeddingTable(vocab, dim, seed);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open GloVe file " + path);
  std::string line;
  int64_t line_no = 0;
  std::vector<double> parsed(dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t space = line.find(' ');
    if (space == std::string::npos) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": no vector values");
    }
    // Every line is validated, in-vocabulary or not.
    const char *cursor = line.data() + space;
    const char *end = line.data() + line.size();
    int64_t count = 0;
    while (true) {
      while (cursor < end && *cursor == ' ') ++cursor;
      if (cursor == end) break;
      double value;
      auto result = std::from_chars(cursor, end, value);
      if (result.ec != std::errc()) {
        throw FormatError(path + ":" + std::to_string(line_no) + ": unparsable value");
      }
      if (count < dim) parsed[count] = value;
      ++count;
      cursor = result.ptr;
    }
    if (count != dim) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(dim) + " values, found " + std::to_string(count));
    }
    const int32_t id = vocab.Id(std::string_view(line).substr(0, space));
    if (id < 2) continue;
    for (int64_t d = 0; d < dim; ++d) table.values[id * dim + d] = static_cast<float>(parsed[d]);
    ++table.found;
  }
  return table;
}

}  // namespace mtss
