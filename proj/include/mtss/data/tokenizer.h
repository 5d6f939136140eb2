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

#ifndef MTSS_DATA_TOKENIZER_H_
#define MTSS_DATA_TOKENIZER_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mtss {

// Characters replaced by the separator before splitting; the default filter
// set of the Keras text tokenizer.
inline constexpr std::string_view kTokenFilters =
    "!\"#$%&()*+,-./:;<=>?@[\\]^_`{|}~\t\n";

// Lowercases, replaces every filter character with a space and splits on
// spaces, dropping empty pieces.
std::vector<std::string> Tokenize(std::string_view text);

// Token ids ranked by corpus frequency. Id 0 is padding and id 1 the
// unknown token, so the most frequent word gets id 2. Ties keep first
// occurrence order.
class Vocabulary {
 public:
  static constexpr int32_t kPadId = 0;
  static constexpr int32_t kUnknownId = 1;

  Vocabulary() = default;

  static Vocabulary Build(std::span<const std::string> texts);
  // Inverse of Serialize().
  static Vocabulary Parse(std::string_view text);

  // Unknown tokens map to kUnknownId.
  int32_t Id(std::string_view token) const;
  // Token for an id >= 2.
  const std::string &Token(int32_t id) const { return tokens_.at(id - 2); }
  int64_t Count(int32_t id) const { return counts_.at(id - 2); }
  bool Contains(std::string_view token) const;

  // Number of ids including padding and unknown.
  int64_t size() const { return static_cast<int64_t>(tokens_.size()) + 2; }
  // Number of real words.
  int64_t word_count() const { return static_cast<int64_t>(tokens_.size()); }

  // One "token<TAB>count" line per word, in id order.
  std::string Serialize() const;

 private:
  void Add(std::string token, int64_t count);

  std::vector<std::string> tokens_;
  std::vector<int64_t> counts_;
  std::unordered_map<std::string, int32_t> index_;
};

}  // namespace mtss

#endif  // MTSS_DATA_TOKENIZER_H_
