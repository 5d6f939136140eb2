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

#include "mtss/data/tokenizer.h"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "mtss/errors.h"

namespace mtss {

std::vector<std::string> Tokenize(std::string_view text) {
  std::string lowered(text);
  for (size_t i = 0; i < lowered.size(); ++i) {
    auto &c = reinterpret_cast<unsigned char &>(lowered[i]);
    if (c >= 'A' && c <= 'Z') {
      c += 'a' - 'A';
    } else if (c == 0xC3 && i + 1 < lowered.size()) {
      // Latin-1 supplement capitals U+00C0..U+00DE, except U+00D7 (x sign).
      auto &next = reinterpret_cast<unsigned char &>(lowered[i + 1]);
      if (next >= 0x80 && next <= 0x9E && next != 0x97) next += 0x20;
      ++i;
    } else if (kTokenFilters.find(static_cast<char>(c)) != std::string_view::npos) {
      c = ' ';
    }
  }
  std::vector<std::string> tokens;
  size_t start = 0;
  while (start < lowered.size()) {
    size_t end = lowered.find(' ', start);
    if (end == std::string::npos) end = lowered.size();
    if (end > start) tokens.emplace_back(lowered.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

Vocabulary Vocabulary::Build(std::span<const std::string> texts) {
  struct Entry {
    std::string token;
    int64_t count = 0;
  };
  std::vector<Entry> entries;
  std::unordered_map<std::string, size_t> seen;
  for (const std::string &text : texts) {
    for (std::string &token : Tokenize(text)) {
      auto [it, inserted] = seen.try_emplace(token, entries.size());
      if (inserted) entries.push_back({std::move(token), 0});
      ++entries[it->second].count;
    }
  }
  // Stable: equal counts keep first-occurrence order.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry &a, const Entry &b) { return a.count > b.count; });
  Vocabulary vocab;
  for (Entry &entry : entries) vocab.Add(std::move(entry.token), entry.count);
  return vocab;
}

Vocabulary Vocabulary::Parse(std::string_view text) {
  Vocabulary vocab;
  size_t start = 0;
  int64_t line_no = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (line.empty()) continue;
    const size_t tab = line.rfind('\t');
    int64_t count = 0;
    if (tab == std::string_view::npos ||
        std::from_chars(line.data() + tab + 1, line.data() + line.size(), count).ec !=
            std::errc()) {
      throw FormatError("vocabulary line " + std::to_string(line_no) +
                        ": expected token<TAB>count");
    }
    vocab.Add(std::string(line.substr(0, tab)), count);
  }
  return vocab;
}

int32_t Vocabulary::Id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnknownId : it->second;
}

bool Vocabulary::Contains(std::string_view token) const {
  return index_.count(std::string(token)) > 0;
}

std::string Vocabulary::Serialize() const {
  std::ostringstream out;
  for (size_t i = 0; i < tokens_.size(); ++i) out << tokens_[i] << '\t' << counts_[i] << '\n';
  return out.str();
}

void Vocabulary::Add(std::string token, int64_t count) {
  const auto id = static_cast<int32_t>(tokens_.size() + 2);
  index_.emplace(token, id);
  tokens_.push_back(std::move(token));
  counts_.push_back(count);
}

}  // namespace mtss
