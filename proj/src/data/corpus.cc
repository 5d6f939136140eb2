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

#include "mtss/data/corpus.h"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "mtss/errors.h"
#include "mtss/random.h"

namespace mtss {

std::string_view TaskName(Task task) {
  return task == Task::kPolarity ? "pol" : "subj";
}

Task ParseTask(std::string_view name) {
  if (name == "pol") return Task::kPolarity;
  if (name == "subj") return Task::kSubjectivity;
  throw ConfigError("unknown task '" + std::string(name) + "' (expected pol or subj)");
}

bool IsValidUtf8(std::string_view bytes) {
  size_t i = 0;
  while (i < bytes.size()) {
    const auto lead = static_cast<unsigned char>(bytes[i]);
    int extra;
    uint32_t min;
    if (lead < 0x80) {
      ++i;
      continue;
    } else if ((lead & 0xE0) == 0xC0) {
      extra = 1, min = 0x80;
    } else if ((lead & 0xF0) == 0xE0) {
      extra = 2, min = 0x800;
    } else if ((lead & 0xF8) == 0xF0) {
      extra = 3, min = 0x10000;
    } else {
      return false;
    }
    if (i + extra >= bytes.size()) return false;
    uint32_t code = lead & (0x3F >> extra);
    for (int k = 1; k <= extra; ++k) {
      const auto next = static_cast<unsigned char>(bytes[i + k]);
      if ((next & 0xC0) != 0x80) return false;
      code = (code << 6) | (next & 0x3F);
    }
    if (code < min || code > 0x10FFFF || (code >= 0xD800 && code <= 0xDFFF)) return false;
    i += extra + 1;
  }
  return true;
}

std::string Latin1ToUtf8(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size() + bytes.size() / 8);
  for (char c : bytes) {
    const auto b = static_cast<unsigned char>(c);
    if (b < 0x80) {
      out.push_back(c);
    } else {
      out.push_back(static_cast<char>(0xC0 | (b >> 6)));
      out.push_back(static_cast<char>(0x80 | (b & 0x3F)));
    }
  }
  return out;
}

std::vector<std::string> ReadSentenceLines(const std::string &path, int64_t *transcoded) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    if (!IsValidUtf8(line)) {
      line = Latin1ToUtf8(line);
      if (transcoded != nullptr) ++*transcoded;
    }
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw IoError("read error in corpus file " + path);
  return lines;
}

namespace {

// Indices of `count` lines chosen uniformly, returned in file order.
std::vector<size_t> SampleInOrder(size_t total, int64_t count, std::mt19937_64 &rng) {
  std::vector<size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  if (count < 0 || static_cast<size_t>(count) >= total) return order;
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

void Append(std::vector<SentenceRecord> &records, std::vector<std::string> &lines,
            const std::vector<size_t> &keep, int32_t label, Task task) {
  for (size_t index : keep) {
    SentenceRecord record;
    record.id = static_cast<int64_t>(records.size());
    record.text = std::move(lines[index]);
    record.label = label;
    record.task = task;
    records.push_back(std::move(record));
  }
}

}  // namespace

Corpus LoadCorpus(const CorpusPaths &paths, uint64_t seed, int64_t pol_per_class,
                  int64_t subj_per_class) {
  Corpus corpus;
  auto pos = ReadSentenceLines(paths.pol_pos, &corpus.transcoded_lines);
  auto neg = ReadSentenceLines(paths.pol_neg, &corpus.transcoded_lines);
  auto subj = ReadSentenceLines(paths.subj, &corpus.transcoded_lines);
  auto obj = ReadSentenceLines(paths.obj, &corpus.transcoded_lines);

  std::mt19937_64 rng = MakeRng(seed, kStreamPolSample);
  const auto keep_pos = SampleInOrder(pos.size(), pol_per_class, rng);
  const auto keep_neg = SampleInOrder(neg.size(), pol_per_class, rng);
  Append(corpus.pol, pos, keep_pos, 1, Task::kPolarity);
  Append(corpus.pol, neg, keep_neg, 0, Task::kPolarity);

  std::vector<size_t> keep_subj(subj.size()), keep_obj(obj.size());
  std::iota(keep_subj.begin(), keep_subj.end(), 0);
  std::iota(keep_obj.begin(), keep_obj.end(), 0);
  if (subj_per_class >= 0) {
    std::mt19937_64 subj_rng = MakeRng(seed, kStreamSubjSample);
    keep_subj = SampleInOrder(subj.size(), subj_per_class, subj_rng);
    keep_obj = SampleInOrder(obj.size(), subj_per_class, subj_rng);
  }
  Append(corpus.subj, subj, keep_subj, 1, Task::kSubjectivity);
  Append(corpus.subj, obj, keep_obj, 0, Task::kSubjectivity);
  return corpus;
}

}  // namespace mtss
