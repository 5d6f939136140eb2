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

#ifndef MTSS_DATA_CORPUS_H_
#define MTSS_DATA_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mtss {

enum class Task { kPolarity, kSubjectivity };

inline constexpr Task kAllTasks[] = {Task::kPolarity, Task::kSubjectivity};

// Position of a task in per-task arrays: polarity 0, subjectivity 1.
inline constexpr size_t TaskIndex(Task task) { return task == Task::kPolarity ? 0 : 1; }

// "pol" / "subj".
std::string_view TaskName(Task task);
Task ParseTask(std::string_view name);

// One labelled sentence. Polarity: 0 negative, 1 positive. Subjectivity:
// 0 objective, 1 subjective.
struct SentenceRecord {
  int64_t id = 0;  // position within its task's corpus
  std::string text;  // UTF-8
  int32_t label = 0;
  Task task = Task::kPolarity;
};

struct CorpusPaths {
  std::string pol_pos;   // rt-polarity.pos
  std::string pol_neg;   // rt-polarity.neg
  std::string subj;      // quote.tok.gt9.5000
  std::string obj;       // plot.tok.gt9.5000
};

struct Corpus {
  std::vector<SentenceRecord> pol;
  std::vector<SentenceRecord> subj;
  // Lines that were not valid UTF-8 and were transcoded from Latin-1.
  int64_t transcoded_lines = 0;

  const std::vector<SentenceRecord> &records(Task task) const {
    return task == Task::kPolarity ? pol : subj;
  }
};

// Reads one sentence per line. Lines that are valid UTF-8 are kept;
// anything else is transcoded from Latin-1 and counted. Blank lines are
// skipped. Throws IoError if the file cannot be opened.
std::vector<std::string> ReadSentenceLines(const std::string &path,
                                           int64_t *transcoded = nullptr);

bool IsValidUtf8(std::string_view bytes);
std::string Latin1ToUtf8(std::string_view bytes);

// Loads both tasks. Polarity keeps pol_per_class sentences per class chosen
// uniformly by seed (all of them if the file is shorter), in file order;
// subjectivity does the same with subj_per_class, or keeps every line when
// it is negative. Records are positives/subjectives first.
Corpus LoadCorpus(const CorpusPaths &paths, uint64_t seed,
                  int64_t pol_per_class = 5000, int64_t subj_per_class = -1);

}  // namespace mtss

#endif  // MTSS_DATA_CORPUS_H_
