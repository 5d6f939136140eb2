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

// Corpus preparation: sampling, splitting, vocabulary and encoding, cached
// on disk.
//
// For each task the mode uses, the prepared directory holds
//   {task}.manifest.{train,dev,test}  record ids, one per line
//   {task}.vocab.tsv                  token<TAB>count in id order
//   {task}.sentences.txt              sentence text in record order
//   {task}.labels.txt                 label per record
//   {task}.cache                      encoded ids, masks, labels and splits
//
// The cache carries a key hash of its inputs (corpus bytes and every
// setting that changes the result) and a content hash of its payload.

#ifndef MTSS_CLI_PREPARE_H_
#define MTSS_CLI_PREPARE_H_

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mtss/cli/experiment.h"
#include "mtss/data/dataset.h"
#include "mtss/data/splits.h"
#include "mtss/data/tokenizer.h"

namespace mtss {

inline constexpr char kCacheMagic[4] = {'M', 'T', 'S', 'C'};
inline constexpr uint32_t kCacheVersion = 1;

struct PreparedTask {
  Task task = Task::kPolarity;
  Vocabulary vocab;
  Splits splits;
  EncodedDataset encoded;  // token ids; labels are in encoded.labels
  bool from_cache = false;
};

struct PreparedData {
  std::string dir;
  std::array<std::optional<PreparedTask>, 2> tasks;  // indexed by TaskIndex

  const PreparedTask &task(Task t) const;
};

// out_dir/prepared.
std::string PreparedDir(const ExperimentConfig &config);

// Loads valid caches and rebuilds the rest from the corpus files. A cache
// whose payload does not match its content hash is reported on `log` and
// regenerated. Throws IoError naming a missing corpus file.
PreparedData Prepare(const ExperimentConfig &config, std::ostream &log);

}  // namespace mtss

#endif  // MTSS_CLI_PREPARE_H_
