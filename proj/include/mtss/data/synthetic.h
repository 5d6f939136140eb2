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

// Generated data: separable marker-token tasks for convergence checks, and
// a surrogate sentence corpus in the on-disk layout of the real corpora.

#ifndef MTSS_DATA_SYNTHETIC_H_
#define MTSS_DATA_SYNTHETIC_H_

#include <cstdint>
#include <string>

#include "mtss/data/corpus.h"
#include "mtss/data/dataset.h"

namespace mtss {

struct MarkerTaskSpec {
  int64_t sentences = 2000;
  int64_t vocab = 50;  // including the padding and unknown ids
  int64_t max_len = 10;
  int64_t min_len = 3;
  uint64_t seed = 1;
};

// Token-id dataset whose label is 1 exactly when the task's marker token
// occurs in the sentence. The two tasks use different markers. Labels are
// balanced and interleaved.
EncodedDataset MarkerTaskDataset(Task task, const MarkerTaskSpec &spec);

// Marker token id of a task.
int32_t MarkerToken(Task task);

struct SurrogateSpec {
  int64_t pol_per_class = 5331;   // lines in each polarity file
  int64_t subj_per_class = 5000;  // lines in each subjectivity file
  int64_t vocab = 12000;
  int64_t glove_dim = 50;
  double glove_coverage = 0.92;   // fraction of words present in the vector file
  double label_noise = 0.06;      // sentences written for the opposite class
  uint64_t seed = 2024;
};

// Writes rt-polarity.pos, rt-polarity.neg, quote.tok.gt9.5000,
// plot.tok.gt9.5000 and glove.<dim>d.txt into `dir`. Sentences are
// lowercase word sequences with punctuation, drawn from a Zipfian lexicon
// in which a minority of words carry polarity or subjectivity cues; the
// vector file encodes those cues along fixed directions plus noise. A few
// lines are written in Latin-1. Returns the corpus paths.
CorpusPaths WriteSurrogateCorpus(const std::string &dir, const SurrogateSpec &spec);

std::string SurrogateGlovePath(const std::string &dir, int64_t dim);

}  // namespace mtss

#endif  // MTSS_DATA_SYNTHETIC_H_
