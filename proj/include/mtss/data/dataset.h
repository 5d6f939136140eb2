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

#ifndef MTSS_DATA_DATASET_H_
#define MTSS_DATA_DATASET_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mtss/data/corpus.h"
#include "mtss/data/tokenizer.h"

namespace mtss {

inline constexpr int64_t kNumClasses = 2;

// Token ids of one sentence, truncated to the first max_len tokens and
// post-padded with id 0. A sentence with no tokens encodes as a single
// unknown token so that attention always has a position to attend to.
struct EncodedSentence {
  std::vector<int32_t> ids;
  std::vector<uint8_t> mask;  // 1 for real tokens, 0 for padding
};

EncodedSentence EncodePad(std::span<const std::string> tokens,
                          const Vocabulary &vocab, int64_t max_len);

// One task's sentences ready for batching. Either token ids (trainable
// embedding mode) or precomputed per-token embeddings are populated.
struct EncodedDataset {
  Task task = Task::kPolarity;
  int64_t max_len = 0;
  int64_t emb_dim = 0;                 // 0 in token-id mode
  std::vector<int32_t> ids;            // [N x L]
  std::vector<float> embeddings;       // [N x L x D]
  std::vector<uint8_t> mask;           // [N x L]
  std::vector<int32_t> labels;         // [N]

  int64_t size() const { return static_cast<int64_t>(labels.size()); }
  bool has_embeddings() const { return emb_dim > 0; }
};

// Tokenizes and encodes every record of one task.
EncodedDataset EncodeRecords(std::span<const SentenceRecord> records,
                             const Vocabulary &vocab, int64_t max_len);

// A batch of sentences from one task.
struct EncodedBatch {
  Task task = Task::kPolarity;
  int64_t batch_size = 0;
  int64_t max_len = 0;
  int64_t emb_dim = 0;
  std::vector<int32_t> ids;        // [B x L], token-id mode
  std::vector<float> embeddings;   // [B x L x D], embedding mode
  std::vector<uint8_t> mask;       // [B x L]
  std::vector<int32_t> labels;     // [B]

  bool has_embeddings() const { return emb_dim > 0; }
  // [B x C] one-hot rows.
  std::vector<double> OneHot(int64_t classes = kNumClasses) const;
};

// Gathers `rows` of the dataset, in order, into one batch.
EncodedBatch MakeBatch(const EncodedDataset &data, std::span<const int64_t> rows);

}  // namespace mtss

#endif  // MTSS_DATA_DATASET_H_
