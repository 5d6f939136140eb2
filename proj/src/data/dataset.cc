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

#include "mtss/data/dataset.h"

#include <algorithm>

#include "mtss/errors.h"

namespace mtss {

EncodedSentence EncodePad(std::span<const std::string> tokens, const Vocabulary &vocab,
                          int64_t max_len) {
  if (max_len < 1) throw ConfigError("max_len must be at least 1");
  EncodedSentence out;
  out.ids.assign(max_len, Vocabulary::kPadId);
  out.mask.assign(max_len, 0);
  const int64_t kept = std::min<int64_t>(max_len, static_cast<int64_t>(tokens.size()));
  for (int64_t t = 0; t < kept; ++t) {
    out.ids[t] = vocab.Id(tokens[t]);
    out.mask[t] = 1;
  }
  if (kept == 0) {
    out.ids[0] = Vocabulary::kUnknownId;
    out.mask[0] = 1;
  }
  return out;
}

EncodedDataset EncodeRecords(std::span<const SentenceRecord> records, const Vocabulary &vocab,
                             int64_t max_len) {
  EncodedDataset data;
  data.max_len = max_len;
  if (!records.empty()) data.task = records.front().task;
  data.ids.reserve(records.size() * max_len);
  data.mask.reserve(records.size() * max_len);
  for (const SentenceRecord &record : records) {
    const auto tokens = Tokenize(record.text);
    EncodedSentence encoded = EncodePad(tokens, vocab, max_len);
    data.ids.insert(data.ids.end(), encoded.ids.begin(), encoded.ids.end());
    data.mask.insert(data.mask.end(), encoded.mask.begin(), encoded.mask.end());
    data.labels.push_back(record.label);
  }
  return data;
}

std::vector<double> EncodedBatch::OneHot(int64_t classes) const {
  std::vector<double> out(batch_size * classes, 0.0);
  for (int64_t b = 0; b < batch_size; ++b) out[b * classes + labels[b]] = 1.0;
  return out;
}

EncodedBatch MakeBatch(const EncodedDataset &data, std::span<const int64_t> rows) {
  EncodedBatch batch;
  batch.task = data.task;
  batch.batch_size = static_cast<int64_t>(rows.size());
  batch.max_len = data.max_len;
  batch.emb_dim = data.emb_dim;
  const int64_t len = data.max_len;
  for (int64_t row : rows) {
    if (row < 0 || row >= data.size()) {
      throw UsageError("batch row " + std::to_string(row) + " outside dataset of " +
                       std::to_string(data.size()));
    }
    batch.mask.insert(batch.mask.end(), data.mask.begin() + row * len,
                      data.mask.begin() + (row + 1) * len);
    batch.labels.push_back(data.labels[row]);
    if (data.has_embeddings()) {
      const int64_t width = len * data.emb_dim;
      batch.embeddings.insert(batch.embeddings.end(), data.embeddings.begin() + row * width,
                              data.embeddings.begin() + (row + 1) * width);
    } else {
      batch.ids.insert(batch.ids.end(), data.ids.begin() + row * len,
                       data.ids.begin() + (row + 1) * len);
    }
  }
  return batch;
}

}  // namespace mtss
