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

#ifndef MTSS_DATA_EMBEDDING_FILE_H_
#define MTSS_DATA_EMBEDDING_FILE_H_

#include <cstdint>
#include <fstream>
#include <string>
#include <span>
#include <vector>

#include "mtss/data/corpus.h"
#include "mtss/data/dataset.h"

namespace mtss {

// Precomputed per-token sentence embeddings ("MTSS" files).
//
// Little-endian layout:
//   "MTSS" | u32 version=1 | u32 N | u32 L | u32 D
//   N x ( L*D f32 values, time-major | L u8 mask )
// The file size must equal 20 + N * (4*L*D + L).
inline constexpr char kEmbeddingMagic[4] = {'M', 'T', 'S', 'S'};
inline constexpr uint32_t kEmbeddingVersion = 1;
inline constexpr int64_t kEmbeddingHeaderBytes = 20;

struct EmbeddingFileHeader {
  uint32_t count = 0;
  uint32_t max_len = 0;
  uint32_t dim = 0;

  int64_t RecordBytes() const { return 4LL * max_len * dim + max_len; }
  int64_t FileBytes() const { return kEmbeddingHeaderBytes + count * RecordBytes(); }
};

struct EmbeddingRecord {
  std::vector<float> values;  // [L x D]
  std::vector<uint8_t> mask;  // [L]
};

// Sequential reader. The constructor validates magic, version and total
// length, so a truncated file fails before any record is yielded.
class EmbeddingFileReader {
 public:
  explicit EmbeddingFileReader(const std::string &path);

  const EmbeddingFileHeader &header() const { return header_; }
  // Reads the next record; false once all N records were read.
  bool Next(EmbeddingRecord *record);

 private:
  std::string path_;
  std::ifstream in_;
  EmbeddingFileHeader header_;
  uint32_t read_ = 0;
};

// Loads a whole file as one task's dataset; record i pairs with labels[i].
// Records whose mask has no 1s get position 0 marked attendable, matching
// the empty-sentence rule of EncodePad. Throws FormatError if the record
// count differs from labels.size() or a mask is not a prefix of 1s.
EncodedDataset ReadEmbeddingDataset(const std::string &path, Task task,
                                    std::span<const int32_t> labels);

void WriteEmbeddingFile(const std::string &path, const EmbeddingFileHeader &header,
                        const std::vector<EmbeddingRecord> &records);

}  // namespace mtss

#endif  // MTSS_DATA_EMBEDDING_FILE_H_
