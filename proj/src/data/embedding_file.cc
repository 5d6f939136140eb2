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

#include "mtss/data/embedding_file.h"

#include <cstring>
#include <filesystem>

#include "mtss/binary_io.h"
#include "mtss/errors.h"

namespace mtss {

EmbeddingFileReader::EmbeddingFileReader(const std::string &path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open embedding file " + path);
  char magic[4];
  if (!in_.read(magic, 4) || std::memcmp(magic, kEmbeddingMagic, 4) != 0) {
    throw FormatError(path + ": bad magic at byte offset 0 (expected \"MTSS\")");
  }
  uint32_t version = 0;
  if (!ReadLE(in_, &version) || version != kEmbeddingVersion) {
    throw FormatError(path + ": unsupported version " + std::to_string(version) +
                      " at byte offset 4");
  }
  if (!ReadLE(in_, &header_.count) || !ReadLE(in_, &header_.max_len) ||
      !ReadLE(in_, &header_.dim)) {
    throw FormatError(path + ": truncated header before byte offset " +
                      std::to_string(kEmbeddingHeaderBytes));
  }
  if (header_.count > 0 && (header_.max_len == 0 || header_.dim == 0)) {
    throw FormatError(path + ": zero L or D in header at byte offset 12");
  }
  const auto actual = static_cast<int64_t>(std::filesystem::file_size(path));
  if (actual != header_.FileBytes()) {
    const int64_t complete = (actual - kEmbeddingHeaderBytes) / std::max<int64_t>(header_.RecordBytes(), 1);
    throw FormatError(path + ": file is " + std::to_string(actual) + " bytes but header implies " +
                      std::to_string(header_.FileBytes()) + "; record " +
                      std::to_string(complete) + " at byte offset " +
                      std::to_string(kEmbeddingHeaderBytes + complete * header_.RecordBytes()) +
                      " is incomplete or extra bytes follow");
  }
}

bool EmbeddingFileReader::Next(EmbeddingRecord *record) {
  if (read_ >= header_.count) return false;
  const int64_t values = static_cast<int64_t>(header_.max_len) * header_.dim;
  record->values.resize(values);
  record->mask.resize(header_.max_len);
  const int64_t offset = kEmbeddingHeaderBytes + read_ * header_.RecordBytes();
  if (!in_.read(reinterpret_cast<char *>(record->values.data()), values * 4) ||
      !in_.read(reinterpret_cast<char *>(record->mask.data()), header_.max_len)) {
    throw FormatError(path_ + ": short read in record at byte offset " + std::to_string(offset));
  }
  ++read_;
  return true;
}

EncodedDataset ReadEmbeddingDataset(const std::string &path, Task task,
                                    std::span<const int32_t> labels) {
  EmbeddingFileReader reader(path);
  const EmbeddingFileHeader &header = reader.header();
  if (header.count != labels.size()) {
    throw FormatError(path + ": holds " + std::to_string(header.count) + " records but the " +
                      std::string(TaskName(task)) + " corpus has " +
                      std::to_string(labels.size()));
  }
  EncodedDataset data;
  data.task = task;
  data.max_len = header.max_len;
  data.emb_dim = header.dim;
  data.labels.assign(labels.begin(), labels.end());
  data.embeddings.reserve(static_cast<size_t>(header.count) * header.max_len * header.dim);
  data.mask.reserve(static_cast<size_t>(header.count) * header.max_len);
  EmbeddingRecord record;
  int64_t index = 0;
  while (reader.Next(&record)) {
    bool seen_pad = false;
    for (uint8_t m : record.mask) {
      if (m > 1 || (m == 1 && seen_pad)) {
        throw FormatError(path + ": record " + std::to_string(index) +
                          " mask is not a prefix of ones");
      }
      seen_pad = seen_pad || m == 0;
    }
    if (record.mask[0] == 0) record.mask[0] = 1;
    data.embeddings.insert(data.embeddings.end(), record.values.begin(), record.values.end());
    data.mask.insert(data.mask.end(), record.mask.begin(), record.mask.end());
    ++index;
  }
  return data;
}

void WriteEmbeddingFile(const std::string &path, const EmbeddingFileHeader &header,
                        const std::vector<EmbeddingRecord> &records) {
  if (records.size() != header.count) {
    throw UsageError("embedding header count does not match record count");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write embedding file " + path);
  out.write(kEmbeddingMagic, 4);
  WriteLE(out, kEmbeddingVersion);
  WriteLE(out, header.count);
  WriteLE(out, header.max_len);
  WriteLE(out, header.dim);
  const size_t values = static_cast<size_t>(header.max_len) * header.dim;
  for (const EmbeddingRecord &record : records) {
    if (record.values.size() != values || record.mask.size() != header.max_len) {
      throw UsageError("embedding record shape does not match header");
    }
    out.write(reinterpret_cast<const char *>(record.values.data()), values * 4);
    out.write(reinterpret_cast<const char *>(record.mask.data()), header.max_len);
  }
  if (!out) throw IoError("write failed for embedding file " + path);
}

}  // namespace mtss
