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

// Binary checkpoints.
//
// Little-endian layout:
//   "MTSK" | u32 version | u32 tensor count
//   per tensor: u16 name length | name | u8 rank | u32 dims[rank] |
//               u8 dtype (0 f32, 1 f64) | values in that dtype
//   u32 config length | config text (SerializeConfig)
//   sections: 4-byte tag | u64 length | payload
//
// Sections:
//   META  i64 epoch | per task: u8 present | f64 loss | f64 accuracy
//   ADAM  i64 step | per tensor: m then v, in the tensor's dtype (optional)
//   "END "  empty, last in the file
// META is required. Readers skip sections with other tags and report a
// warning. The END marker makes truncation at a section boundary
// detectable.

#ifndef MTSS_CLI_CHECKPOINT_H_
#define MTSS_CLI_CHECKPOINT_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mtss/model/model.h"
#include "mtss/train/optimizer.h"
#include "mtss/train/trainer.h"

namespace mtss {

inline constexpr char kCheckpointMagic[4] = {'M', 'T', 'S', 'K'};
inline constexpr uint32_t kCheckpointVersion = 1;

enum class DType : uint8_t { kF32 = 0, kF64 = 1 };

template <typename T>
constexpr DType DTypeOf() {
  return sizeof(T) == 4 ? DType::kF32 : DType::kF64;
}

// Values are held as doubles; f32 tensors round-trip exactly.
struct CheckpointTensor {
  std::string name;
  Shape shape;
  DType dtype = DType::kF32;
  std::vector<double> values;
};

struct CheckpointOptimizer {
  int64_t step = 0;
  std::vector<std::vector<double>> m;  // one per tensor
  std::vector<std::vector<double>> v;
};

struct Checkpoint {
  uint32_t version = kCheckpointVersion;
  std::vector<CheckpointTensor> tensors;
  std::string config_text;
  int64_t epoch = 0;
  EvalResult dev;  // loss and accuracy only
  bool has_optimizer = false;
  CheckpointOptimizer optimizer;
};

std::string EncodeCheckpoint(const Checkpoint &checkpoint);
// Throws FormatError on a bad magic, an unsupported version or truncation,
// naming the byte offset. Skipped sections are appended to `warnings`.
Checkpoint DecodeCheckpoint(std::string_view bytes, std::vector<std::string> *warnings = nullptr);

void SaveCheckpoint(const std::string &path, const Checkpoint &checkpoint);
Checkpoint LoadCheckpoint(const std::string &path, std::vector<std::string> *warnings = nullptr);

// Copies the model's parameters (and, when given, the optimizer state).
template <typename T>
Checkpoint CaptureCheckpoint(const MtssModel<T> &model, const std::string &config_text,
                             int64_t epoch, const EvalResult &dev,
                             const Adam<T> *optimizer = nullptr);

// Writes the checkpoint's tensors into the model. The name sets must agree
// exactly: an unknown name is a FormatError, and a missing tensor or a shape
// difference is a DimensionError naming the first offending tensor.
template <typename T>
void RestoreParameters(MtssModel<T> &model, const Checkpoint &checkpoint);

// Loads the optimizer state. Returns false when the checkpoint has none.
template <typename T>
bool RestoreOptimizer(Adam<T> &optimizer, const Checkpoint &checkpoint);

}  // namespace mtss

#endif  // MTSS_CLI_CHECKPOINT_H_
