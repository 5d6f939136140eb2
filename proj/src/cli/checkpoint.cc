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

#include "mtss/cli/checkpoint.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "mtss/binary_io.h"
#include "mtss/errors.h"

namespace mtss {
namespace {

constexpr char kMetaTag[4] = {'M', 'E', 'T', 'A'};
constexpr char kAdamTag[4] = {'A', 'D', 'A', 'M'};
constexpr char kEndTag[4] = {'E', 'N', 'D', ' '};

void WriteValues(std::ostream &out, const std::vector<double> &values, DType dtype) {
  for (double v : values) {
    if (dtype == DType::kF32) {
      WriteLE(out, static_cast<float>(v));
    } else {
      WriteLE(out, v);
    }
  }
}

class Cursor {
 public:
  explicit Cursor(std::string_view bytes) : bytes_(bytes) {}

  size_t offset() const { return offset_; }
  bool done() const { return offset_ == bytes_.size(); }

  template <typename V>
  V Read(const char *what) {
    V value;
    std::memcpy(&value, Take(sizeof(V), what).data(), sizeof(V));
    return value;
  }

  std::string_view Take(size_t size, const char *what) {
    if (bytes_.size() - offset_ < size) {
      throw FormatError("checkpoint truncated at offset " + std::to_string(offset_) +
                        " while reading " + what);
    }
    std::string_view out = bytes_.substr(offset_, size);
    offset_ += size;
    return out;
  }

  std::vector<double> Values(int64_t count, DType dtype, const char *what) {
    std::vector<double> out(count);
    for (double &v : out) {
      v = dtype == DType::kF32 ? static_cast<double>(Read<float>(what)) : Read<double>(what);
    }
    return out;
  }

 private:
  std::string_view bytes_;
  size_t offset_ = 0;
};

void WriteSection(std::ostream &out, const char tag[4], const std::string &payload) {
  out.write(tag, 4);
  WriteLE<uint64_t>(out, payload.size());
  out << payload;
}

}  // namespace

std::string EncodeCheckpoint(const Checkpoint &checkpoint) {
  std::ostringstream out;
  out.write(kCheckpointMagic, 4);
  WriteLE<uint32_t>(out, checkpoint.version);
  WriteLE<uint32_t>(out, static_cast<uint32_t>(checkpoint.tensors.size()));
  for (const CheckpointTensor &t : checkpoint.tensors) {
    if (static_cast<int64_t>(t.values.size()) != NumElements(t.shape)) {
      throw UsageError("checkpoint tensor '" + t.name + "' holds " +
                       std::to_string(t.values.size()) + " values for shape " +
                       ShapeString(t.shape));
    }
    WriteLE<uint16_t>(out, static_cast<uint16_t>(t.name.size()));
    out << t.name;
    WriteLE<uint8_t>(out, static_cast<uint8_t>(t.shape.size()));
    for (int64_t d : t.shape) WriteLE<uint32_t>(out, static_cast<uint32_t>(d));
    WriteLE<uint8_t>(out, static_cast<uint8_t>(t.dtype));
    WriteValues(out, t.values, t.dtype);
  }
  WriteLE<uint32_t>(out, static_cast<uint32_t>(checkpoint.config_text.size()));
  out << checkpoint.config_text;

  std::ostringstream meta;
  WriteLE<int64_t>(meta, checkpoint.epoch);
  for (size_t k = 0; k < 2; ++k) {
    WriteLE<uint8_t>(meta, checkpoint.dev.present[k] ? 1 : 0);
    WriteLE<double>(meta, checkpoint.dev.tasks[k].loss);
    WriteLE<double>(meta, checkpoint.dev.tasks[k].accuracy);
  }
  WriteSection(out, kMetaTag, meta.str());

  if (checkpoint.has_optimizer) {
    const CheckpointOptimizer &opt = checkpoint.optimizer;
    if (opt.m.size() != checkpoint.tensors.size() || opt.v.size() != checkpoint.tensors.size()) {
      throw UsageError("optimizer state does not cover every checkpoint tensor");
    }
    std::ostringstream adam;
    WriteLE<int64_t>(adam, opt.step);
    for (size_t i = 0; i < checkpoint.tensors.size(); ++i) {
      WriteValues(adam, opt.m[i], checkpoint.tensors[i].dtype);
      WriteValues(adam, opt.v[i], checkpoint.tensors[i].dtype);
    }
    WriteSection(out, kAdamTag, adam.str());
  }
  WriteSection(out, kEndTag, "");
  return out.str();
}

Checkpoint DecodeCheckpoint(std::string_view bytes, std::vector<std::string> *warnings) {
  Cursor in(bytes);
  Checkpoint ckpt;
  if (in.Take(4, "magic") != std::string_view(kCheckpointMagic, 4)) {
    throw FormatError("not a checkpoint: bad magic at offset 0");
  }
  ckpt.version = in.Read<uint32_t>("version");
  if (ckpt.version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(ckpt.version) +
                      " (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  const uint32_t count = in.Read<uint32_t>("tensor count");
  for (uint32_t i = 0; i < count; ++i) {
    CheckpointTensor t;
    const uint16_t name_length = in.Read<uint16_t>("tensor name length");
    t.name = std::string(in.Take(name_length, "tensor name"));
    const uint8_t rank = in.Read<uint8_t>("tensor rank");
    for (uint8_t d = 0; d < rank; ++d) t.shape.push_back(in.Read<uint32_t>("tensor dims"));
    const size_t dtype_offset = in.offset();
    const uint8_t dtype = in.Read<uint8_t>("tensor dtype");
    if (dtype > 1) {
      throw FormatError("tensor '" + t.name + "' has unknown dtype " + std::to_string(dtype) +
                        " at offset " + std::to_string(dtype_offset));
    }
    t.dtype = static_cast<DType>(dtype);
    t.values = in.Values(NumElements(t.shape), t.dtype, "tensor values");
    ckpt.tensors.push_back(std::move(t));
  }
  const uint32_t config_length = in.Read<uint32_t>("config length");
  ckpt.config_text = std::string(in.Take(config_length, "config text"));

  bool has_meta = false;
  while (true) {
    const size_t section_offset = in.offset();
    const std::string tag(in.Take(4, "section tag"));
    const uint64_t length = in.Read<uint64_t>("section length");
    const size_t payload_start = in.offset();
    if (tag == std::string_view(kEndTag, 4)) {
      if (length != 0 || !in.done()) {
        throw FormatError("unexpected bytes after the END section at offset " +
                          std::to_string(section_offset));
      }
      break;
    }
    if (tag == std::string_view(kMetaTag, 4)) {
      has_meta = true;
      ckpt.epoch = in.Read<int64_t>("epoch");
      for (size_t k = 0; k < 2; ++k) {
        ckpt.dev.present[k] = in.Read<uint8_t>("dev metrics") != 0;
        ckpt.dev.tasks[k].loss = in.Read<double>("dev metrics");
        ckpt.dev.tasks[k].accuracy = in.Read<double>("dev metrics");
      }
    } else if (tag == std::string_view(kAdamTag, 4)) {
      ckpt.has_optimizer = true;
      ckpt.optimizer.step = in.Read<int64_t>("optimizer step");
      for (const CheckpointTensor &t : ckpt.tensors) {
        const int64_t n = NumElements(t.shape);
        ckpt.optimizer.m.push_back(in.Values(n, t.dtype, "optimizer moments"));
        ckpt.optimizer.v.push_back(in.Values(n, t.dtype, "optimizer moments"));
      }
    } else {
      in.Take(length, "skipped section");
      if (warnings) {
        warnings->push_back("skipping unknown checkpoint section '" + tag + "' at offset " +
                            std::to_string(section_offset));
      }
      continue;
    }
    if (in.offset() - payload_start != length) {
      throw FormatError("checkpoint section '" + tag + "' at offset " +
                        std::to_string(section_offset) + " declares " + std::to_string(length) +
                        " bytes but holds " + std::to_string(in.offset() - payload_start));
    }
  }
  if (!has_meta) throw FormatError("checkpoint has no META section");
  return ckpt;
}

void SaveCheckpoint(const std::string &path, const Checkpoint &checkpoint) {
  const std::string bytes = EncodeCheckpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to checkpoint " + path);
}

Checkpoint LoadCheckpoint(const std::string &path, std::vector<std::string> *warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return DecodeCheckpoint(buffer.str(), warnings);
  } catch (const FormatError &e) {
    throw FormatError(path + ": " + e.what());
  }
}

template <typename T>
Checkpoint CaptureCheckpoint(const MtssModel<T> &model, const std::string &config_text,
                             int64_t epoch, const EvalResult &dev, const Adam<T> *optimizer) {
  Checkpoint ckpt;
  ckpt.config_text = config_text;
  ckpt.epoch = epoch;
  ckpt.dev = dev;
  for (const auto &entry : model.parameters().entries()) {
    const auto data = entry.tensor.data();
    ckpt.tensors.push_back(
        {entry.name, entry.tensor.shape(), DTypeOf<T>(), {data.begin(), data.end()}});
  }
  if (optimizer) {
    ckpt.has_optimizer = true;
    ckpt.optimizer.step = optimizer->step_count();
    for (const auto &m : optimizer->first_moment()) ckpt.optimizer.m.emplace_back(m.begin(), m.end());
    for (const auto &v : optimizer->second_moment()) ckpt.optimizer.v.emplace_back(v.begin(), v.end());
  }
  return ckpt;
}

template <typename T>
void RestoreParameters(MtssModel<T> &model, const Checkpoint &checkpoint) {
  auto &params = model.parameters();
  for (const CheckpointTensor &t : checkpoint.tensors) {
    if (!params.Contains(t.name)) {
      throw FormatError("checkpoint tensor '" + t.name + "' is not a parameter of a " +
                        std::string(ModeName(model.mode())) + " model");
    }
  }
  for (const auto &entry : params.entries()) {
    const CheckpointTensor *found = nullptr;
    for (const CheckpointTensor &t : checkpoint.tensors) {
      if (t.name == entry.name) found = &t;
    }
    if (!found) {
      throw DimensionError("checkpoint has no tensor '" + entry.name + "'");
    }
    if (found->shape != entry.tensor.shape()) {
      throw DimensionError("tensor '" + entry.name + "' is " + ShapeString(found->shape) +
                           " in the checkpoint but " + ShapeString(entry.tensor.shape()) +
                           " in the configured model");
    }
  }
  for (auto &entry : params.entries()) {
    for (const CheckpointTensor &t : checkpoint.tensors) {
      if (t.name != entry.name) continue;
      auto data = entry.tensor.data();
      for (size_t i = 0; i < data.size(); ++i) data[i] = static_cast<T>(t.values[i]);
    }
  }
}

template <typename T>
bool RestoreOptimizer(Adam<T> &optimizer, const Checkpoint &checkpoint) {
  if (!checkpoint.has_optimizer) return false;
  auto convert = [](const std::vector<std::vector<double>> &in) {
    std::vector<std::vector<T>> out;
    for (const auto &row : in) out.emplace_back(row.begin(), row.end());
    return out;
  };
  optimizer.SetState(checkpoint.optimizer.step, convert(checkpoint.optimizer.m),
                     convert(checkpoint.optimizer.v));
  return true;
}

#define MTSS_INSTANTIATE(T)                                                                 \
  template Checkpoint CaptureCheckpoint<T>(const MtssModel<T> &, const std::string &, int64_t, \
                                           const EvalResult &, const Adam<T> *);            \
  template void RestoreParameters<T>(MtssModel<T> &, const Checkpoint &);                   \
  template bool RestoreOptimizer<T>(Adam<T> &, const Checkpoint &);
MTSS_INSTANTIATE(float)
MTSS_INSTANTIATE(double)
#undef MTSS_INSTANTIATE

}  // namespace mtss
