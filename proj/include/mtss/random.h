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

#ifndef MTSS_RANDOM_H_
#define MTSS_RANDOM_H_

#include <cstdint>
#include <random>

namespace mtss {

// Independent generator for one consumer of an experiment seed. Streams
// keep e.g. the polarity shuffle unaffected by how many draws the
// subjectivity pipeline makes.
inline std::mt19937_64 MakeRng(uint64_t seed, uint64_t stream) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// Sub-stream of a stream, e.g. one per parameter tensor.
inline std::mt19937_64 MakeRng(uint64_t seed, uint64_t stream, uint64_t substream) {
  std::seed_seq seq{static_cast<uint32_t>(seed),      static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(stream),    static_cast<uint32_t>(stream >> 32),
                    static_cast<uint32_t>(substream), static_cast<uint32_t>(substream >> 32)};
  return std::mt19937_64(seq);
}

// Stream ids used across the library.
enum RngStream : uint64_t {
  kStreamPolSample = 1,
  kStreamSubjSample = 2,
  kStreamSplit = 10,
  kStreamGlove = 20,
  kStreamInit = 30,
  kStreamBatches = 40,
  kStreamDropout = 50,
};

}  // namespace mtss

#endif  // MTSS_RANDOM_H_
