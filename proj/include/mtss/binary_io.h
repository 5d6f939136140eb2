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

#ifndef MTSS_BINARY_IO_H_
#define MTSS_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace mtss {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian and are read by memcpy");

template <typename V>
void WriteLE(std::ostream &out, V value) {
  out.write(reinterpret_cast<const char *>(&value), sizeof(V));
}

template <typename V>
bool ReadLE(std::istream &in, V *value) {
  return static_cast<bool>(in.read(reinterpret_cast<char *>(value), sizeof(V)));
}

// 64-bit FNV-1a, used as a content hash for caches.
inline uint64_t Fnv1a(const void *data, size_t size, uint64_t hash = 0xcbf29ce484222325ull) {
  const auto *bytes = static_cast<const unsigned char *>(data);
  for (size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ull;
  }
  return hash;
}

}  // namespace mtss

#endif  // MTSS_BINARY_IO_H_
