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

#include "mtss/cli/prepare.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mtss/binary_io.h"
#include "mtss/data/corpus.h"
#include "mtss/errors.h"

namespace mtss {
namespace fs = std::filesystem;
namespace {

std::string ReadBytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read corpus file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteText(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

template <typename V>
void HashValue(uint64_t &hash, V value) {
  hash = Fnv1a(&value, sizeof value, hash);
}

void HashString(uint64_t &hash, const std::string &s) {
  HashValue<uint64_t>(hash, s.size());
  hash = Fnv1a(s.data(), s.size(), hash);
}

// Everything the prepared artifacts of `task` depend on.
uint64_t CacheKey(const ExperimentConfig &config, Task task, const std::string &first_file,
                  const std::string &second_file) {
  uint64_t hash = Fnv1a(kCacheMagic, 4);
  HashValue<uint32_t>(hash, kCacheVersion);
  HashValue<uint32_t>(hash, static_cast<uint32_t>(TaskIndex(task)));
  HashString(hash, first_file);
  HashString(hash, second_file);
  HashValue<uint64_t>(hash, config.plan.seed);
  HashValue<int64_t>(hash, task == Task::kPolarity ? config.pol_per_class : config.subj_per_class);
  HashValue<int64_t>(hash, config.model.max_len(task));
  HashValue<double>(hash, config.split.train);
  HashValue<double>(hash, config.split.dev);
  HashValue<double>(hash, config.split.test);
  HashValue<uint8_t>(hash, config.split.stratified ? 1 : 0);
  return hash;
}

template <typename V>
void WriteArray(std::ostream &out, const std::vector<V> &values) {
  WriteLE<uint64_t>(out, values.size());
  out.write(reinterpret_cast<const char *>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(V)));
}

template <typename V>
std::vector<V> ReadArray(std::istream &in) {
  uint64_t count = 0;
  if (!ReadLE(in, &count) || count > (uint64_t{1} << 34)) throw FormatError("bad array length");
  std::vector<V> values(count);
  if (!in.read(reinterpret_cast<char *>(values.data()),
               static_cast<std::streamsize>(count * sizeof(V)))) {
    throw FormatError("truncated array");
  }
  return values;
}

std::string EncodePayload(const PreparedTask &p) {
  std::ostringstream out;
  const std::string vocab = p.vocab.Serialize();
  WriteLE<uint64_t>(out, vocab.size());
  out << vocab;
  WriteLE<int64_t>(out, p.encoded.max_len);
  WriteArray(out, p.encoded.ids);
  WriteArray(out, p.encoded.mask);
  WriteArray(out, p.encoded.labels);
  WriteArray(out, p.splits.train);
  WriteArray(out, p.splits.dev);
  WriteArray(out, p.splits.test);
  return out.str();
}

PreparedTask DecodePayload(const std::string &payload, Task task) {
  std::istringstream in(payload);
  PreparedTask p;
  p.task = task;
  uint64_t vocab_size = 0;
  if (!ReadLE(in, &vocab_size) || vocab_size > payload.size()) throw FormatError("bad vocabulary");
  std::string vocab(vocab_size, '\0');
  in.read(vocab.data(), static_cast<std::streamsize>(vocab_size));
  p.vocab = Vocabulary::Parse(vocab);
  p.encoded.task = task;
  if (!ReadLE(in, &p.encoded.max_len)) throw FormatError("truncated header");
  p.encoded.ids = ReadArray<int32_t>(in);
  p.encoded.mask = ReadArray<uint8_t>(in);
  p.encoded.labels = ReadArray<int32_t>(in);
  p.splits.train = ReadArray<int64_t>(in);
  p.splits.dev = ReadArray<int64_t>(in);
  p.splits.test = ReadArray<int64_t>(in);
  return p;
}

void WriteCache(const fs::path &path, uint64_t key, const PreparedTask &p) {
  const std::string payload = EncodePayload(p);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write cache " + path.string());
  out.write(kCacheMagic, 4);
  WriteLE<uint32_t>(out, kCacheVersion);
  WriteLE<uint64_t>(out, key);
  WriteLE<uint64_t>(out, Fnv1a(payload.data(), payload.size()));
  WriteLE<uint64_t>(out, payload.size());
  out << payload;
}

enum class CacheStatus { kValid, kMissing, kStale, kCorrupt };

CacheStatus ReadCache(const fs::path &path, uint64_t key, Task task, PreparedTask *out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return CacheStatus::kMissing;
  char magic[4];
  uint32_t version = 0;
  uint64_t stored_key = 0, content_hash = 0, size = 0;
  if (!in.read(magic, 4) || std::string_view(magic, 4) != std::string_view(kCacheMagic, 4) ||
      !ReadLE(in, &version) || !ReadLE(in, &stored_key) || !ReadLE(in, &content_hash) ||
      !ReadLE(in, &size)) {
    return CacheStatus::kCorrupt;
  }
  if (version != kCacheVersion || stored_key != key) return CacheStatus::kStale;
  std::ostringstream rest;
  rest << in.rdbuf();
  const std::string payload = rest.str();
  if (payload.size() != size || Fnv1a(payload.data(), payload.size()) != content_hash) {
    return CacheStatus::kCorrupt;
  }
  try {
    *out = DecodePayload(payload, task);
  } catch (const Error &) {
    return CacheStatus::kCorrupt;
  }
  return CacheStatus::kValid;
}

std::string JoinLines(const std::vector<int64_t> &values) {
  std::string out;
  for (int64_t v : values) out += std::to_string(v) + "\n";
  return out;
}

void WriteArtifacts(const fs::path &dir, const PreparedTask &p,
                    const std::vector<SentenceRecord> &records) {
  const std::string name(TaskName(p.task));
  WriteText(dir / (name + ".manifest.train"), JoinLines(p.splits.train));
  WriteText(dir / (name + ".manifest.dev"), JoinLines(p.splits.dev));
  WriteText(dir / (name + ".manifest.test"), JoinLines(p.splits.test));
  WriteText(dir / (name + ".vocab.tsv"), p.vocab.Serialize());
  std::string sentences, labels;
  for (const SentenceRecord &r : records) {
    sentences += r.text + "\n";
    labels += std::to_string(r.label) + "\n";
  }
  WriteText(dir / (name + ".sentences.txt"), sentences);
  WriteText(dir / (name + ".labels.txt"), labels);
}

PreparedTask Build(const ExperimentConfig &config, Task task,
                   const std::vector<SentenceRecord> &records) {
  PreparedTask p;
  p.task = task;
  std::vector<std::string> texts;
  for (const SentenceRecord &r : records) texts.push_back(r.text);
  p.vocab = Vocabulary::Build(texts);
  p.encoded = EncodeRecords(records, p.vocab, config.model.max_len(task));
  p.encoded.task = task;
  SplitSpec spec = config.split;
  spec.seed = config.plan.seed;
  p.splits = SplitDataset(p.encoded.labels, spec);
  return p;
}

}  // namespace

const PreparedTask &PreparedData::task(Task t) const {
  if (!tasks[TaskIndex(t)]) {
    throw UsageError("task " + std::string(TaskName(t)) + " was not prepared");
  }
  return *tasks[TaskIndex(t)];
}

std::string PreparedDir(const ExperimentConfig &config) {
  return (fs::path(config.out_dir) / "prepared").string();
}

PreparedData Prepare(const ExperimentConfig &config, std::ostream &log) {
  const CorpusPaths paths = config.ResolvedCorpusPaths();
  PreparedData data;
  data.dir = PreparedDir(config);
  fs::create_directories(data.dir);

  std::array<uint64_t, 2> keys{};
  bool need_corpus = false;
  for (Task task : kAllTasks) {
    if (!ModeUsesTask(config.plan.mode, task)) continue;
    const bool pol = task == Task::kPolarity;
    const std::string first = ReadBytes(pol ? paths.pol_pos : paths.subj);
    const std::string second = ReadBytes(pol ? paths.pol_neg : paths.obj);
    keys[TaskIndex(task)] = CacheKey(config, task, first, second);
    const fs::path cache = fs::path(data.dir) / (std::string(TaskName(task)) + ".cache");
    PreparedTask loaded;
    switch (ReadCache(cache, keys[TaskIndex(task)], task, &loaded)) {
      case CacheStatus::kValid:
        loaded.from_cache = true;
        data.tasks[TaskIndex(task)] = std::move(loaded);
        continue;
      case CacheStatus::kCorrupt:
        log << "warning: " << cache.string()
            << " failed its content hash check; regenerating\n";
        break;
      case CacheStatus::kStale:
        log << "note: inputs of " << cache.string() << " changed; regenerating\n";
        break;
      case CacheStatus::kMissing:
        break;
    }
    need_corpus = true;
  }
  if (!need_corpus) return data;

  const Corpus corpus =
      LoadCorpus(paths, config.plan.seed, config.pol_per_class, config.subj_per_class);
  if (corpus.transcoded_lines > 0) {
    log << "note: " << corpus.transcoded_lines << " corpus lines were read as Latin-1\n";
  }
  for (Task task : kAllTasks) {
    const size_t k = TaskIndex(task);
    if (!ModeUsesTask(config.plan.mode, task) || data.tasks[k]) continue;
    PreparedTask p = Build(config, task, corpus.records(task));
    WriteArtifacts(data.dir, p, corpus.records(task));
    WriteCache(fs::path(data.dir) / (std::string(TaskName(task)) + ".cache"), keys[k], p);
    data.tasks[k] = std::move(p);
  }
  return data;
}

}  // namespace mtss
