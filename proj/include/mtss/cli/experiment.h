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

#ifndef MTSS_CLI_EXPERIMENT_H_
#define MTSS_CLI_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mtss/data/corpus.h"
#include "mtss/data/splits.h"
#include "mtss/model/config.h"
#include "mtss/train/trainer.h"

namespace mtss {

// Everything one command needs. Every field has a default and a key in the
// config file format.
struct ExperimentConfig {
  ModelConfig model;
  TrainPlan plan;
  EmbeddingMode embedding = EmbeddingMode::kGlove;
  bool f64 = false;

  // Corpus files. Empty paths resolve to the standard file names inside
  // data_dir.
  std::string data_dir = "data";
  std::string pol_pos;
  std::string pol_neg;
  std::string subj;
  std::string obj;
  int64_t pol_per_class = 5000;
  int64_t subj_per_class = -1;  // -1 keeps every line
  SplitSpec split;

  // Pretrained word vectors for glove mode; empty means random vectors.
  std::string glove_path;
  // Precomputed token embeddings for bert-file mode.
  std::string pol_embeddings;
  std::string subj_embeddings;

  std::string out_dir = "runs";

  CorpusPaths ResolvedCorpusPaths() const;
  // Throws ConfigError on inconsistent settings.
  void Validate() const;
};

// Flat "key = value" text with '#' comments. Serialize writes every key with
// a one-line description; Parse accepts any subset of keys and rejects
// unknown ones with the offending line number.
std::string SerializeConfig(const ExperimentConfig &config);
ExperimentConfig ParseConfig(std::string_view text, const ExperimentConfig &base = {});
ExperimentConfig LoadConfigFile(const std::string &path);

// Applies one "key=value" override.
void SetConfigValue(ExperimentConfig &config, std::string_view key, std::string_view value);
std::vector<std::string> ConfigKeys();

}  // namespace mtss

#endif  // MTSS_CLI_EXPERIMENT_H_
