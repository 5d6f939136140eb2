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

#ifndef MTSS_MODEL_CONFIG_H_
#define MTSS_MODEL_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "mtss/data/corpus.h"

namespace mtss {

enum class TrainMode { kSinglePol, kSingleSubj, kMtl };
enum class EmbeddingMode { kGlove, kBertFile };
enum class Activation { kTanh, kRelu, kLinear };

std::string_view ModeName(TrainMode mode);
TrainMode ParseMode(std::string_view name);
std::string_view EmbeddingName(EmbeddingMode mode);
EmbeddingMode ParseEmbedding(std::string_view name);
std::string_view ActivationName(Activation activation);
Activation ParseActivation(std::string_view name);

bool ModeUsesTask(TrainMode mode, Task task);

// Dimensions and rates of the network.
struct ModelConfig {
  int64_t pol_max_len = 40;    // L for polarity
  int64_t subj_max_len = 85;   // L for subjectivity
  int64_t emb_dim = 300;       // per-token input width
  int64_t hidden = 128;        // LSTM units per direction
  int64_t tdfc_dim = 100;      // time-distributed dense width
  int64_t attn_fc_dim = 64;    // dense after attention; NTN input width
  int64_t out_dim = 64;        // task representation fed to the head
  int64_t ntn_dim = 32;        // NTN slices
  int64_t classes = 2;
  double dropout = 0.3;
  double loss_weight_subj = 1.0;
  double loss_weight_pol = 1.0;
  bool attention_mask = true;
  Activation activation = Activation::kTanh;
  // Force the NTN output to zeros (heads still take the concatenation).
  bool ablate_ntn = false;

  int64_t max_len(Task task) const {
    return task == Task::kPolarity ? pol_max_len : subj_max_len;
  }
  // Throws ConfigError on non-positive dimensions or bad rates.
  void Validate() const;
};

}  // namespace mtss

#endif  // MTSS_MODEL_CONFIG_H_
