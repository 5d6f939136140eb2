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

#include "mtss/model/config.h"

#include "mtss/errors.h"

namespace mtss {

std::string_view ModeName(TrainMode mode) {
  switch (mode) {
    case TrainMode::kSinglePol: return "single-pol";
    case TrainMode::kSingleSubj: return "single-subj";
    case TrainMode::kMtl: return "mtl";
  }
  return "?";
}

TrainMode ParseMode(std::string_view name) {
  if (name == "single-pol") return TrainMode::kSinglePol;
  if (name == "single-subj") return TrainMode::kSingleSubj;
  if (name == "mtl") return TrainMode::kMtl;
  throw ConfigError("unknown mode '" + std::string(name) + "' (single-pol|single-subj|mtl)");
}

std::string_view EmbeddingName(EmbeddingMode mode) {
  return mode == EmbeddingMode::kGlove ? "glove" : "bert-file";
}

EmbeddingMode ParseEmbedding(std::string_view name) {
  if (name == "glove") return EmbeddingMode::kGlove;
  if (name == "bert-file") return EmbeddingMode::kBertFile;
  throw ConfigError("unknown embedding '" + std::string(name) + "' (glove|bert-file)");
}

std::string_view ActivationName(Activation activation) {
  switch (activation) {
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kLinear: return "linear";
  }
  return "?";
}

Activation ParseActivation(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "linear") return Activation::kLinear;
  throw ConfigError("unknown activation '" + std::string(name) + "' (tanh|relu|linear)");
}

bool ModeUsesTask(TrainMode mode, Task task) {
  switch (mode) {
    case TrainMode::kSinglePol: return task == Task::kPolarity;
    case TrainMode::kSingleSubj: return task == Task::kSubjectivity;
    case TrainMode::kMtl: return true;
  }
  return false;
}

void ModelConfig::Validate() const {
  auto positive = [](int64_t value, const char *name) {
    if (value < 1) throw ConfigError(std::string(name) + " must be at least 1");
  };
  positive(pol_max_len, "pol_max_len");
  positive(subj_max_len, "subj_max_len");
  positive(emb_dim, "emb_dim");
  positive(hidden, "hidden");
  positive(tdfc_dim, "tdfc_dim");
  positive(attn_fc_dim, "attn_fc_dim");
  positive(out_dim, "out_dim");
  positive(ntn_dim, "ntn_dim");
  if (classes != 2) throw ConfigError("classes must be 2 (binary labels)");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
  if (loss_weight_subj < 0.0 || loss_weight_pol < 0.0 ||
      loss_weight_subj + loss_weight_pol <= 0.0) {
    throw ConfigError("loss weights must be nonnegative and not both zero");
  }
}

}  // namespace mtss
