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

// The two-task network: one encoder per task, NTN fusion of the two
// sentence representations, and a softmax head per task.

#ifndef MTSS_MODEL_MODEL_H_
#define MTSS_MODEL_MODEL_H_

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mtss/data/dataset.h"
#include "mtss/model/config.h"
#include "mtss/model/layers.h"
#include "mtss/model/parameters.h"

namespace mtss {

template <typename T>
struct EncoderParams {
  Tensor<T> embedding;  // [V x D_emb]; undefined when inputs are precomputed
  LstmParams<T> lstm_fwd;
  LstmParams<T> lstm_bwd;
  Tensor<T> tdfc_weights;       // [2H x D_f]
  Tensor<T> tdfc_bias;          // [D_f]
  Tensor<T> attention_weights;  // [D_f x 1]
  Tensor<T> position_weights;   // [L x L]
  Tensor<T> fc_weights;         // [D_f x D_a]
  Tensor<T> fc_bias;            // [D_a]
  Tensor<T> out_weights;        // [D_a x D_t]
  Tensor<T> out_bias;           // [D_t]

  // Registers every tensor under "<task>.". vocab_size 0 means precomputed
  // embeddings (no table).
  static EncoderParams Create(ParameterSet<T> &params, const ModelConfig &config, Task task,
                              int64_t vocab_size);
};

template <typename T>
struct EncoderOutput {
  Tensor<T> fn;         // [B x D_a], input to the NTN
  Tensor<T> x;          // [B x D_t], task representation
  Tensor<T> attention;  // [B x L]
};

// embed -> BiLSTM -> time-distributed dense -> dropout -> self-attention ->
// dense -> dropout -> flatten (a no-op on the pooled vector) -> dense.
template <typename T>
EncoderOutput<T> TaskEncode(Tape<T> &tape, const EncodedBatch &batch, const EncoderParams<T> &p,
                            const ModelConfig &config, RunMode mode, std::mt19937_64 &rng);

template <typename T>
struct NtnParams {
  Tensor<T> tensor;   // [K x D_a x D_a]
  Tensor<T> weights;  // [2 D_a x K]
  Tensor<T> bias;     // [K]

  static NtnParams Create(ParameterSet<T> &params, const ModelConfig &config);
};

// out[:, k] = tanh(first^T T[k] second + [first | second] W[:, k] + b[k]).
template <typename T>
Tensor<T> NtnFuse(Tape<T> &tape, const Tensor<T> &first, const Tensor<T> &second,
                  const NtnParams<T> &p);

template <typename T>
struct HeadParams {
  Tensor<T> weights;  // [(D_t + D_ntn) x C], or [D_t x C] without fusion
  Tensor<T> bias;     // [C]

  static HeadParams Create(ParameterSet<T> &params, Task task, int64_t input_dim,
                           int64_t classes);
};

// softmax([x | fused] W + b). `fused` may be undefined (single-task mode).
template <typename T>
Tensor<T> ClassifyHead(Tape<T> &tape, const Tensor<T> &x, const Tensor<T> &fused,
                       const HeadParams<T> &p);

// Row-wise argmax; ties go to the lower class index.
template <typename T>
std::vector<int32_t> PredictClasses(const Tensor<T> &probs);

// w_subj J_subj + w_pol J_pol.
template <typename T>
Tensor<T> JointLoss(Tape<T> &tape, const Tensor<T> &subj_loss, const Tensor<T> &pol_loss,
                    double subj_weight, double pol_weight);

// One batch per task; the entry of an unused task is null.
using TaskBatches = std::array<const EncodedBatch *, 2>;

template <typename T>
struct ModelOutput {
  std::array<Tensor<T>, 2> probs;      // [B x C] per task, indexed by TaskIndex
  std::array<Tensor<T>, 2> losses;     // rank-0 cross-entropy per task
  std::array<Tensor<T>, 2> attention;  // [B x L] per task
  Tensor<T> fused;                     // [B x D_ntn], MTL only
  Tensor<T> loss;                      // training objective
};

template <typename T>
class MtssModel {
 public:
  // vocab_sizes (by TaskIndex) size the embedding tables in GloVe mode and
  // are ignored for precomputed embeddings. Throws ConfigError on an
  // invalid configuration.
  MtssModel(const ModelConfig &config, TrainMode mode, EmbeddingMode embedding,
            std::array<int64_t, 2> vocab_sizes);

  MtssModel(const MtssModel &) = delete;
  MtssModel &operator=(const MtssModel &) = delete;

  const ModelConfig &config() const { return config_; }
  TrainMode mode() const { return mode_; }
  EmbeddingMode embedding() const { return embedding_; }
  bool uses(Task task) const { return ModeUsesTask(mode_, task); }
  int64_t vocab_size(Task task) const { return vocab_sizes_[TaskIndex(task)]; }

  ParameterSet<T> &parameters() { return params_; }
  const ParameterSet<T> &parameters() const { return params_; }
  const EncoderParams<T> &encoder(Task task) const { return encoders_[TaskIndex(task)]; }
  const HeadParams<T> &head(Task task) const { return heads_[TaskIndex(task)]; }
  const NtnParams<T> &ntn() const { return ntn_; }
  // Trainable element count. GloVe mode includes the embedding tables.
  int64_t CountParameters() const { return params_.ElementCount(); }

  // Glorot-uniform weight matrices, zero biases and peepholes, LSTM forget
  // bias 1, embedding rows uniform(-0.05, 0.05) with a zero padding row.
  // Each tensor draws from its own stream keyed by its name, so a tensor
  // starts from the same values in every mode.
  void Initialize(uint64_t seed);

  // Copies a [V x D_emb] table into the task's embedding parameter.
  void SetEmbeddingTable(Task task, std::span<const float> values);

  // Runs the active encoders, the NTN (MTL) and the heads. In MTL mode both
  // batches must be present with equal batch size; row b of one is fused
  // with row b of the other. dropout_rngs are indexed by TaskIndex.
  ModelOutput<T> Forward(Tape<T> &tape, const TaskBatches &batches, RunMode mode,
                         std::array<std::mt19937_64 *, 2> dropout_rngs) const;

 private:
  ModelConfig config_;
  TrainMode mode_;
  EmbeddingMode embedding_;
  std::array<int64_t, 2> vocab_sizes_;
  ParameterSet<T> params_;
  std::array<EncoderParams<T>, 2> encoders_;
  std::array<HeadParams<T>, 2> heads_;
  NtnParams<T> ntn_;
};

extern template class MtssModel<float>;
extern template class MtssModel<double>;

}  // namespace mtss

#endif  // MTSS_MODEL_MODEL_H_
