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

#include "mtss/model/model.h"

#include <cmath>
#include <string>

#include "mtss/binary_io.h"
#include "mtss/errors.h"
#include "mtss/random.h"

namespace mtss {
namespace {

std::string Prefix(Task task) { return std::string(TaskName(task)) + "."; }

bool EndsWith(const std::string &s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

template <typename T>
EncoderParams<T> EncoderParams<T>::Create(ParameterSet<T> &params, const ModelConfig &config,
                                          Task task, int64_t vocab_size) {
  const std::string prefix = Prefix(task);
  const int64_t steps = config.max_len(task);
  EncoderParams p;
  if (vocab_size > 0) {
    p.embedding = params.Add(prefix + "embedding", Tensor<T>::Zeros({vocab_size, config.emb_dim}));
  }
  p.lstm_fwd = LstmParams<T>::Create(params, prefix + "lstm_fwd", config.emb_dim, config.hidden);
  p.lstm_bwd = LstmParams<T>::Create(params, prefix + "lstm_bwd", config.emb_dim, config.hidden);
  p.tdfc_weights = params.Add(prefix + "tdfc.W", Tensor<T>::Zeros({2 * config.hidden, config.tdfc_dim}));
  p.tdfc_bias = params.Add(prefix + "tdfc.b", Tensor<T>::Zeros({config.tdfc_dim}));
  p.attention_weights = params.Add(prefix + "attention.W_att", Tensor<T>::Zeros({config.tdfc_dim, 1}));
  p.position_weights = params.Add(prefix + "attention.W_alpha", Tensor<T>::Zeros({steps, steps}));
  p.fc_weights = params.Add(prefix + "fc.W", Tensor<T>::Zeros({config.tdfc_dim, config.attn_fc_dim}));
  p.fc_bias = params.Add(prefix + "fc.b", Tensor<T>::Zeros({config.attn_fc_dim}));
  p.out_weights = params.Add(prefix + "out.W", Tensor<T>::Zeros({config.attn_fc_dim, config.out_dim}));
  p.out_bias = params.Add(prefix + "out.b", Tensor<T>::Zeros({config.out_dim}));
  return p;
}

template <typename T>
EncoderOutput<T> TaskEncode(Tape<T> &tape, const EncodedBatch &batch, const EncoderParams<T> &p,
                            const ModelConfig &config, RunMode mode, std::mt19937_64 &rng) {
  const int64_t b = batch.batch_size, steps = batch.max_len;
  if (steps != p.position_weights.dim(0)) {
    throw DimensionError("encoder for " + std::string(TaskName(batch.task)) + " expects L=" +
                         std::to_string(p.position_weights.dim(0)) + ", batch has L=" +
                         std::to_string(steps));
  }
  // Batch-major [B x L] to time-major rows t * B + b.
  Tensor<T> embedded;
  if (p.embedding.defined()) {
    if (batch.has_embeddings()) {
      throw UsageError("encoder has an embedding table but the batch carries embeddings");
    }
    std::vector<int32_t> ids(b * steps);
    for (int64_t s = 0; s < b; ++s) {
      for (int64_t t = 0; t < steps; ++t) ids[t * b + s] = batch.ids[s * steps + t];
    }
    embedded = GatherRows<T>(tape, p.embedding, ids);
  } else {
    if (!batch.has_embeddings()) {
      throw UsageError("encoder expects precomputed embeddings but the batch carries token ids");
    }
    const int64_t dim = batch.emb_dim;
    std::vector<T> values(b * steps * dim);
    for (int64_t s = 0; s < b; ++s) {
      for (int64_t t = 0; t < steps; ++t) {
        const float *src = &batch.embeddings[(s * steps + t) * dim];
        T *dst = &values[(t * b + s) * dim];
        for (int64_t d = 0; d < dim; ++d) dst[d] = static_cast<T>(src[d]);
      }
    }
    embedded = Tensor<T>::FromData({steps * b, dim}, std::move(values));
  }

  Tensor<T> states = BiLstmForward(tape, embedded, b, p.lstm_fwd, p.lstm_bwd);
  Tensor<T> features =
      TimeDistributedDense(tape, states, p.tdfc_weights, p.tdfc_bias, config.activation);
  features = Dropout(tape, features, config.dropout, mode, rng);
  AttentionOutput<T> attended = SelfAttention(tape, features, batch.mask, b, p.attention_weights,
                                              p.position_weights, config.attention_mask);
  Tensor<T> dense = Dense(tape, attended.pooled, p.fc_weights, p.fc_bias, config.activation);
  Tensor<T> fn = Dropout(tape, dense, config.dropout, mode, rng);
  Tensor<T> x = Dense(tape, fn, p.out_weights, p.out_bias, config.activation);
  return {fn, x, attended.weights};
}

template <typename T>
NtnParams<T> NtnParams<T>::Create(ParameterSet<T> &params, const ModelConfig &config) {
  const int64_t n = config.attn_fc_dim, k = config.ntn_dim;
  NtnParams p;
  p.tensor = params.Add("ntn.T", Tensor<T>::Zeros({k, n, n}));
  p.weights = params.Add("ntn.W", Tensor<T>::Zeros({2 * n, k}));
  p.bias = params.Add("ntn.b", Tensor<T>::Zeros({k}));
  return p;
}

template <typename T>
Tensor<T> NtnFuse(Tape<T> &tape, const Tensor<T> &first, const Tensor<T> &second,
                  const NtnParams<T> &p) {
  Tensor<T> bilinear = Bilinear(tape, first, p.tensor, second);
  Tensor<T> linear = MatMul(tape, Concat(tape, first, second, 1), p.weights);
  return Tanh(tape, AddRowBias(tape, Add(tape, bilinear, linear), p.bias));
}

template <typename T>
HeadParams<T> HeadParams<T>::Create(ParameterSet<T> &params, Task task, int64_t input_dim,
                                    int64_t classes) {
  HeadParams p;
  p.weights = params.Add(Prefix(task) + "head.W", Tensor<T>::Zeros({input_dim, classes}));
  p.bias = params.Add(Prefix(task) + "head.b", Tensor<T>::Zeros({classes}));
  return p;
}

template <typename T>
Tensor<T> ClassifyHead(Tape<T> &tape, const Tensor<T> &x, const Tensor<T> &fused,
                       const HeadParams<T> &p) {
  Tensor<T> input = fused.defined() ? Concat(tape, x, fused, 1) : x;
  return SoftmaxRows(tape, Dense(tape, input, p.weights, p.bias, Activation::kLinear));
}

template <typename T>
std::vector<int32_t> PredictClasses(const Tensor<T> &probs) {
  const int64_t rows = probs.dim(0), cols = probs.dim(1);
  std::vector<int32_t> out(rows);
  for (int64_t r = 0; r < rows; ++r) {
    int64_t best = 0;
    for (int64_t c = 1; c < cols; ++c) {
      if (probs.at(r, c) > probs.at(r, best)) best = c;
    }
    out[r] = static_cast<int32_t>(best);
  }
  return out;
}

template <typename T>
Tensor<T> JointLoss(Tape<T> &tape, const Tensor<T> &subj_loss, const Tensor<T> &pol_loss,
                    double subj_weight, double pol_weight) {
  return Add(tape, Scale(tape, subj_loss, static_cast<T>(subj_weight)),
             Scale(tape, pol_loss, static_cast<T>(pol_weight)));
}

template <typename T>
MtssModel<T>::MtssModel(const ModelConfig &config, TrainMode mode, EmbeddingMode embedding,
                        std::array<int64_t, 2> vocab_sizes)
    : config_(config), mode_(mode), embedding_(embedding), vocab_sizes_{0, 0} {
  config_.Validate();
  for (Task task : kAllTasks) {
    if (!uses(task)) continue;
    int64_t vocab = 0;
    if (embedding_ == EmbeddingMode::kGlove) {
      vocab = vocab_sizes[TaskIndex(task)];
      if (vocab < 2) {
        throw ConfigError(std::string(TaskName(task)) + " vocabulary size must be at least 2");
      }
    }
    vocab_sizes_[TaskIndex(task)] = vocab;
    encoders_[TaskIndex(task)] = EncoderParams<T>::Create(params_, config_, task, vocab);
  }
  const bool fused = mode_ == TrainMode::kMtl;
  if (fused) ntn_ = NtnParams<T>::Create(params_, config_);
  for (Task task : kAllTasks) {
    if (!uses(task)) continue;
    const int64_t input_dim = config_.out_dim + (fused ? config_.ntn_dim : 0);
    heads_[TaskIndex(task)] = HeadParams<T>::Create(params_, task, input_dim, config_.classes);
  }
}

template <typename T>
void MtssModel<T>::Initialize(uint64_t seed) {
  for (auto &entry : params_.entries()) {
    const std::string &name = entry.name;
    Tensor<T> &t = entry.tensor;
    std::mt19937_64 rng = MakeRng(seed, kStreamInit, Fnv1a(name.data(), name.size()));
    std::fill(t.data().begin(), t.data().end(), T(0));
    if (EndsWith(name, ".embedding")) {
      std::uniform_real_distribution<double> dist(-0.05, 0.05);
      for (int64_t i = t.dim(1); i < t.size(); ++i) t[i] = static_cast<T>(dist(rng));
    } else if (t.rank() >= 2) {
      const int64_t fan_in = t.dim(t.rank() - 2), fan_out = t.dim(t.rank() - 1);
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      std::uniform_real_distribution<double> dist(-limit, limit);
      for (T &v : t.data()) v = static_cast<T>(dist(rng));
    } else if (name.find(".lstm_") != std::string::npos && EndsWith(name, ".b")) {
      const int64_t hidden = t.size() / 4;
      for (int64_t i = hidden; i < 2 * hidden; ++i) t[i] = T(1);
    }
  }
}

template <typename T>
void MtssModel<T>::SetEmbeddingTable(Task task, std::span<const float> values) {
  const Tensor<T> &table = encoders_[TaskIndex(task)].embedding;
  if (!table.defined()) {
    throw UsageError("no embedding table for " + std::string(TaskName(task)));
  }
  if (static_cast<int64_t>(values.size()) != table.size()) {
    throw DimensionError("embedding table for " + std::string(TaskName(task)) + " has " +
                         std::to_string(values.size()) + " values, expected " +
                         ShapeString(table.shape()));
  }
  Tensor<T> target = table;
  for (int64_t i = 0; i < target.size(); ++i) target[i] = static_cast<T>(values[i]);
}

template <typename T>
ModelOutput<T> MtssModel<T>::Forward(Tape<T> &tape, const TaskBatches &batches, RunMode mode,
                                     std::array<std::mt19937_64 *, 2> dropout_rngs) const {
  std::array<EncoderOutput<T>, 2> encoded;
  for (Task task : kAllTasks) {
    if (!uses(task)) continue;
    const size_t i = TaskIndex(task);
    if (batches[i] == nullptr) {
      throw UsageError(std::string(ModeName(mode_)) + " forward needs a " +
                       std::string(TaskName(task)) + " batch");
    }
    if (batches[i]->task != task) throw UsageError("batch task does not match its slot");
    encoded[i] = TaskEncode(tape, *batches[i], encoders_[i], config_, mode, *dropout_rngs[i]);
  }

  ModelOutput<T> out;
  const size_t pol = TaskIndex(Task::kPolarity), subj = TaskIndex(Task::kSubjectivity);
  if (mode_ == TrainMode::kMtl) {
    if (batches[pol]->batch_size != batches[subj]->batch_size) {
      throw DimensionError("paired batches differ in size: " +
                           std::to_string(batches[pol]->batch_size) + " vs " +
                           std::to_string(batches[subj]->batch_size));
    }
    out.fused = config_.ablate_ntn
                    ? Tensor<T>::Zeros({batches[pol]->batch_size, config_.ntn_dim})
                    : NtnFuse(tape, encoded[subj].fn, encoded[pol].fn, ntn_);
  }
  for (Task task : kAllTasks) {
    if (!uses(task)) continue;
    const size_t i = TaskIndex(task);
    std::vector<double> onehot = batches[i]->OneHot(config_.classes);
    Tensor<T> targets = Tensor<T>::FromData({batches[i]->batch_size, config_.classes},
                                            std::vector<T>(onehot.begin(), onehot.end()));
    out.probs[i] = ClassifyHead(tape, encoded[i].x, out.fused, heads_[i]);
    out.losses[i] = CrossEntropy(tape, out.probs[i], targets);
    out.attention[i] = encoded[i].attention;
  }
  switch (mode_) {
    case TrainMode::kSinglePol: out.loss = out.losses[pol]; break;
    case TrainMode::kSingleSubj: out.loss = out.losses[subj]; break;
    case TrainMode::kMtl:
      out.loss = JointLoss(tape, out.losses[subj], out.losses[pol], config_.loss_weight_subj,
                           config_.loss_weight_pol);
      break;
  }
  return out;
}

#define MTSS_INSTANTIATE_MODEL(T)                                                              \
  template struct EncoderParams<T>;                                                            \
  template EncoderOutput<T> TaskEncode(Tape<T> &, const EncodedBatch &,                        \
                                       const EncoderParams<T> &, const ModelConfig &, RunMode, \
                                       std::mt19937_64 &);                                     \
  template struct NtnParams<T>;                                                                \
  template Tensor<T> NtnFuse(Tape<T> &, const Tensor<T> &, const Tensor<T> &,                  \
                             const NtnParams<T> &);                                            \
  template struct HeadParams<T>;                                                               \
  template Tensor<T> ClassifyHead(Tape<T> &, const Tensor<T> &, const Tensor<T> &,             \
                                  const HeadParams<T> &);                                      \
  template std::vector<int32_t> PredictClasses(const Tensor<T> &);                             \
  template Tensor<T> JointLoss(Tape<T> &, const Tensor<T> &, const Tensor<T> &, double,        \
                               double);                                                        \
  template class MtssModel<T>;

MTSS_INSTANTIATE_MODEL(float)
MTSS_INSTANTIATE_MODEL(double)

#undef MTSS_INSTANTIATE_MODEL

}  // namespace mtss
