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

// Encoder building blocks: peephole LSTM, BiLSTM, time-distributed dense,
// dropout, self-attention pooling and dense layers.
//
// Sequences are time-major: a [L x B] batch of D-wide vectors is stored as a
// [(L * B) x D] tensor whose row t * B + b is step t of sentence b.

#ifndef MTSS_MODEL_LAYERS_H_
#define MTSS_MODEL_LAYERS_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>

#include "mtss/model/config.h"
#include "mtss/model/parameters.h"
#include "mtss/tensor/ops.h"

namespace mtss {

enum class RunMode { kTrain, kEval };

// One LSTM direction. Gate blocks are stored side by side in the order
// input, forget, cell, output: input_weights = [W_xi | W_xf | W_xc | W_xo]
// and likewise for recurrent_weights and bias. Peepholes are diagonal.
template <typename T>
struct LstmParams {
  Tensor<T> input_weights;      // [D_in x 4H]
  Tensor<T> recurrent_weights;  // [H x 4H]
  Tensor<T> peep_input;         // [H]  W_ci
  Tensor<T> peep_forget;        // [H]  W_cf
  Tensor<T> peep_output;        // [H]  W_co
  Tensor<T> bias;               // [4H]

  int64_t hidden() const { return recurrent_weights.dim(0); }
  // Zero-initialized tensors registered under prefix + ".W_x" etc.
  static LstmParams Create(ParameterSet<T> &params, const std::string &prefix,
                           int64_t input_dim, int64_t hidden);
};

template <typename T>
struct LstmState {
  Tensor<T> h;  // [B x H]
  Tensor<T> c;  // [B x H]
};

// One step from precomputed input projections x_t * W_x + b ([B x 4H]):
//   i = sigmoid(x W_xi + h W_hi + c_prev . W_ci + b_i)
//   f = sigmoid(x W_xf + h W_hf + c_prev . W_cf + b_f)
//   c = f . c_prev + i . tanh(x W_xc + h W_hc + b_c)
//   o = sigmoid(x W_xo + h W_ho + c . W_co + b_o)
//   h = o . tanh(c)
template <typename T>
LstmState<T> LstmStepProjected(Tape<T> &tape, const Tensor<T> &projected,
                               const LstmState<T> &prev, const LstmParams<T> &p);

// Same step from raw inputs x_t [B x D_in].
template <typename T>
LstmState<T> LstmCellStep(Tape<T> &tape, const Tensor<T> &x, const LstmState<T> &prev,
                          const LstmParams<T> &p);

// Runs one direction over all steps from zero state. Returns the hidden
// state of every step in input order, [(L * B) x H]. reverse=true consumes
// the sequence from the last step to the first.
template <typename T>
Tensor<T> LstmSequence(Tape<T> &tape, const Tensor<T> &inputs, int64_t batch,
                       const LstmParams<T> &p, bool reverse);

// Row t * B + b holds [forward h at t | backward h at t], [(L * B) x 2H].
// Padded steps are computed like any other.
template <typename T>
Tensor<T> BiLstmForward(Tape<T> &tape, const Tensor<T> &inputs, int64_t batch,
                        const LstmParams<T> &forward, const LstmParams<T> &backward);

template <typename T>
Tensor<T> Activate(Tape<T> &tape, const Tensor<T> &x, Activation activation);

// activation(x W + b), applied row by row.
template <typename T>
Tensor<T> Dense(Tape<T> &tape, const Tensor<T> &x, const Tensor<T> &weights,
                const Tensor<T> &bias, Activation activation);

// The same dense map applied at every time step of a time-major sequence.
template <typename T>
Tensor<T> TimeDistributedDense(Tape<T> &tape, const Tensor<T> &seq, const Tensor<T> &weights,
                               const Tensor<T> &bias, Activation activation) {
  return Dense(tape, seq, weights, bias, activation);
}

// Inverted dropout. Train mode zeroes each element with probability `rate`
// and scales survivors by 1 / (1 - rate); eval mode is the identity. Throws
// ConfigError unless 0 <= rate < 1.
template <typename T>
Tensor<T> Dropout(Tape<T> &tape, const Tensor<T> &x, double rate, RunMode mode,
                  std::mt19937_64 &rng);

template <typename T>
struct AttentionOutput {
  Tensor<T> pooled;   // [B x D_f]
  Tensor<T> weights;  // [B x L], rows sum to 1
};

// P = tanh(F W_att), logits = P^T W_alpha per sentence, alpha = softmax,
// pooled = sum_t alpha_t F_t. With use_mask, P is zeroed at padded positions
// before the W_alpha product and padded logits are set to -1e9, so the
// pooled vector does not depend on anything at a padded position. Throws
// UsageError if a sentence has no unmasked position.
template <typename T>
AttentionOutput<T> SelfAttention(Tape<T> &tape, const Tensor<T> &seq,
                                 std::span<const uint8_t> mask, int64_t batch,
                                 const Tensor<T> &attention_weights,
                                 const Tensor<T> &position_weights, bool use_mask);

inline constexpr double kMaskedLogit = -1e9;

}  // namespace mtss

#endif  // MTSS_MODEL_LAYERS_H_
