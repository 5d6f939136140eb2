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

#include "mtss/model/layers.h"

#include <vector>

#include "mtss/errors.h"

namespace mtss {

template <typename T>
LstmParams<T> LstmParams<T>::Create(ParameterSet<T> &params, const std::string &prefix,
                                    int64_t input_dim, int64_t hidden) {
  LstmParams p;
  p.input_weights = params.Add(prefix + ".W_x", Tensor<T>::Zeros({input_dim, 4 * hidden}));
  p.recurrent_weights = params.Add(prefix + ".W_h", Tensor<T>::Zeros({hidden, 4 * hidden}));
  p.peep_input = params.Add(prefix + ".w_ci", Tensor<T>::Zeros({hidden}));
  p.peep_forget = params.Add(prefix + ".w_cf", Tensor<T>::Zeros({hidden}));
  p.peep_output = params.Add(prefix + ".w_co", Tensor<T>::Zeros({hidden}));
  p.bias = params.Add(prefix + ".b", Tensor<T>::Zeros({4 * hidden}));
  return p;
}

template <typename T>
LstmState<T> LstmStepProjected(Tape<T> &tape, const Tensor<T> &projected,
                               const LstmState<T> &prev, const LstmParams<T> &p) {
  const int64_t hidden = p.hidden();
  Tensor<T> gates = Add(tape, projected, MatMul(tape, prev.h, p.recurrent_weights));
  Tensor<T> zi = Slice(tape, gates, 1, 0, hidden);
  Tensor<T> zf = Slice(tape, gates, 1, hidden, hidden);
  Tensor<T> zc = Slice(tape, gates, 1, 2 * hidden, hidden);
  Tensor<T> zo = Slice(tape, gates, 1, 3 * hidden, hidden);

  Tensor<T> input_gate = Sigmoid(tape, Add(tape, zi, MulRow(tape, prev.c, p.peep_input)));
  Tensor<T> forget_gate = Sigmoid(tape, Add(tape, zf, MulRow(tape, prev.c, p.peep_forget)));
  Tensor<T> cell = Add(tape, Mul(tape, forget_gate, prev.c),
                       Mul(tape, input_gate, Tanh(tape, zc)));
  Tensor<T> output_gate = Sigmoid(tape, Add(tape, zo, MulRow(tape, cell, p.peep_output)));
  return {Mul(tape, output_gate, Tanh(tape, cell)), cell};
}

template <typename T>
LstmState<T> LstmCellStep(Tape<T> &tape, const Tensor<T> &x, const LstmState<T> &prev,
                          const LstmParams<T> &p) {
  Tensor<T> projected = AddRowBias(tape, MatMul(tape, x, p.input_weights), p.bias);
  return LstmStepProjected(tape, projected, prev, p);
}

template <typename T>
Tensor<T> LstmSequence(Tape<T> &tape, const Tensor<T> &inputs, int64_t batch,
                       const LstmParams<T> &p, bool reverse) {
  if (inputs.rank() != 2 || batch < 1 || inputs.dim(0) % batch != 0) {
    throw DimensionError("lstm: inputs " + ShapeString(inputs.shape()) +
                         " are not a time-major batch of " + std::to_string(batch));
  }
  const int64_t steps = inputs.dim(0) / batch;
  const int64_t hidden = p.hidden();
  // One projection for all steps.
  Tensor<T> projected = AddRowBias(tape, MatMul(tape, inputs, p.input_weights), p.bias);
  LstmState<T> state{Tensor<T>::Zeros({batch, hidden}), Tensor<T>::Zeros({batch, hidden})};
  std::vector<Tensor<T>> outputs(steps);
  for (int64_t k = 0; k < steps; ++k) {
    const int64_t t = reverse ? steps - 1 - k : k;
    state = LstmStepProjected(tape, Slice(tape, projected, 0, t * batch, batch), state, p);
    outputs[t] = state.h;
  }
  return Concat<T>(tape, outputs, 0);
}

template <typename T>
Tensor<T> BiLstmForward(Tape<T> &tape, const Tensor<T> &inputs, int64_t batch,
                        const LstmParams<T> &forward, const LstmParams<T> &backward) {
  Tensor<T> fwd = LstmSequence(tape, inputs, batch, forward, false);
  Tensor<T> bwd = LstmSequence(tape, inputs, batch, backward, true);
  return Concat(tape, fwd, bwd, 1);
}

template <typename T>
Tensor<T> Activate(Tape<T> &tape, const Tensor<T> &x, Activation activation) {
  switch (activation) {
    case Activation::kTanh: return Tanh(tape, x);
    case Activation::kRelu: return Relu(tape, x);
    case Activation::kLinear: return x;
  }
  return x;
}

template <typename T>
Tensor<T> Dense(Tape<T> &tape, const Tensor<T> &x, const Tensor<T> &weights,
                const Tensor<T> &bias, Activation activation) {
  return Activate(tape, AddRowBias(tape, MatMul(tape, x, weights), bias), activation);
}

template <typename T>
Tensor<T> Dropout(Tape<T> &tape, const Tensor<T> &x, double rate, RunMode mode,
                  std::mt19937_64 &rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ConfigError("dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
  if (mode == RunMode::kEval || rate == 0.0) return x;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  std::vector<T> mask(x.size());
  for (T &m : mask) m = uniform(rng) < rate ? T(0) : keep_scale;
  return Mul(tape, x, Tensor<T>::FromData(x.shape(), std::move(mask)));
}

template <typename T>
AttentionOutput<T> SelfAttention(Tape<T> &tape, const Tensor<T> &seq,
                                 std::span<const uint8_t> mask, int64_t batch,
                                 const Tensor<T> &attention_weights,
                                 const Tensor<T> &position_weights, bool use_mask) {
  const int64_t steps = position_weights.dim(0);
  if (seq.rank() != 2 || seq.dim(0) != steps * batch ||
      static_cast<int64_t>(mask.size()) != steps * batch) {
    throw DimensionError("self_attention: sequence " + ShapeString(seq.shape()) +
                         " does not match L=" + std::to_string(steps) +
                         ", B=" + std::to_string(batch));
  }
  for (int64_t b = 0; b < batch; ++b) {
    bool any = false;
    for (int64_t t = 0; t < steps; ++t) any = any || mask[b * steps + t] != 0;
    if (!any) {
      throw UsageError("self_attention: sentence " + std::to_string(b) +
                       " has no attendable tokens");
    }
  }
  // [(L*B) x 1] -> [L x B] -> [B x L]
  Tensor<T> scores = Tanh(tape, MatMul(tape, seq, attention_weights));
  if (use_mask) {
    // Padded scores would otherwise leak into real positions through W_alpha.
    std::vector<T> keep(steps * batch);
    for (int64_t t = 0; t < steps; ++t) {
      for (int64_t b = 0; b < batch; ++b) keep[t * batch + b] = mask[b * steps + t] ? T(1) : T(0);
    }
    scores = Mul(tape, scores, Tensor<T>::FromData({steps * batch, 1}, std::move(keep)));
  }
  Tensor<T> per_sentence = Transpose(tape, Reshape(tape, scores, {steps, batch}));
  Tensor<T> logits = MatMul(tape, per_sentence, position_weights);
  if (use_mask) {
    std::vector<T> bias(batch * steps, T(0));
    for (int64_t i = 0; i < batch * steps; ++i) {
      if (mask[i] == 0) bias[i] = static_cast<T>(kMaskedLogit);
    }
    logits = Add(tape, logits, Tensor<T>::FromData({batch, steps}, std::move(bias)));
  }
  Tensor<T> alpha = SoftmaxRows(tape, logits);
  return {TimeWeightedSum(tape, alpha, seq), alpha};
}

#define MTSS_INSTANTIATE_LAYERS(T)                                                           \
  template struct LstmParams<T>;                                                             \
  template LstmState<T> LstmStepProjected(Tape<T> &, const Tensor<T> &, const LstmState<T> &, \
                                          const LstmParams<T> &);                            \
  template LstmState<T> LstmCellStep(Tape<T> &, const Tensor<T> &, const LstmState<T> &,      \
                                     const LstmParams<T> &);                                 \
  template Tensor<T> LstmSequence(Tape<T> &, const Tensor<T> &, int64_t,                     \
                                  const LstmParams<T> &, bool);                              \
  template Tensor<T> BiLstmForward(Tape<T> &, const Tensor<T> &, int64_t,                    \
                                   const LstmParams<T> &, const LstmParams<T> &);            \
  template Tensor<T> Activate(Tape<T> &, const Tensor<T> &, Activation);                    \
  template Tensor<T> Dense(Tape<T> &, const Tensor<T> &, const Tensor<T> &,                 \
                           const Tensor<T> &, Activation);                                   \
  template Tensor<T> Dropout(Tape<T> &, const Tensor<T> &, double, RunMode,                 \
                             std::mt19937_64 &);                                             \
  template AttentionOutput<T> SelfAttention(Tape<T> &, const Tensor<T> &,                    \
                                            std::span<const uint8_t>, int64_t,               \
                                            const Tensor<T> &, const Tensor<T> &, bool);

MTSS_INSTANTIATE_LAYERS(float)
MTSS_INSTANTIATE_LAYERS(double)

#undef MTSS_INSTANTIATE_LAYERS

}  // namespace mtss
