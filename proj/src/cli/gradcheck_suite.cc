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

#include "mtss/cli/gradcheck_suite.h"

#include <chrono>
#include <cstdio>
#include <random>

#include "mtss/binary_io.h"
#include "mtss/errors.h"
#include "mtss/model/layers.h"
#include "mtss/model/model.h"
#include "mtss/tensor/ops.h"

namespace mtss {
namespace {

using T64 = Tensor<double>;
constexpr int kTrials = 3;

T64 Random(const Shape &shape, std::mt19937_64 &rng, bool requires_grad = true) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> values(NumElements(shape));
  for (double &v : values) v = dist(rng);
  return T64::FromData(shape, std::move(values), requires_grad);
}

void KeepWorst(GradCheckReport &worst, const GradCheckReport &report) {
  const int64_t coordinates = worst.coordinates + report.coordinates;
  if (report.max_relative_error >= worst.max_relative_error) worst = report;
  worst.coordinates = coordinates;
}

// An op applied to freshly drawn inputs of fixed shapes, over several seeds.
GradCheckCase OpCase(std::string name, std::vector<Shape> shapes,
                     std::function<T64(Tape<double> &, std::vector<T64> &)> apply) {
  return {name, [shapes, apply, name] {
            GradCheckReport worst;
            for (int trial = 0; trial < kTrials; ++trial) {
              std::mt19937_64 rng(Fnv1a(name.data(), name.size()) + trial);
              std::vector<T64> inputs;
              for (const Shape &s : shapes) inputs.push_back(Random(s, rng));
              Tape<double> probe(false);
              const T64 weights = Random(apply(probe, inputs).shape(), rng, false);
              KeepWorst(worst, GradCheck(
                                   [&](Tape<double> &t) {
                                     return Sum(t, Mul(t, apply(t, inputs), weights));
                                   },
                                   inputs));
            }
            return worst;
          }};
}

std::vector<T64> Tensors(ParameterSet<double> &params) {
  std::vector<T64> out;
  for (auto &entry : params.entries()) out.push_back(entry.tensor);
  return out;
}

void Randomize(ParameterSet<double> &params, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> dist(-0.8, 0.8);
  for (auto &entry : params.entries()) {
    for (double &v : entry.tensor.data()) v = dist(rng);
  }
}

std::vector<uint8_t> RaggedMask(int64_t batch, int64_t steps, std::mt19937_64 &rng) {
  std::vector<uint8_t> mask(batch * steps, 0);
  for (int64_t b = 0; b < batch; ++b) {
    const int64_t n = std::uniform_int_distribution<int64_t>(1, steps)(rng);
    for (int64_t t = 0; t < n; ++t) mask[b * steps + t] = 1;
  }
  return mask;
}

EncodedBatch TinyBatch(Task task, int64_t batch, int64_t vocab, std::mt19937_64 &rng) {
  constexpr int64_t kSteps = 3, kDim = 2;
  EncodedBatch b;
  b.task = task;
  b.batch_size = batch;
  b.max_len = kSteps;
  b.mask = RaggedMask(batch, kSteps, rng);
  if (vocab > 0) {
    b.ids.assign(batch * kSteps, 0);
    for (int64_t i = 0; i < batch * kSteps; ++i) {
      if (b.mask[i]) b.ids[i] = std::uniform_int_distribution<int32_t>(1, vocab - 1)(rng);
    }
  } else {
    b.emb_dim = kDim;
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    for (int64_t i = 0; i < batch * kSteps * kDim; ++i) b.embeddings.push_back(dist(rng));
  }
  for (int64_t s = 0; s < batch; ++s) b.labels.push_back(static_cast<int32_t>(rng() % 2));
  return b;
}

ModelConfig TinyModelConfig(double dropout) {
  ModelConfig c;
  c.pol_max_len = c.subj_max_len = 3;
  c.emb_dim = c.hidden = c.tdfc_dim = c.attn_fc_dim = c.out_dim = c.ntn_dim = 2;
  c.dropout = dropout;
  return c;
}

GradCheckCase EndToEndCase(TrainMode mode, EmbeddingMode embedding, double dropout) {
  std::string name = "model/" + std::string(ModeName(mode)) + "/" +
                     std::string(EmbeddingName(embedding));
  if (dropout > 0) name += "/dropout";
  return {name, [=] {
            GradCheckReport worst;
            for (int trial = 0; trial < kTrials; ++trial) {
              std::mt19937_64 rng(100 + trial);
              const int64_t vocab = embedding == EmbeddingMode::kGlove ? 6 : 0;
              MtssModel<double> model(TinyModelConfig(dropout), mode, embedding, {vocab, vocab});
              Randomize(model.parameters(), rng);
              const EncodedBatch pol = TinyBatch(Task::kPolarity, 3, vocab, rng);
              const EncodedBatch subj = TinyBatch(Task::kSubjectivity, 3, vocab, rng);
              TaskBatches batches{model.uses(Task::kPolarity) ? &pol : nullptr,
                                  model.uses(Task::kSubjectivity) ? &subj : nullptr};
              std::vector<T64> inputs = Tensors(model.parameters());
              KeepWorst(worst, GradCheck(
                                   [&](Tape<double> &t) {
                                     std::mt19937_64 a(7), b(8);
                                     return model.Forward(t, batches, RunMode::kTrain, {&a, &b})
                                         .loss;
                                   },
                                   inputs));
            }
            return worst;
          }};
}

GradCheckCase LayerCase(std::string name,
                        std::function<GradCheckReport(std::mt19937_64 &)> trial_fn) {
  return {name, [name, trial_fn] {
            GradCheckReport worst;
            for (int trial = 0; trial < kTrials; ++trial) {
              std::mt19937_64 rng(Fnv1a(name.data(), name.size()) + trial);
              KeepWorst(worst, trial_fn(rng));
            }
            return worst;
          }};
}

}  // namespace

std::vector<GradCheckCase> StandardGradCheckSuite() {
  static const std::vector<int32_t> kIds = {2, 0, 3, 1, 2};
  std::vector<GradCheckCase> cases = {
      OpCase("op/matmul", {{3, 4}, {4, 2}}, [](auto &t, auto &in) { return MatMul(t, in[0], in[1]); }),
      OpCase("op/add", {{3, 4}, {3, 4}}, [](auto &t, auto &in) { return Add(t, in[0], in[1]); }),
      OpCase("op/add_row_bias", {{3, 4}, {4}},
             [](auto &t, auto &in) { return AddRowBias(t, in[0], in[1]); }),
      OpCase("op/mul", {{3, 4}, {3, 4}}, [](auto &t, auto &in) { return Mul(t, in[0], in[1]); }),
      OpCase("op/mul_row", {{3, 4}, {4}}, [](auto &t, auto &in) { return MulRow(t, in[0], in[1]); }),
      OpCase("op/scale", {{3, 4}}, [](auto &t, auto &in) { return Scale(t, in[0], -1.7); }),
      OpCase("op/tanh", {{3, 4}}, [](auto &t, auto &in) { return Tanh(t, in[0]); }),
      OpCase("op/relu", {{3, 4}}, [](auto &t, auto &in) { return Relu(t, in[0]); }),
      OpCase("op/sigmoid", {{3, 4}}, [](auto &t, auto &in) { return Sigmoid(t, in[0]); }),
      OpCase("op/softmax_rows", {{3, 4}}, [](auto &t, auto &in) { return SoftmaxRows(t, in[0]); }),
      OpCase("op/concat", {{3, 2}, {3, 1}, {3, 3}},
             [](auto &t, auto &in) { return Concat<double>(t, in, 1); }),
      OpCase("op/slice", {{3, 5}}, [](auto &t, auto &in) { return Slice(t, in[0], 1, 1, 3); }),
      OpCase("op/reshape", {{3, 4}}, [](auto &t, auto &in) { return Reshape(t, in[0], {4, 3}); }),
      OpCase("op/flatten", {{3, 4}}, [](auto &t, auto &in) { return Flatten(t, in[0]); }),
      OpCase("op/transpose", {{3, 4}}, [](auto &t, auto &in) { return Transpose(t, in[0]); }),
      OpCase("op/sum", {{3, 4}}, [](auto &t, auto &in) { return Sum(t, in[0]); }),
      OpCase("op/gather_rows", {{4, 3}},
             [](auto &t, auto &in) { return GatherRows<double>(t, in[0], kIds); }),
      OpCase("op/bilinear", {{3, 4}, {2, 4, 5}, {3, 5}},
             [](auto &t, auto &in) { return Bilinear(t, in[0], in[1], in[2]); }),
      OpCase("op/time_weighted_sum", {{2, 3}, {6, 4}},
             [](auto &t, auto &in) { return TimeWeightedSum(t, in[0], in[1]); }),
      LayerCase("op/cross_entropy",
                [](std::mt19937_64 &rng) {
                  std::vector<T64> logits = {Random({4, 2}, rng)};
                  const T64 targets = T64::FromData({4, 2}, {1, 0, 0, 1, 0, 1, 1, 0});
                  return GradCheck(
                      [&](Tape<double> &t) {
                        return CrossEntropy(t, SoftmaxRows(t, logits[0]), targets);
                      },
                      logits);
                }),
      LayerCase("layer/lstm_cell",
                [](std::mt19937_64 &rng) {
                  ParameterSet<double> params;
                  auto p = LstmParams<double>::Create(params, "lstm", 3, 2);
                  Randomize(params, rng);
                  std::vector<T64> inputs = Tensors(params);
                  inputs.push_back(Random({2, 3}, rng));
                  inputs.push_back(Random({2, 2}, rng));
                  inputs.push_back(Random({2, 2}, rng));
                  const T64 wh = Random({2, 2}, rng, false), wc = Random({2, 2}, rng, false);
                  return GradCheck(
                      [&](Tape<double> &t) {
                        auto next = LstmCellStep(t, inputs[6], {inputs[7], inputs[8]}, p);
                        return Add(t, Sum(t, Mul(t, next.h, wh)), Sum(t, Mul(t, next.c, wc)));
                      },
                      inputs);
                }),
      LayerCase("layer/bilstm",
                [](std::mt19937_64 &rng) {
                  ParameterSet<double> params;
                  auto fwd = LstmParams<double>::Create(params, "f", 2, 2);
                  auto bwd = LstmParams<double>::Create(params, "b", 2, 2);
                  Randomize(params, rng);
                  std::vector<T64> inputs = Tensors(params);
                  inputs.push_back(Random({3 * 2, 2}, rng));
                  const T64 w = Random({6, 4}, rng, false);
                  return GradCheck(
                      [&](Tape<double> &t) {
                        return Sum(t, Mul(t, BiLstmForward(t, inputs.back(), 2, fwd, bwd), w));
                      },
                      inputs);
                }),
      LayerCase("layer/dense",
                [](std::mt19937_64 &rng) {
                  GradCheckReport worst;
                  for (Activation a : {Activation::kTanh, Activation::kRelu, Activation::kLinear}) {
                    std::vector<T64> in = {Random({3, 4}, rng), Random({4, 2}, rng),
                                           Random({2}, rng)};
                    const T64 w = Random({3, 2}, rng, false);
                    KeepWorst(worst, GradCheck(
                                         [&](Tape<double> &t) {
                                           return Sum(t, Mul(t, Dense(t, in[0], in[1], in[2], a), w));
                                         },
                                         in));
                  }
                  return worst;
                }),
      LayerCase("layer/dropout",
                [](std::mt19937_64 &rng) {
                  std::vector<T64> in = {Random({4, 5}, rng)};
                  const T64 w = Random({4, 5}, rng, false);
                  return GradCheck(
                      [&](Tape<double> &t) {
                        std::mt19937_64 mask_rng(3);
                        return Sum(t, Mul(t, Dropout(t, in[0], 0.4, RunMode::kTrain, mask_rng), w));
                      },
                      in);
                }),
      LayerCase("layer/self_attention",
                [](std::mt19937_64 &rng) {
                  GradCheckReport worst;
                  for (bool use_mask : {true, false}) {
                    const std::vector<uint8_t> mask = RaggedMask(2, 3, rng);
                    std::vector<T64> in = {Random({3 * 2, 4}, rng), Random({4, 1}, rng),
                                           Random({3, 3}, rng)};
                    const T64 w = Random({2, 4}, rng, false);
                    KeepWorst(worst, GradCheck(
                                         [&](Tape<double> &t) {
                                           auto out = SelfAttention(t, in[0], mask, 2, in[1], in[2],
                                                                    use_mask);
                                           return Sum(t, Mul(t, out.pooled, w));
                                         },
                                         in));
                  }
                  return worst;
                }),
      LayerCase("layer/ntn",
                [](std::mt19937_64 &rng) {
                  ParameterSet<double> params;
                  ModelConfig c = TinyModelConfig(0.0);
                  c.attn_fc_dim = 3;
                  c.ntn_dim = 4;
                  auto p = NtnParams<double>::Create(params, c);
                  Randomize(params, rng);
                  std::vector<T64> in = Tensors(params);
                  in.push_back(Random({2, 3}, rng));
                  in.push_back(Random({2, 3}, rng));
                  const T64 w = Random({2, 4}, rng, false);
                  return GradCheck(
                      [&](Tape<double> &t) {
                        return Sum(t, Mul(t, NtnFuse(t, in[3], in[4], p), w));
                      },
                      in);
                }),
      LayerCase("layer/classify_head",
                [](std::mt19937_64 &rng) {
                  ParameterSet<double> params;
                  auto p = HeadParams<double>::Create(params, Task::kPolarity, 5, 2);
                  Randomize(params, rng);
                  std::vector<T64> in = Tensors(params);
                  in.push_back(Random({4, 3}, rng));
                  in.push_back(Random({4, 2}, rng));
                  const T64 w = Random({4, 2}, rng, false);
                  return GradCheck(
                      [&](Tape<double> &t) {
                        return Sum(t, Mul(t, ClassifyHead(t, in[2], in[3], p), w));
                      },
                      in);
                }),
  };
  for (EmbeddingMode embedding : {EmbeddingMode::kGlove, EmbeddingMode::kBertFile}) {
    for (TrainMode mode : {TrainMode::kMtl, TrainMode::kSinglePol, TrainMode::kSingleSubj}) {
      cases.push_back(EndToEndCase(mode, embedding, 0.0));
    }
  }
  cases.push_back(EndToEndCase(TrainMode::kMtl, EmbeddingMode::kBertFile, 0.3));
  return cases;
}

std::vector<GradCheckRow> RunGradCheckSuite(const std::vector<GradCheckCase> &cases,
                                            double tolerance) {
  std::vector<GradCheckRow> rows;
  for (const GradCheckCase &c : cases) {
    GradCheckRow row;
    row.name = c.name;
    const auto start = std::chrono::steady_clock::now();
    try {
      const GradCheckReport report = c.run();
      row.max_relative_error = report.max_relative_error;
      row.coordinates = report.coordinates;
      row.passed = report.max_relative_error < tolerance;
    } catch (const Error &e) {
      row.error = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

void PrintGradCheckTable(std::ostream &out, const std::vector<GradCheckRow> &rows,
                         double tolerance) {
  char line[256];
  std::snprintf(line, sizeof line, "%-34s %12s %8s %8s  %s\n", "check", "max rel err", "coords",
                "seconds", "result");
  out << line;
  int failed = 0;
  double total = 0.0;
  for (const GradCheckRow &row : rows) {
    total += row.seconds;
    if (!row.passed) ++failed;
    std::snprintf(line, sizeof line, "%-34s %12.3e %8lld %8.2f  %s\n", row.name.c_str(),
                  row.max_relative_error, static_cast<long long>(row.coordinates), row.seconds,
                  row.passed ? "PASS" : "FAIL");
    out << line;
    if (!row.error.empty()) out << "    error: " << row.error << "\n";
  }
  std::snprintf(line, sizeof line, "%d of %zu checks passed (tolerance %.0e, %.1f s)\n",
                static_cast<int>(rows.size()) - failed, rows.size(), tolerance, total);
  out << line;
}

}  // namespace mtss
