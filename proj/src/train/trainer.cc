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

#include "mtss/train/trainer.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mtss/errors.h"
#include "mtss/random.h"
#include "mtss/tensor/ops.h"

namespace mtss {

std::string_view SplitName(SplitKind split) {
  switch (split) {
    case SplitKind::kTrain: return "train";
    case SplitKind::kDev: return "dev";
    case SplitKind::kTest: return "test";
  }
  return "?";
}

SplitKind ParseSplit(std::string_view name) {
  for (SplitKind s : {SplitKind::kTrain, SplitKind::kDev, SplitKind::kTest}) {
    if (SplitName(s) == name) return s;
  }
  throw ConfigError("unknown split '" + std::string(name) + "' (expected train, dev or test)");
}

std::vector<std::vector<int64_t>> ShuffledBatches(std::span<const int64_t> rows,
                                                  int64_t batch_size, std::mt19937_64 &rng,
                                                  bool keep_partial) {
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  std::vector<int64_t> order(rows.begin(), rows.end());
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<int64_t>> batches;
  const auto n = static_cast<int64_t>(order.size());
  for (int64_t start = 0; start < n; start += batch_size) {
    const int64_t size = std::min(batch_size, n - start);
    if (size < batch_size && !keep_partial) break;
    batches.emplace_back(order.begin() + start, order.begin() + start + size);
  }
  return batches;
}

std::vector<BatchPair> MakeMtlBatches(std::span<const int64_t> pol_rows,
                                      std::span<const int64_t> subj_rows, int64_t batch_size,
                                      std::mt19937_64 &pol_rng, std::mt19937_64 &subj_rng) {
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (pol_rows.empty() || subj_rows.empty()) {
    throw UsageError("multitask batching needs both splits to be nonempty");
  }
  auto pol = ShuffledBatches(pol_rows, batch_size, pol_rng, false);
  auto subj = ShuffledBatches(subj_rows, batch_size, subj_rng, false);
  std::vector<BatchPair> pairs;
  for (size_t i = 0; i < std::min(pol.size(), subj.size()); ++i) {
    pairs.emplace_back(std::move(pol[i]), std::move(subj[i]));
  }
  return pairs;
}

void TrainPlan::Validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (early_stop && patience < 1) throw ConfigError("patience must be at least 1");
}

const std::vector<int64_t> &TaskData::rows(SplitKind split) const {
  switch (split) {
    case SplitKind::kTrain: return splits.train;
    case SplitKind::kDev: return splits.dev;
    case SplitKind::kTest: return splits.test;
  }
  return splits.train;
}

double EvalResult::MeanAccuracy() const {
  double sum = 0.0;
  int n = 0;
  for (size_t i = 0; i < 2; ++i) {
    if (!present[i]) continue;
    sum += tasks[i].accuracy;
    ++n;
  }
  return n == 0 ? 0.0 : sum / n;
}

namespace {

// Adds rows [0, valid) of a batch's predictions to the running figures.
template <typename T>
void Accumulate(const Tensor<T> &probs, const EncodedBatch &batch, int64_t valid,
                TaskEval &eval, double &loss_sum) {
  const std::vector<int32_t> predicted = PredictClasses(probs);
  for (int64_t r = 0; r < valid; ++r) {
    const int32_t truth = batch.labels[r];
    ++eval.confusion[truth][predicted[r]];
    ++eval.count;
    loss_sum -= std::log(std::max(static_cast<double>(probs.at(r, truth)), kLogClamp));
  }
}

void Finish(TaskEval &eval, double loss_sum) {
  if (eval.count == 0) return;
  eval.loss = loss_sum / static_cast<double>(eval.count);
  eval.accuracy = static_cast<double>(eval.confusion[0][0] + eval.confusion[1][1]) /
                  static_cast<double>(eval.count);
}

template <typename T>
void CheckData(const MtssModel<T> &model, const TrainingData &data) {
  for (Task task : kAllTasks) {
    if (!model.uses(task)) continue;
    const EncodedDataset *d = data[TaskIndex(task)].data;
    if (d == nullptr) {
      throw UsageError(std::string(ModeName(model.mode())) + " needs " +
                       std::string(TaskName(task)) + " data");
    }
    if (d->max_len != model.config().max_len(task)) {
      throw ConfigError(std::string(TaskName(task)) + " data has L=" +
                        std::to_string(d->max_len) + " but the model expects L=" +
                        std::to_string(model.config().max_len(task)));
    }
    const bool wants_embeddings = model.embedding() == EmbeddingMode::kBertFile;
    if (d->has_embeddings() != wants_embeddings) {
      throw ConfigError(std::string(TaskName(task)) + " data does not match embedding mode " +
                        std::string(EmbeddingName(model.embedding())));
    }
    if (wants_embeddings && d->emb_dim != model.config().emb_dim) {
      throw ConfigError(std::string(TaskName(task)) + " embeddings have D=" +
                        std::to_string(d->emb_dim) + " but the model expects D=" +
                        std::to_string(model.config().emb_dim));
    }
  }
}

}  // namespace

template <typename T>
EvalResult Evaluate(const MtssModel<T> &model, const TrainingData &data, SplitKind split,
                    int64_t batch_size) {
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  CheckData(model, data);
  EvalResult result;
  std::array<const std::vector<int64_t> *, 2> rows{nullptr, nullptr};
  int64_t longest = 0;
  for (Task task : kAllTasks) {
    if (!model.uses(task)) continue;
    const size_t i = TaskIndex(task);
    rows[i] = &data[i].rows(split);
    if (rows[i]->empty()) {
      throw UsageError("the " + std::string(SplitName(split)) + " split of " +
                       std::string(TaskName(task)) + " is empty");
    }
    result.present[i] = true;
    longest = std::max<int64_t>(longest, static_cast<int64_t>(rows[i]->size()));
  }

  std::array<double, 2> loss_sum{0.0, 0.0};
  std::mt19937_64 unused(0);
  Tape<T> tape(false);
  for (int64_t start = 0; start < longest; start += batch_size) {
    const int64_t size = std::min(batch_size, longest - start);
    std::array<EncodedBatch, 2> batches;
    TaskBatches pointers{nullptr, nullptr};
    for (size_t i = 0; i < 2; ++i) {
      if (!result.present[i]) continue;
      const auto n = static_cast<int64_t>(rows[i]->size());
      std::vector<int64_t> picked(size);
      for (int64_t k = 0; k < size; ++k) picked[k] = (*rows[i])[(start + k) % n];
      batches[i] = MakeBatch(*data[i].data, picked);
      pointers[i] = &batches[i];
    }
    ModelOutput<T> out = model.Forward(tape, pointers, RunMode::kEval, {&unused, &unused});
    for (size_t i = 0; i < 2; ++i) {
      if (!result.present[i]) continue;
      const int64_t valid =
          std::clamp<int64_t>(static_cast<int64_t>(rows[i]->size()) - start, 0, size);
      Accumulate(out.probs[i], batches[i], valid, result.tasks[i], loss_sum[i]);
    }
  }
  for (size_t i = 0; i < 2; ++i) Finish(result.tasks[i], loss_sum[i]);
  return result;
}

template <typename T>
StepStats TrainStep(MtssModel<T> &model, Adam<T> &optimizer, const TaskBatches &batches,
                    std::array<std::mt19937_64 *, 2> dropout_rngs) {
  Tape<T> tape;
  ModelOutput<T> out = model.Forward(tape, batches, RunMode::kTrain, dropout_rngs);
  model.parameters().ZeroGrad();
  tape.Backward(out.loss);
  optimizer.Step();

  StepStats stats;
  for (size_t i = 0; i < 2; ++i) {
    if (!out.probs[i].defined()) continue;
    const std::vector<int32_t> predicted = PredictClasses(out.probs[i]);
    for (int64_t r = 0; r < batches[i]->batch_size; ++r) {
      stats.correct[i] += predicted[r] == batches[i]->labels[r];
    }
    stats.count[i] = batches[i]->batch_size;
    stats.loss_sum[i] = static_cast<double>(out.losses[i].item()) * batches[i]->batch_size;
  }
  return stats;
}

template <typename T>
Trainer<T>::Trainer(MtssModel<T> &model, const TrainingData &data, const TrainPlan &plan)
    : model_(model),
      data_(data),
      plan_(plan),
      optimizer_(model.parameters(), plan.adam),
      batch_rngs_{MakeRng(plan.seed, kStreamBatches), MakeRng(plan.seed, kStreamBatches + 1)},
      dropout_rngs_{MakeRng(plan.seed, kStreamDropout), MakeRng(plan.seed, kStreamDropout + 1)} {
  plan_.Validate();
  if (model.mode() != plan.mode) {
    throw ConfigError("model was built for " + std::string(ModeName(model.mode())) +
                      " but the plan trains " + std::string(ModeName(plan.mode)));
  }
  CheckData(model, data);
}

template <typename T>
EvalResult Trainer<T>::TrainEpoch(int64_t epoch) {
  std::vector<std::array<std::vector<int64_t>, 2>> plan;
  const size_t pol = TaskIndex(Task::kPolarity), subj = TaskIndex(Task::kSubjectivity);
  if (plan_.mode == TrainMode::kMtl) {
    for (auto &[p, s] : MakeMtlBatches(data_[pol].splits.train, data_[subj].splits.train,
                                       plan_.batch_size, batch_rngs_[pol], batch_rngs_[subj])) {
      plan.push_back({std::move(p), std::move(s)});
    }
  } else {
    const size_t i = plan_.mode == TrainMode::kSinglePol ? pol : subj;
    for (auto &rows :
         ShuffledBatches(data_[i].splits.train, plan_.batch_size, batch_rngs_[i], true)) {
      std::array<std::vector<int64_t>, 2> entry;
      entry[i] = std::move(rows);
      plan.push_back(std::move(entry));
    }
  }
  if (plan.empty()) {
    throw UsageError("training split is smaller than one batch of " +
                     std::to_string(plan_.batch_size));
  }

  EvalResult result;
  std::array<double, 2> loss_sum{0.0, 0.0};
  std::array<int64_t, 2> correct{0, 0};
  for (size_t b = 0; b < plan.size(); ++b) {
    std::array<EncodedBatch, 2> batches;
    TaskBatches pointers{nullptr, nullptr};
    for (size_t i = 0; i < 2; ++i) {
      if (plan[b][i].empty()) continue;
      batches[i] = MakeBatch(*data_[i].data, plan[b][i]);
      pointers[i] = &batches[i];
    }
    StepStats stats;
    try {
      stats = TrainStep(model_, optimizer_, pointers, {&dropout_rngs_[0], &dropout_rngs_[1]});
    } catch (const NumericalError &e) {
      std::ostringstream msg;
      msg << "epoch " << epoch << ", batch " << b + 1 << " of " << plan.size() << ": "
          << e.what() << "; training diverged at learning rate " << plan_.adam.learning_rate
          << ", try a smaller --lr or enable gradient clipping";
      throw NumericalError(msg.str());
    }
    for (size_t i = 0; i < 2; ++i) {
      if (stats.count[i] == 0) continue;
      result.present[i] = true;
      result.tasks[i].count += stats.count[i];
      loss_sum[i] += stats.loss_sum[i];
      correct[i] += stats.correct[i];
    }
  }
  for (size_t i = 0; i < 2; ++i) {
    if (!result.present[i]) continue;
    TaskEval &t = result.tasks[i];
    t.loss = loss_sum[i] / static_cast<double>(t.count);
    t.accuracy = static_cast<double>(correct[i]) / static_cast<double>(t.count);
  }
  return result;
}

template <typename T>
TrainResult Trainer<T>::Run(const std::function<void(const EpochReport &)> &on_epoch) {
  TrainResult result;
  double best = -1.0;
  int64_t since_best = 0;
  for (int64_t epoch = 1; epoch <= plan_.epochs; ++epoch) {
    EpochReport report;
    report.epoch = epoch;
    report.train = TrainEpoch(epoch);
    report.dev = Evaluate(model_, data_, SplitKind::kDev, plan_.batch_size);
    for (SplitKind split : {SplitKind::kTrain, SplitKind::kDev}) {
      const EvalResult &r = split == SplitKind::kTrain ? report.train : report.dev;
      for (Task task : kAllTasks) {
        const size_t i = TaskIndex(task);
        if (!r.present[i]) continue;
        result.metrics.push_back({epoch, split, task, r.tasks[i].loss, r.tasks[i].accuracy});
      }
    }
    const double score = report.dev.MeanAccuracy();
    report.improved = score > best;
    if (report.improved) {
      best = score;
      since_best = 0;
      result.best_epoch = epoch;
      result.best_dev = report.dev;
      best_.values = model_.parameters().SnapshotValues();
      best_.adam_step = optimizer_.step_count();
      best_.adam_m = optimizer_.first_moment();
      best_.adam_v = optimizer_.second_moment();
    } else {
      ++since_best;
    }
    result.epochs_run = epoch;
    if (on_epoch) on_epoch(report);
    if (plan_.early_stop && since_best >= plan_.patience) break;
  }
  model_.parameters().RestoreValues(best_.values);
  result.test = Evaluate(model_, data_, SplitKind::kTest, plan_.batch_size);
  return result;
}

#define MTSS_INSTANTIATE_TRAINER(T)                                                       \
  template EvalResult Evaluate(const MtssModel<T> &, const TrainingData &, SplitKind,     \
                               int64_t);                                                  \
  template StepStats TrainStep(MtssModel<T> &, Adam<T> &, const TaskBatches &,            \
                               std::array<std::mt19937_64 *, 2>);                         \
  template class Trainer<T>;

MTSS_INSTANTIATE_TRAINER(float)
MTSS_INSTANTIATE_TRAINER(double)

#undef MTSS_INSTANTIATE_TRAINER

}  // namespace mtss
