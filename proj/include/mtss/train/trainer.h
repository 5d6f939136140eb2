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

// Batching, the training loop, and evaluation.

#ifndef MTSS_TRAIN_TRAINER_H_
#define MTSS_TRAIN_TRAINER_H_

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mtss/data/dataset.h"
#include "mtss/data/splits.h"
#include "mtss/model/model.h"
#include "mtss/train/optimizer.h"

namespace mtss {

enum class SplitKind { kTrain, kDev, kTest };

std::string_view SplitName(SplitKind split);
SplitKind ParseSplit(std::string_view name);

// Shuffles `rows` with `rng` and cuts them into batches of batch_size. The
// trailing short batch is kept only when keep_partial is set.
std::vector<std::vector<int64_t>> ShuffledBatches(std::span<const int64_t> rows,
                                                  int64_t batch_size, std::mt19937_64 &rng,
                                                  bool keep_partial);

// Full batches of each split, shuffled independently, paired by index.
// Batches without a partner are dropped. Throws ConfigError for
// batch_size < 1 and UsageError when a split is empty.
using BatchPair = std::pair<std::vector<int64_t>, std::vector<int64_t>>;
std::vector<BatchPair> MakeMtlBatches(std::span<const int64_t> pol_rows,
                                      std::span<const int64_t> subj_rows, int64_t batch_size,
                                      std::mt19937_64 &pol_rng, std::mt19937_64 &subj_rng);

struct TrainPlan {
  TrainMode mode = TrainMode::kMtl;
  int64_t epochs = 20;
  int64_t batch_size = 64;
  uint64_t seed = 1;
  AdamConfig adam;
  // Stop once the mean dev accuracy has not improved for `patience` epochs.
  bool early_stop = false;
  int64_t patience = 3;

  void Validate() const;
};

// One task's encoded sentences and their split. `data` is null for a task
// the mode does not use.
struct TaskData {
  const EncodedDataset *data = nullptr;
  Splits splits;

  const std::vector<int64_t> &rows(SplitKind split) const;
};
using TrainingData = std::array<TaskData, 2>;  // indexed by TaskIndex

struct TaskEval {
  int64_t count = 0;
  double loss = 0.0;      // mean cross-entropy
  double accuracy = 0.0;
  // confusion[true class][predicted class]
  std::array<std::array<int64_t, 2>, 2> confusion{};
};

struct EvalResult {
  std::array<bool, 2> present{false, false};
  std::array<TaskEval, 2> tasks;

  // Mean accuracy over the present tasks.
  double MeanAccuracy() const;
};

// One row of the metrics CSV.
struct MetricsRecord {
  int64_t epoch = 0;
  SplitKind split = SplitKind::kTrain;
  Task task = Task::kPolarity;
  double loss = 0.0;
  double accuracy = 0.0;
};

// Evaluation-mode pass over one split. In MTL mode each task's sentences are
// paired by position with the other task's, cycling the shorter split.
// Throws UsageError on an empty split.
template <typename T>
EvalResult Evaluate(const MtssModel<T> &model, const TrainingData &data, SplitKind split,
                    int64_t batch_size);

// Loss and accuracy counters for one optimizer step.
struct StepStats {
  std::array<double, 2> loss_sum{0.0, 0.0};  // per-sentence loss summed
  std::array<int64_t, 2> correct{0, 0};
  std::array<int64_t, 2> count{0, 0};
};

// Forward in train mode, backward, and one Adam step.
template <typename T>
StepStats TrainStep(MtssModel<T> &model, Adam<T> &optimizer, const TaskBatches &batches,
                    std::array<std::mt19937_64 *, 2> dropout_rngs);

struct EpochReport {
  int64_t epoch = 0;
  EvalResult train;  // running train-mode figures
  EvalResult dev;
  bool improved = false;
};

struct TrainResult {
  std::vector<MetricsRecord> metrics;
  int64_t best_epoch = 0;
  EvalResult best_dev;
  EvalResult test;
  int64_t epochs_run = 0;
};

template <typename T>
class Trainer {
 public:
  // The model's mode must match plan.mode, and data must hold every task
  // the mode uses.
  Trainer(MtssModel<T> &model, const TrainingData &data, const TrainPlan &plan);

  Adam<T> &optimizer() { return optimizer_; }

  // One pass over the training split. A non-finite value aborts with a
  // NumericalError naming the epoch, the batch and the learning rate.
  EvalResult TrainEpoch(int64_t epoch);

  // Runs the plan, keeps the parameters of the epoch with the best mean dev
  // accuracy, restores them and evaluates the test split.
  TrainResult Run(const std::function<void(const EpochReport &)> &on_epoch = {});

  // Optimizer state captured together with the best parameters.
  struct Snapshot {
    std::vector<std::vector<T>> values;
    int64_t adam_step = 0;
    std::vector<std::vector<T>> adam_m;
    std::vector<std::vector<T>> adam_v;
  };
  const Snapshot &best() const { return best_; }

 private:
  MtssModel<T> &model_;
  const TrainingData &data_;
  TrainPlan plan_;
  Adam<T> optimizer_;
  std::array<std::mt19937_64, 2> batch_rngs_;
  std::array<std::mt19937_64, 2> dropout_rngs_;
  Snapshot best_;
};

extern template class Trainer<float>;
extern template class Trainer<double>;

}  // namespace mtss

#endif  // MTSS_TRAIN_TRAINER_H_
