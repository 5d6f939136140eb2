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

// The subcommands behind the mtss executable. Each takes explicit streams so
// tests can run them in-process.

#ifndef MTSS_CLI_COMMANDS_H_
#define MTSS_CLI_COMMANDS_H_

#include <array>
#include <exception>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "mtss/cli/experiment.h"
#include "mtss/cli/prepare.h"
#include "mtss/data/synthetic.h"
#include "mtss/model/model.h"
#include "mtss/train/trainer.h"

namespace mtss {

// 0 success, 1 usage or configuration, 2 data (I/O or format), 3 numerical.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumerical = 3,
};
int ExitCodeFor(const std::exception &error);

// Prepared splits plus the datasets the model consumes. TrainingData points
// into `datasets`, so the object is not movable.
struct ExperimentData {
  PreparedData prepared;
  std::array<EncodedDataset, 2> datasets;
  TrainingData training;
  std::array<int64_t, 2> vocab_sizes{0, 0};

  ExperimentData() = default;
  ExperimentData(const ExperimentData &) = delete;
  ExperimentData &operator=(const ExperimentData &) = delete;
};

// Prepares (or loads) the corpus and, in bert-file mode, reads the MTSS
// files. Throws ConfigError when a file's length or width disagrees with the
// model config.
std::unique_ptr<ExperimentData> LoadExperimentData(const ExperimentConfig &config,
                                                   std::ostream &log);

// A model initialized from config.plan.seed, with embedding tables filled
// from GloVe (or random vectors) in glove mode. pretrained=false skips the
// vector file, for models about to be overwritten by a checkpoint.
template <typename T>
std::unique_ptr<MtssModel<T>> BuildModel(const ExperimentConfig &config,
                                         const ExperimentData &data, std::ostream &log,
                                         bool pretrained = true);

// "test pol accuracy 0.812500 (1625/2000) loss 0.412345" per present task.
std::string FormatAccuracyLines(SplitKind split, const EvalResult &result);
// Two-by-two confusion matrices with labelled rows.
std::string FormatConfusion(const EvalResult &result);
// One line of key=value pairs.
std::string FormatMachineRow(SplitKind split, const EvalResult &result);

void CmdPrepare(const ExperimentConfig &config, std::ostream &out);

struct TrainOptions {
  std::string resume;  // checkpoint to start from
};

struct TrainOutcome {
  std::string run_dir;
  TrainResult result;
};

// Writes into the run directory:
//   metrics.csv     epoch,split,task,loss,accuracy (train and dev rows)
//   curves.csv      one row per epoch, loss and accuracy per task and split
//   checkpoint.mtsk parameters and optimizer state of the best dev epoch
//   config.txt      the effective config
//   report.txt      best epoch, dev and test figures
// The run directory is config.out_dir, or a timestamped run-* directory
// inside it when out_dir already holds a metrics.csv.
TrainOutcome CmdTrain(const ExperimentConfig &config, const TrainOptions &options,
                      std::ostream &out);

struct EvalOptions {
  std::string checkpoint;
  SplitKind split = SplitKind::kTest;
  bool machine = false;
  // key=value settings applied over the checkpoint's config, e.g. paths.
  std::vector<std::string> overrides;
};

EvalResult CmdEval(const EvalOptions &options, std::ostream &out);

// Returns the exit code: 0 when every check passes.
int CmdGradcheck(std::ostream &out);

// Collects run directories into output_dir/summary.csv (one row per run)
// and output_dir/curves.csv (every metrics row, prefixed with the run).
void CmdExportReport(const std::vector<std::string> &run_dirs, const std::string &output_dir,
                     std::ostream &out);

// Writes a surrogate corpus and matching word vectors.
void CmdSynth(const std::string &dir, const SurrogateSpec &spec, std::ostream &out);

// Shortest text that parses back to the same double.
std::string FormatNumber(double value);

}  // namespace mtss

#endif  // MTSS_CLI_COMMANDS_H_
