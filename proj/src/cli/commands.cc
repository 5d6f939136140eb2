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

#include "mtss/cli/commands.h"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "mtss/cli/checkpoint.h"
#include "mtss/cli/gradcheck_suite.h"
#include "mtss/data/embedding_file.h"
#include "mtss/data/glove.h"
#include "mtss/errors.h"

namespace mtss {
namespace fs = std::filesystem;
namespace {

// Width of the first vector in a GloVe text file.
int64_t GloveWidth(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open GloVe file " + path);
  std::string line;
  std::getline(in, line);
  std::istringstream fields(line);
  std::string token;
  int64_t count = -1;  // the word itself
  while (fields >> token) ++count;
  return count;
}

std::string RunDirectory(const std::string &out_dir) {
  if (!fs::exists(fs::path(out_dir) / "metrics.csv")) return out_dir;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "run-%Y%m%d-%H%M%S", &tm);
  fs::path dir = fs::path(out_dir) / stamp;
  for (int n = 2; fs::exists(dir); ++n) {
    dir = fs::path(out_dir) / (std::string(stamp) + "-" + std::to_string(n));
  }
  return dir.string();
}

std::ofstream OpenOutput(const fs::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

int64_t Correct(const TaskEval &e) { return e.confusion[0][0] + e.confusion[1][1]; }

std::string EpochLine(const EpochReport &report, int64_t epochs, double seconds) {
  std::ostringstream line;
  char buf[160];
  std::snprintf(buf, sizeof buf, "epoch %3lld/%lld", static_cast<long long>(report.epoch),
                static_cast<long long>(epochs));
  line << buf;
  for (Task task : kAllTasks) {
    const size_t k = TaskIndex(task);
    if (!report.dev.present[k]) continue;
    std::snprintf(buf, sizeof buf, "  %s train %.4f/%.4f dev %.4f/%.4f", TaskName(task).data(),
                  report.train.tasks[k].loss, report.train.tasks[k].accuracy,
                  report.dev.tasks[k].loss, report.dev.tasks[k].accuracy);
    line << buf;
  }
  std::snprintf(buf, sizeof buf, "  %.1fs%s\n", seconds, report.improved ? "  *" : "");
  line << buf;
  return line.str();
}

void WriteMetricsRows(std::ostream &out, const EpochReport &report) {
  for (SplitKind split : {SplitKind::kTrain, SplitKind::kDev}) {
    const EvalResult &r = split == SplitKind::kTrain ? report.train : report.dev;
    for (Task task : kAllTasks) {
      const size_t k = TaskIndex(task);
      if (!r.present[k]) continue;
      out << report.epoch << "," << SplitName(split) << "," << TaskName(task) << ","
          << FormatNumber(r.tasks[k].loss) << "," << FormatNumber(r.tasks[k].accuracy) << "\n";
    }
  }
}

std::string CurvesHeader(TrainMode mode) {
  std::string header = "epoch";
  for (Task task : kAllTasks) {
    if (!ModeUsesTask(mode, task)) continue;
    for (const char *split : {"train", "dev"}) {
      for (const char *metric : {"loss", "accuracy"}) {
        header += ",";
        header += std::string(TaskName(task)) + "_" + split + "_" + metric;
      }
    }
  }
  return header + "\n";
}

std::string CurvesRow(const EpochReport &report) {
  std::string row = std::to_string(report.epoch);
  for (Task task : kAllTasks) {
    const size_t k = TaskIndex(task);
    if (!report.dev.present[k]) continue;
    for (const EvalResult *r : {&report.train, &report.dev}) {
      row += "," + FormatNumber(r->tasks[k].loss) + "," + FormatNumber(r->tasks[k].accuracy);
    }
  }
  return row + "\n";
}

std::string ReportText(const ExperimentConfig &config, const TrainResult &result,
                       int64_t parameters, double seconds) {
  std::ostringstream out;
  out << "mode = " << ModeName(config.plan.mode) << "\n"
      << "embedding = " << EmbeddingName(config.embedding) << "\n"
      << "seed = " << config.plan.seed << "\n"
      << "f64 = " << (config.f64 ? "true" : "false") << "\n"
      << "parameters = " << parameters << "\n"
      << "epochs_run = " << result.epochs_run << "\n"
      << "best_epoch = " << result.best_epoch << "\n"
      << "seconds = " << FormatNumber(seconds) << "\n";
  for (Task task : kAllTasks) {
    const size_t k = TaskIndex(task);
    if (!result.test.present[k]) continue;
    const std::string name(TaskName(task));
    const TaskEval &dev = result.best_dev.tasks[k];
    const TaskEval &test = result.test.tasks[k];
    out << name << "_dev_accuracy = " << FormatNumber(dev.accuracy) << "\n"
        << name << "_dev_loss = " << FormatNumber(dev.loss) << "\n"
        << name << "_test_accuracy = " << FormatNumber(test.accuracy) << "\n"
        << name << "_test_loss = " << FormatNumber(test.loss) << "\n"
        << name << "_test_count = " << test.count << "\n"
        << name << "_test_confusion = " << test.confusion[0][0] << " " << test.confusion[0][1]
        << " " << test.confusion[1][0] << " " << test.confusion[1][1] << "\n";
  }
  return out.str();
}

std::map<std::string, std::string> ReadKeyValues(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::map<std::string, std::string> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos || line.front() == '#') continue;
    values[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return values;
}

template <typename T>
TrainOutcome TrainTyped(const ExperimentConfig &config, const TrainOptions &options,
                        ExperimentData &data, const std::string &run_dir, std::ostream &out) {
  auto model = BuildModel<T>(config, data, out);
  out << "model: " << ModeName(config.plan.mode) << ", " << EmbeddingName(config.embedding)
      << ", " << model->CountParameters() << " trainable parameters, "
      << (config.f64 ? "f64" : "f32") << "\n";
  Trainer<T> trainer(*model, data.training, config.plan);
  if (!options.resume.empty()) {
    std::vector<std::string> warnings;
    const Checkpoint ckpt = LoadCheckpoint(options.resume, &warnings);
    for (const std::string &w : warnings) out << "warning: " << w << "\n";
    RestoreParameters(*model, ckpt);
    if (!RestoreOptimizer(trainer.optimizer(), ckpt)) {
      out << "warning: " << options.resume
          << " has no optimizer state; resuming with a fresh Adam state\n";
    }
    out << "resumed from " << options.resume << " (epoch " << ckpt.epoch << ")\n";
  }

  const fs::path dir(run_dir);
  fs::create_directories(dir);
  OpenOutput(dir / "config.txt") << SerializeConfig(config);
  std::ofstream metrics = OpenOutput(dir / "metrics.csv");
  std::ofstream curves = OpenOutput(dir / "curves.csv");
  metrics << "epoch,split,task,loss,accuracy\n";
  curves << CurvesHeader(config.plan.mode);
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  TrainOutcome outcome;
  outcome.run_dir = run_dir;
  outcome.result = trainer.Run([&](const EpochReport &report) {
    WriteMetricsRows(metrics, report);
    curves << CurvesRow(report);
    metrics.flush();
    curves.flush();
    out << EpochLine(report, config.plan.epochs, elapsed()) << std::flush;
  });
  const TrainResult &result = outcome.result;

  const auto &best = trainer.best();
  trainer.optimizer().SetState(best.adam_step, best.adam_m, best.adam_v);
  SaveCheckpoint((dir / "checkpoint.mtsk").string(),
                 CaptureCheckpoint(*model, SerializeConfig(config), result.best_epoch,
                                   result.best_dev, &trainer.optimizer()));
  std::ofstream report = OpenOutput(dir / "report.txt");
  report << ReportText(config, result, model->CountParameters(), elapsed());

  out << "best dev epoch " << result.best_epoch << " of " << result.epochs_run << "\n"
      << FormatAccuracyLines(SplitKind::kTest, result.test) << "run directory: " << run_dir
      << "\n";
  return outcome;
}

template <typename T>
EvalResult EvalTyped(const ExperimentConfig &config, const Checkpoint &ckpt,
                     const ExperimentData &data, SplitKind split, std::ostream &log) {
  auto model = BuildModel<T>(config, data, log, /*pretrained=*/false);
  RestoreParameters(*model, ckpt);
  return Evaluate(*model, data.training, split, config.plan.batch_size);
}

}  // namespace

std::string FormatNumber(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

int ExitCodeFor(const std::exception &error) {
  if (dynamic_cast<const NumericalError *>(&error)) return kExitNumerical;
  if (dynamic_cast<const IoError *>(&error) || dynamic_cast<const FormatError *>(&error) ||
      dynamic_cast<const fs::filesystem_error *>(&error)) {
    return kExitData;
  }
  return kExitUsage;
}

std::unique_ptr<ExperimentData> LoadExperimentData(const ExperimentConfig &config,
                                                   std::ostream &log) {
  config.Validate();
  auto data = std::make_unique<ExperimentData>();
  data->prepared = Prepare(config, log);
  for (Task task : kAllTasks) {
    if (!ModeUsesTask(config.plan.mode, task)) continue;
    const size_t k = TaskIndex(task);
    const PreparedTask &p = data->prepared.task(task);
    if (config.embedding == EmbeddingMode::kGlove) {
      data->datasets[k] = p.encoded;
      data->vocab_sizes[k] = p.vocab.size();
    } else {
      const std::string &path =
          task == Task::kPolarity ? config.pol_embeddings : config.subj_embeddings;
      data->datasets[k] = ReadEmbeddingDataset(path, task, p.encoded.labels);
      const EncodedDataset &d = data->datasets[k];
      const std::string name(TaskName(task));
      if (d.max_len != config.model.max_len(task)) {
        throw ConfigError(path + " holds sentences of length " + std::to_string(d.max_len) +
                          " but " + name + "_max_len is " +
                          std::to_string(config.model.max_len(task)));
      }
      if (d.emb_dim != config.model.emb_dim) {
        throw ConfigError(path + " holds " + std::to_string(d.emb_dim) +
                          "-dim vectors but emb_dim is " + std::to_string(config.model.emb_dim));
      }
    }
    data->training[k] = {&data->datasets[k], p.splits};
  }
  return data;
}

template <typename T>
std::unique_ptr<MtssModel<T>> BuildModel(const ExperimentConfig &config,
                                         const ExperimentData &data, std::ostream &log,
                                         bool pretrained) {
  config.model.Validate();
  auto model = std::make_unique<MtssModel<T>>(config.model, config.plan.mode, config.embedding,
                                              data.vocab_sizes);
  model->Initialize(config.plan.seed);
  if (!pretrained || config.embedding != EmbeddingMode::kGlove || config.glove_path.empty()) {
    return model;
  }
  const int64_t width = GloveWidth(config.glove_path);
  if (width != config.model.emb_dim) {
    throw ConfigError(config.glove_path + " holds " + std::to_string(width) +
                      "-dim vectors but emb_dim is " + std::to_string(config.model.emb_dim));
  }
  for (Task task : kAllTasks) {
    if (!model->uses(task)) continue;
    const Vocabulary &vocab = data.prepared.task(task).vocab;
    const GloveTable table =
        LoadGlove(config.glove_path, vocab, config.model.emb_dim, config.plan.seed);
    log << TaskName(task) << " vectors: " << table.found << " of " << vocab.word_count()
        << " words found in " << config.glove_path << "\n";
    model->SetEmbeddingTable(task, table.values);
  }
  return model;
}

template std::unique_ptr<MtssModel<float>> BuildModel(const ExperimentConfig &,
                                                      const ExperimentData &, std::ostream &,
                                                      bool);
template std::unique_ptr<MtssModel<double>> BuildModel(const ExperimentConfig &,
                                                       const ExperimentData &, std::ostream &,
                                                       bool);

std::string FormatAccuracyLines(SplitKind split, const EvalResult &result) {
  std::string lines;
  char buf[160];
  for (Task task : kAllTasks) {
    const size_t k = TaskIndex(task);
    if (!result.present[k]) continue;
    const TaskEval &e = result.tasks[k];
    std::snprintf(buf, sizeof buf, "%s %s accuracy %.6f (%lld/%lld) loss %.6f\n",
                  SplitName(split).data(), TaskName(task).data(), e.accuracy,
                  static_cast<long long>(Correct(e)), static_cast<long long>(e.count), e.loss);
    lines += buf;
  }
  return lines;
}

std::string FormatConfusion(const EvalResult &result) {
  std::string text;
  char buf[160];
  for (Task task : kAllTasks) {
    const size_t k = TaskIndex(task);
    if (!result.present[k]) continue;
    const auto &c = result.tasks[k].confusion;
    std::snprintf(buf, sizeof buf,
                  "%s confusion (rows true, columns predicted)\n"
                  "          pred 0  pred 1\n"
                  "  true 0  %6lld  %6lld\n"
                  "  true 1  %6lld  %6lld\n",
                  TaskName(task).data(), static_cast<long long>(c[0][0]),
                  static_cast<long long>(c[0][1]), static_cast<long long>(c[1][0]),
                  static_cast<long long>(c[1][1]));
    text += buf;
  }
  return text;
}

std::string FormatMachineRow(SplitKind split, const EvalResult &result) {
  std::string row = "split=" + std::string(SplitName(split));
  for (Task task : kAllTasks) {
    const size_t k = TaskIndex(task);
    if (!result.present[k]) continue;
    const std::string name(TaskName(task));
    const TaskEval &e = result.tasks[k];
    row += " " + name + "_accuracy=" + FormatNumber(e.accuracy) + " " + name +
           "_loss=" + FormatNumber(e.loss) + " " + name + "_count=" + std::to_string(e.count) +
           " " + name + "_correct=" + std::to_string(Correct(e));
  }
  return row + "\n";
}

void CmdPrepare(const ExperimentConfig &config, std::ostream &out) {
  config.Validate();
  const PreparedData data = Prepare(config, out);
  for (Task task : kAllTasks) {
    const size_t k = TaskIndex(task);
    if (!data.tasks[k]) continue;
    const PreparedTask &p = *data.tasks[k];
    out << TaskName(task) << ": " << p.encoded.size() << " sentences, " << p.vocab.word_count()
        << " words, splits " << p.splits.train.size() << "/" << p.splits.dev.size() << "/"
        << p.splits.test.size() << (p.from_cache ? " (cached)" : "") << "\n";
  }
  out << "prepared data in " << data.dir << "\n";
}

TrainOutcome CmdTrain(const ExperimentConfig &config, const TrainOptions &options,
                      std::ostream &out) {
  config.Validate();
  const std::string run_dir = RunDirectory(config.out_dir);
  auto data = LoadExperimentData(config, out);
  return config.f64 ? TrainTyped<double>(config, options, *data, run_dir, out)
                    : TrainTyped<float>(config, options, *data, run_dir, out);
}

EvalResult CmdEval(const EvalOptions &options, std::ostream &out) {
  std::ostream &log = options.machine ? std::cerr : out;
  std::vector<std::string> warnings;
  const Checkpoint ckpt = LoadCheckpoint(options.checkpoint, &warnings);
  for (const std::string &w : warnings) log << "warning: " << w << "\n";
  ExperimentConfig config = ParseConfig(ckpt.config_text);
  for (const std::string &item : options.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + item + "' is not key=value");
    SetConfigValue(config, item.substr(0, eq), item.substr(eq + 1));
  }
  auto data = LoadExperimentData(config, log);
  const EvalResult result =
      config.f64 ? EvalTyped<double>(config, ckpt, *data, options.split, log)
                 : EvalTyped<float>(config, ckpt, *data, options.split, log);
  if (options.machine) {
    out << FormatMachineRow(options.split, result);
  } else {
    out << "checkpoint " << options.checkpoint << " (" << ModeName(config.plan.mode)
        << ", epoch " << ckpt.epoch << ")\n"
        << FormatAccuracyLines(options.split, result) << FormatConfusion(result);
  }
  return result;
}

int CmdGradcheck(std::ostream &out) {
  const auto rows = RunGradCheckSuite(StandardGradCheckSuite());
  PrintGradCheckTable(out, rows);
  for (const GradCheckRow &row : rows) {
    if (!row.passed) return kExitNumerical;
  }
  return kExitOk;
}

void CmdExportReport(const std::vector<std::string> &run_dirs, const std::string &output_dir,
                     std::ostream &out) {
  if (run_dirs.empty()) throw UsageError("export-report needs at least one run directory");
  fs::create_directories(output_dir);
  std::ofstream summary = OpenOutput(fs::path(output_dir) / "summary.csv");
  std::ofstream curves = OpenOutput(fs::path(output_dir) / "curves.csv");
  const std::vector<std::string> columns = {
      "mode",          "embedding",        "seed",           "epochs_run",
      "best_epoch",    "pol_dev_accuracy", "pol_test_accuracy", "subj_dev_accuracy",
      "subj_test_accuracy"};
  summary << "run";
  for (const std::string &c : columns) summary << "," << c;
  summary << "\n";
  curves << "run,epoch,split,task,loss,accuracy\n";
  for (const std::string &run : run_dirs) {
    const auto report = ReadKeyValues(fs::path(run) / "report.txt");
    summary << run;
    for (const std::string &c : columns) {
      const auto it = report.find(c);
      summary << "," << (it == report.end() ? "" : it->second);
    }
    summary << "\n";
    std::ifstream metrics(fs::path(run) / "metrics.csv");
    if (!metrics) throw IoError("cannot read " + (fs::path(run) / "metrics.csv").string());
    std::string line;
    std::getline(metrics, line);
    while (std::getline(metrics, line)) {
      if (!line.empty()) curves << run << "," << line << "\n";
    }
  }
  out << "wrote " << run_dirs.size() << " runs to " << (fs::path(output_dir) / "summary.csv")
      << " and " << (fs::path(output_dir) / "curves.csv") << "\n";
}

void CmdSynth(const std::string &dir, const SurrogateSpec &spec, std::ostream &out) {
  const CorpusPaths paths = WriteSurrogateCorpus(dir, spec);
  out << "wrote " << paths.pol_pos << ", " << paths.pol_neg << ", " << paths.subj << ", "
      << paths.obj << "\n"
      << "word vectors: " << SurrogateGlovePath(dir, spec.glove_dim) << "\n";
}

}  // namespace mtss
