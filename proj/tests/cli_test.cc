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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "mtss/binary_io.h"
#include "mtss/cli/checkpoint.h"
#include "mtss/cli/commands.h"
#include "mtss/cli/experiment.h"
#include "mtss/cli/gradcheck_suite.h"
#include "mtss/cli/prepare.h"
#include "mtss/data/embedding_file.h"
#include "mtss/data/synthetic.h"
#include "mtss/errors.h"
#include "mtss/tensor/ops.h"
#include "test_util.h"

namespace mtss {
namespace {

using testing::ReadFile;
using testing::TempDir;
using testing::WriteFile;
namespace fs = std::filesystem;

// Small corpus and a model small enough to train in a second.
ExperimentConfig SmallExperiment(const TempDir &dir, int64_t per_class = 80) {
  SurrogateSpec spec;
  spec.pol_per_class = per_class;
  spec.subj_per_class = per_class;
  spec.vocab = 600;
  spec.glove_dim = 8;
  WriteSurrogateCorpus(dir.File("data"), spec);
  ExperimentConfig c;
  c.data_dir = dir.File("data");
  c.out_dir = dir.File("runs");
  c.model.pol_max_len = 12;
  c.model.subj_max_len = 14;
  c.model.emb_dim = 8;
  c.model.hidden = 4;
  c.model.tdfc_dim = 4;
  c.model.attn_fc_dim = 4;
  c.model.out_dim = 4;
  c.model.ntn_dim = 2;
  c.plan.epochs = 2;
  c.plan.batch_size = 16;
  return c;
}

std::vector<std::string> Lines(const std::string &text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

// --- config -----------------------------------------------------------------

TEST(ConfigTest, DefaultsRoundTrip) {
  const ExperimentConfig defaults;
  const std::string text = SerializeConfig(defaults);
  EXPECT_EQ(SerializeConfig(ParseConfig(text)), text);
}

TEST(ConfigTest, EveryKeyIsDocumented) {
  const auto lines = Lines(SerializeConfig(ExperimentConfig{}));
  ASSERT_EQ(lines.size(), 2 * ConfigKeys().size());
  for (size_t i = 0; i < lines.size(); i += 2) {
    EXPECT_EQ(lines[i].rfind("# ", 0), 0u) << lines[i];
    EXPECT_GT(lines[i].size(), 4u);
    EXPECT_EQ(lines[i + 1].rfind(ConfigKeys()[i / 2] + " = ", 0), 0u) << lines[i + 1];
  }
}

TEST(ConfigTest, RandomConfigsRoundTripLosslessly) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    ExperimentConfig c;
    c.model.hidden = 1 + static_cast<int64_t>(rng() % 500);
    c.model.dropout = unit(rng) * 0.9;
    c.model.loss_weight_subj = unit(rng);
    c.model.activation = static_cast<Activation>(rng() % 3);
    c.model.ablate_ntn = rng() % 2;
    c.plan.mode = static_cast<TrainMode>(rng() % 3);
    c.plan.seed = rng();
    c.plan.adam.learning_rate = unit(rng) * 1e-2;
    c.plan.adam.epsilon = unit(rng) * 1e-7;
    c.split.train = unit(rng);
    c.embedding = static_cast<EmbeddingMode>(rng() % 2);
    c.f64 = rng() % 2;
    c.glove_path = "vectors with spaces/g" + std::to_string(rng() % 100) + ".txt";
    c.subj_per_class = -1 - static_cast<int64_t>(rng() % 2);
    const ExperimentConfig back = ParseConfig(SerializeConfig(c));
    EXPECT_EQ(back.model.dropout, c.model.dropout);
    EXPECT_EQ(back.plan.adam.learning_rate, c.plan.adam.learning_rate);
    EXPECT_EQ(back.plan.adam.epsilon, c.plan.adam.epsilon);
    EXPECT_EQ(back.split.train, c.split.train);
    EXPECT_EQ(back.plan.seed, c.plan.seed);
    EXPECT_EQ(back.glove_path, c.glove_path);
    EXPECT_EQ(SerializeConfig(back), SerializeConfig(c));
  }
}

TEST(ConfigTest, PartialFileKeepsBaseValues) {
  ExperimentConfig base;
  base.plan.epochs = 7;
  const ExperimentConfig c = ParseConfig("# comment\n\n  hidden = 32  \nmode=single-subj\n", base);
  EXPECT_EQ(c.model.hidden, 32);
  EXPECT_EQ(c.plan.mode, TrainMode::kSingleSubj);
  EXPECT_EQ(c.plan.epochs, 7);
}

TEST(ConfigTest, ErrorsNameTheLine) {
  try {
    ParseConfig("hidden = 4\n\nhiden = 5\n");
    FAIL();
  } catch (const ConfigError &e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("hiden"), std::string::npos);
  }
  EXPECT_THROW(ParseConfig("hidden = four\n"), ConfigError);
  EXPECT_THROW(ParseConfig("dropout = 0.3x\n"), ConfigError);
  EXPECT_THROW(ParseConfig("f64 = maybe\n"), ConfigError);
  EXPECT_THROW(ParseConfig("just words\n"), ConfigError);
  EXPECT_THROW(ParseConfig("mode = both\n"), ConfigError);
}

TEST(ConfigTest, LaterSettingsWin) {
  ExperimentConfig c = ParseConfig("seed = 3\n");
  SetConfigValue(c, "seed", "9");
  EXPECT_EQ(c.plan.seed, 9u);
}

TEST(ConfigTest, ValidateChecksEmbeddingFiles) {
  ExperimentConfig c;
  c.embedding = EmbeddingMode::kBertFile;
  EXPECT_THROW(c.Validate(), ConfigError);
  c.pol_embeddings = "p.mtss";
  c.subj_embeddings = "s.mtss";
  EXPECT_NO_THROW(c.Validate());
  c.plan.mode = TrainMode::kSinglePol;
  c.subj_embeddings.clear();
  EXPECT_NO_THROW(c.Validate());
}

TEST(ConfigTest, CorpusPathsResolveInsideDataDir) {
  ExperimentConfig c;
  c.data_dir = "/corpora";
  c.subj = "/elsewhere/quotes.txt";
  const CorpusPaths p = c.ResolvedCorpusPaths();
  EXPECT_EQ(p.pol_pos, "/corpora/rt-polarity.pos");
  EXPECT_EQ(p.obj, "/corpora/plot.tok.gt9.5000");
  EXPECT_EQ(p.subj, "/elsewhere/quotes.txt");
}

// --- checkpoint -------------------------------------------------------------

template <typename T>
std::unique_ptr<MtssModel<T>> TinyModel(TrainMode mode, uint64_t seed) {
  ModelConfig c;
  c.pol_max_len = c.subj_max_len = 3;
  c.emb_dim = c.hidden = c.tdfc_dim = c.attn_fc_dim = c.out_dim = c.ntn_dim = 2;
  auto model = std::make_unique<MtssModel<T>>(c, mode, EmbeddingMode::kGlove,
                                              std::array<int64_t, 2>{7, 9});
  model->Initialize(seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (auto &entry : model->parameters().entries()) {
    for (T &v : entry.tensor.data()) v += static_cast<T>(noise(rng));
  }
  return model;
}

template <typename T>
void ExpectBitEqual(const MtssModel<T> &a, const MtssModel<T> &b) {
  ASSERT_EQ(a.parameters().size(), b.parameters().size());
  for (size_t i = 0; i < a.parameters().size(); ++i) {
    const auto x = a.parameters().entries()[i].tensor.data();
    const auto y = b.parameters().entries()[i].tensor.data();
    ASSERT_EQ(x.size(), y.size());
    EXPECT_EQ(std::memcmp(x.data(), y.data(), x.size() * sizeof(T)), 0)
        << a.parameters().entries()[i].name;
  }
}

template <typename T>
void RoundTrip() {
  TempDir dir;
  auto model = TinyModel<T>(TrainMode::kMtl, 3);
  EvalResult dev;
  dev.present = {true, true};
  dev.tasks[0].accuracy = 0.625;
  dev.tasks[1].loss = 0.4;
  SaveCheckpoint(dir.File("a.mtsk"), CaptureCheckpoint(*model, "hidden = 2\n", 4, dev));
  const Checkpoint loaded = LoadCheckpoint(dir.File("a.mtsk"));
  EXPECT_EQ(loaded.epoch, 4);
  EXPECT_EQ(loaded.config_text, "hidden = 2\n");
  EXPECT_EQ(loaded.dev.tasks[0].accuracy, 0.625);
  EXPECT_EQ(loaded.dev.tasks[1].loss, 0.4);
  EXPECT_FALSE(loaded.has_optimizer);

  auto other = TinyModel<T>(TrainMode::kMtl, 99);
  RestoreParameters(*other, loaded);
  ExpectBitEqual(*model, *other);
  SaveCheckpoint(dir.File("b.mtsk"), loaded);
  EXPECT_EQ(ReadFile(dir.File("a.mtsk")), ReadFile(dir.File("b.mtsk")));
}

TEST(CheckpointTest, RoundTripIsBitExactF32) { RoundTrip<float>(); }
TEST(CheckpointTest, RoundTripIsBitExactF64) { RoundTrip<double>(); }

TEST(CheckpointTest, HeaderBytesFollowTheLayout) {
  auto model = TinyModel<float>(TrainMode::kSinglePol, 1);
  const std::string bytes = EncodeCheckpoint(CaptureCheckpoint(*model, "", 0, {}));
  EXPECT_EQ(bytes.substr(0, 4), "MTSK");
  uint32_t version = 0, count = 0;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&count, bytes.data() + 8, 4);
  EXPECT_EQ(version, 1u);
  EXPECT_EQ(count, model->parameters().size());
  uint16_t name_length = 0;
  std::memcpy(&name_length, bytes.data() + 12, 2);
  const std::string first = model->parameters().entries()[0].name;
  EXPECT_EQ(bytes.substr(14, name_length), first);
}

TEST(CheckpointTest, OptimizerStateRoundTrips) {
  auto model = TinyModel<double>(TrainMode::kMtl, 2);
  Adam<double> adam(model->parameters(), {});
  for (auto &entry : model->parameters().entries()) {
    for (double &g : entry.tensor.mutable_grad()) g = 0.25;
  }
  adam.Step();
  adam.Step();
  const Checkpoint ckpt = DecodeCheckpoint(EncodeCheckpoint(CaptureCheckpoint(*model, "", 1, {}, &adam)));
  ASSERT_TRUE(ckpt.has_optimizer);
  Adam<double> restored(model->parameters(), {});
  ASSERT_TRUE(RestoreOptimizer(restored, ckpt));
  EXPECT_EQ(restored.step_count(), 2);
  EXPECT_EQ(restored.first_moment(), adam.first_moment());
  EXPECT_EQ(restored.second_moment(), adam.second_moment());
  for (size_t i = 0; i < model->parameters().size(); ++i) {
    EXPECT_EQ(static_cast<int64_t>(restored.first_moment()[i].size()),
              model->parameters().entries()[i].tensor.size());
  }

  const Checkpoint without = DecodeCheckpoint(EncodeCheckpoint(CaptureCheckpoint(*model, "", 1, {})));
  EXPECT_FALSE(RestoreOptimizer(restored, without));
}

TEST(CheckpointTest, EveryTruncationIsAFormatError) {
  auto model = TinyModel<float>(TrainMode::kSingleSubj, 4);
  Adam<float> adam(model->parameters(), {});
  const std::string bytes = EncodeCheckpoint(CaptureCheckpoint(*model, "seed = 1\n", 2, {}, &adam));
  for (size_t n = 0; n < bytes.size(); ++n) {
    EXPECT_THROW(DecodeCheckpoint(std::string_view(bytes).substr(0, n)), FormatError) << n;
  }
  EXPECT_NO_THROW(DecodeCheckpoint(bytes));
}

TEST(CheckpointTest, BadMagicAndVersion) {
  auto model = TinyModel<float>(TrainMode::kSinglePol, 4);
  std::string bytes = EncodeCheckpoint(CaptureCheckpoint(*model, "", 0, {}));
  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(DecodeCheckpoint(bad), FormatError);
  bad = bytes;
  bad[4] = 2;
  try {
    DecodeCheckpoint(bad);
    FAIL();
  } catch (const FormatError &e) {
    EXPECT_NE(std::string(e.what()).find("version 2"), std::string::npos) << e.what();
  }
}

TEST(CheckpointTest, UnknownSectionsAreSkippedWithWarning) {
  auto model = TinyModel<double>(TrainMode::kMtl, 6);
  std::string bytes = EncodeCheckpoint(CaptureCheckpoint(*model, "x = 1\n", 5, {}));
  std::ostringstream extra;
  extra.write("NEWS", 4);
  WriteLE<uint64_t>(extra, 3);
  extra << "abc";
  bytes.insert(bytes.size() - 12, extra.str());
  std::vector<std::string> warnings;
  const Checkpoint ckpt = DecodeCheckpoint(bytes, &warnings);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("NEWS"), std::string::npos);
  EXPECT_EQ(ckpt.epoch, 5);
  auto other = TinyModel<double>(TrainMode::kMtl, 0);
  RestoreParameters(*other, ckpt);
  ExpectBitEqual(*model, *other);
}

TEST(CheckpointTest, MismatchedConfigNamesFirstTensor) {
  auto model = TinyModel<double>(TrainMode::kMtl, 1);
  const Checkpoint ckpt = CaptureCheckpoint(*model, "", 0, {});
  ModelConfig wider = model->config();
  wider.hidden = 3;
  MtssModel<double> other(wider, TrainMode::kMtl, EmbeddingMode::kGlove, {7, 9});
  try {
    RestoreParameters(other, ckpt);
    FAIL();
  } catch (const DimensionError &e) {
    EXPECT_NE(std::string(e.what()).find("'pol.lstm_fwd.W_x'"), std::string::npos) << e.what();
  }
  MtssModel<double> bigger_vocab(model->config(), TrainMode::kMtl, EmbeddingMode::kGlove, {8, 9});
  try {
    RestoreParameters(bigger_vocab, ckpt);
    FAIL();
  } catch (const DimensionError &e) {
    EXPECT_NE(std::string(e.what()).find("'pol.embedding'"), std::string::npos) << e.what();
  }
}

TEST(CheckpointTest, UnknownTensorIsAFormatError) {
  auto mtl = TinyModel<double>(TrainMode::kMtl, 1);
  auto single = TinyModel<double>(TrainMode::kSinglePol, 1);
  EXPECT_THROW(RestoreParameters(*single, CaptureCheckpoint(*mtl, "", 0, {})), FormatError);
  EXPECT_THROW(RestoreParameters(*mtl, CaptureCheckpoint(*single, "", 0, {})), DimensionError);
}

// --- prepare ----------------------------------------------------------------

TEST(PrepareTest, TenThousandRecordsGiveTheStandardSplit) {
  TempDir dir;
  ExperimentConfig c = SmallExperiment(dir, 5000);
  std::ostringstream log;
  const PreparedData data = Prepare(c, log);
  for (Task task : kAllTasks) {
    const Splits &s = data.task(task).splits;
    EXPECT_EQ(s.train.size(), 7200u);
    EXPECT_EQ(s.dev.size(), 800u);
    EXPECT_EQ(s.test.size(), 2000u);
    std::set<int64_t> all(s.train.begin(), s.train.end());
    all.insert(s.dev.begin(), s.dev.end());
    all.insert(s.test.begin(), s.test.end());
    EXPECT_EQ(all.size(), 10000u);
    const std::string name(TaskName(task));
    EXPECT_EQ(Lines(ReadFile(dir.File("runs/prepared/" + name + ".manifest.dev"))).size(), 800u);
    EXPECT_EQ(Lines(ReadFile(dir.File("runs/prepared/" + name + ".sentences.txt"))).size(),
              10000u);
  }
}

TEST(PrepareTest, RerunIsByteIdenticalAndUsesCache) {
  TempDir dir;
  ExperimentConfig c = SmallExperiment(dir);
  std::ostringstream log;
  Prepare(c, log);
  const std::string names[] = {"pol.manifest.train", "pol.manifest.test", "subj.manifest.dev",
                               "pol.vocab.tsv", "subj.cache"};
  std::vector<std::string> first;
  for (const auto &n : names) first.push_back(ReadFile(dir.File("runs/prepared/" + n)));
  fs::remove_all(dir.File("runs"));
  Prepare(c, log);
  for (size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(ReadFile(dir.File("runs/prepared/" + names[i])), first[i]) << names[i];
  }
  const PreparedData cached = Prepare(c, log);
  EXPECT_TRUE(cached.task(Task::kPolarity).from_cache);
  EXPECT_TRUE(cached.task(Task::kSubjectivity).from_cache);

  ExperimentConfig other = c;
  other.plan.seed = 2;
  other.out_dir = dir.File("runs2");
  Prepare(other, log);
  EXPECT_NE(ReadFile(dir.File("runs2/prepared/pol.manifest.train")), first[0]);
}

TEST(PrepareTest, CorruptedCacheIsRegeneratedWithWarning) {
  TempDir dir;
  ExperimentConfig c = SmallExperiment(dir);
  std::ostringstream log;
  const PreparedData fresh = Prepare(c, log);
  const std::string path = dir.File("runs/prepared/pol.cache");
  std::string bytes = ReadFile(path);
  bytes[bytes.size() - 5] ^= 0x40;
  WriteFile(path, bytes);

  std::ostringstream second_log;
  const PreparedData again = Prepare(c, second_log);
  EXPECT_NE(second_log.str().find("warning"), std::string::npos);
  EXPECT_NE(second_log.str().find("pol.cache"), std::string::npos);
  EXPECT_FALSE(again.task(Task::kPolarity).from_cache);
  EXPECT_TRUE(again.task(Task::kSubjectivity).from_cache);
  EXPECT_EQ(again.task(Task::kPolarity).encoded.ids, fresh.task(Task::kPolarity).encoded.ids);
  EXPECT_EQ(again.task(Task::kPolarity).splits.test, fresh.task(Task::kPolarity).splits.test);
  EXPECT_EQ(ReadFile(path).size(), bytes.size());
  EXPECT_TRUE(Prepare(c, second_log).task(Task::kPolarity).from_cache);
}

TEST(PrepareTest, CachedDataEqualsFreshData) {
  TempDir dir;
  ExperimentConfig c = SmallExperiment(dir);
  std::ostringstream log;
  const PreparedData fresh = Prepare(c, log);
  const PreparedData cached = Prepare(c, log);
  for (Task task : kAllTasks) {
    const PreparedTask &a = fresh.task(task), &b = cached.task(task);
    EXPECT_EQ(a.encoded.ids, b.encoded.ids);
    EXPECT_EQ(a.encoded.mask, b.encoded.mask);
    EXPECT_EQ(a.encoded.labels, b.encoded.labels);
    EXPECT_EQ(a.encoded.max_len, b.encoded.max_len);
    EXPECT_EQ(a.encoded.task, b.encoded.task);
    EXPECT_EQ(a.vocab.Serialize(), b.vocab.Serialize());
    EXPECT_EQ(a.splits.dev, b.splits.dev);
  }
}

TEST(PrepareTest, ChangedSettingsInvalidateTheCache) {
  TempDir dir;
  ExperimentConfig c = SmallExperiment(dir);
  std::ostringstream log;
  Prepare(c, log);
  c.model.pol_max_len = 5;
  const PreparedData data = Prepare(c, log);
  EXPECT_FALSE(data.task(Task::kPolarity).from_cache);
  EXPECT_TRUE(data.task(Task::kSubjectivity).from_cache);
  EXPECT_EQ(data.task(Task::kPolarity).encoded.max_len, 5);
}

TEST(PrepareTest, MissingCorpusNamesThePath) {
  TempDir dir;
  ExperimentConfig c;
  c.data_dir = dir.File("nowhere");
  c.out_dir = dir.File("runs");
  std::ostringstream log;
  try {
    Prepare(c, log);
    FAIL();
  } catch (const IoError &e) {
    EXPECT_NE(std::string(e.what()).find(dir.File("nowhere/rt-polarity.pos")), std::string::npos)
        << e.what();
  }
}

TEST(PrepareTest, SingleTaskModePreparesOneTask) {
  TempDir dir;
  ExperimentConfig c = SmallExperiment(dir);
  c.plan.mode = TrainMode::kSingleSubj;
  std::ostringstream log;
  const PreparedData data = Prepare(c, log);
  EXPECT_FALSE(data.tasks[0].has_value());
  EXPECT_TRUE(data.tasks[1].has_value());
  EXPECT_FALSE(fs::exists(dir.File("runs/prepared/pol.cache")));
}

// --- train and eval ---------------------------------------------------------

struct CsvRow {
  int64_t epoch;
  std::string split, task;
  double loss, accuracy;
};

std::vector<CsvRow> ReadMetrics(const std::string &path) {
  const auto lines = Lines(ReadFile(path));
  EXPECT_FALSE(lines.empty());
  EXPECT_EQ(lines.front(), "epoch,split,task,loss,accuracy");
  std::vector<CsvRow> rows;
  for (size_t i = 1; i < lines.size(); ++i) {
    std::istringstream in(lines[i]);
    CsvRow row;
    std::string field;
    std::getline(in, field, ',');
    row.epoch = std::stoll(field);
    std::getline(in, row.split, ',');
    std::getline(in, row.task, ',');
    std::getline(in, field, ',');
    row.loss = std::stod(field);
    std::getline(in, field, ',');
    row.accuracy = std::stod(field);
    rows.push_back(row);
  }
  return rows;
}

TEST(TrainCommandTest, SinglePolarityWritesOnlyPolarityRows) {
  TempDir dir;
  ExperimentConfig c = SmallExperiment(dir);
  c.plan.mode = TrainMode::kSinglePol;
  c.plan.epochs = 3;
  std::ostringstream out;
  const TrainOutcome outcome = CmdTrain(c, {}, out);
  const auto rows = ReadMetrics(outcome.run_dir + "/metrics.csv");
  ASSERT_EQ(rows.size(), 6u);
  for (const CsvRow &r : rows) {
    EXPECT_EQ(r.task, "pol");
    EXPECT_TRUE(std::isfinite(r.loss));
    EXPECT_GT(r.loss, 0.0);
  }
  EXPECT_NE(out.str().find("test pol accuracy"), std::string::npos);
  EXPECT_EQ(out.str().find("test subj"), std::string::npos);
  EXPECT_EQ(ReadFile(outcome.run_dir + "/curves.csv").substr(0, 61),
            "epoch,pol_train_loss,pol_train_accuracy,pol_dev_loss,pol_dev_");
}

TEST(TrainCommandTest, EveryEpochGivesOneTrainAndOneDevRowPerTask) {
  TempDir dir;
  ExperimentConfig c = SmallExperiment(dir);
  c.plan.epochs = 4;
  std::ostringstream out;
  const TrainOutcome outcome = CmdTrain(c, {}, out);
  const auto rows = ReadMetrics(outcome.run_dir + "/metrics.csv");
  for (const char *task : {"pol", "subj"}) {
    for (const char *split : {"train", "dev"}) {
      int64_t count = 0;
      for (const CsvRow &r : rows) count += r.task == task && r.split == split;
      EXPECT_EQ(count, 4) << task << " " << split;
    }
  }
  for (const CsvRow &r : rows) {
    EXPECT_TRUE(std::isfinite(r.loss));
    EXPECT_GT(r.loss, 0.0);
    EXPECT_GE(r.accuracy, 0.0);
    EXPECT_LE(r.accuracy, 1.0);
  }
  EXPECT_EQ(Lines(ReadFile(outcome.run_dir + "/curves.csv")).size(), 5u);
  for (const char *file : {"checkpoint.mtsk", "config.txt", "report.txt"}) {
    EXPECT_TRUE(fs::exists(outcome.run_dir + "/" + file)) << file;
  }
  EXPECT_EQ(ParseConfig(ReadFile(outcome.run_dir + "/config.txt")).plan.epochs, 4);
}

std::string TestLines(const std::string &text) {
  std::string out;
  for (const std::string &line : Lines(text)) {
    if (line.rfind("test ", 0) == 0) out += line + "\n";
  }
  return out;
}

TEST(TrainCommandTest, EvalReproducesTrainTestAccuracy) {
  for (bool f64 : {false, true}) {
    TempDir dir;
    ExperimentConfig c = SmallExperiment(dir);
    c.f64 = f64;
    std::ostringstream train_out;
    const TrainOutcome outcome = CmdTrain(c, {}, train_out);
    EvalOptions options;
    options.checkpoint = outcome.run_dir + "/checkpoint.mtsk";
    std::ostringstream first, second;
    const EvalResult result = CmdEval(options, first);
    CmdEval(options, second);
    EXPECT_EQ(first.str(), second.str());
    EXPECT_TRUE(result.present[0] && result.present[1]);
    EXPECT_EQ(TestLines(first.str()), TestLines(train_out.str()));
    EXPECT_EQ(Lines(TestLines(first.str())).size(), 2u);
    EXPECT_EQ(result.tasks[0].accuracy, outcome.result.test.tasks[0].accuracy);
    EXPECT_EQ(result.tasks[1].accuracy, outcome.result.test.tasks[1].accuracy);
    EXPECT_NE(first.str().find("pol confusion"), std::string::npos);
    EXPECT_NE(first.str().find("subj confusion"), std::string::npos);
  }
}

TEST(TrainCommandTest, MachineOutputIsOneRow) {
  TempDir dir;
  ExperimentConfig c = SmallExperiment(dir);
  c.plan.epochs = 1;
  std::ostringstream train_out;
  const TrainOutcome outcome = CmdTrain(c, {}, train_out);
  EvalOptions options;
  options.checkpoint = outcome.run_dir + "/checkpoint.mtsk";
  options.machine = true;
  options.split = SplitKind::kDev;
  std::ostringstream out;
  const EvalResult r = CmdEval(options, out);
  const auto lines = Lines(out.str());
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0].rfind("split=dev pol_accuracy=" + FormatNumber(r.tasks[0].accuracy), 0), 0u)
      << lines[0];
  EXPECT_NE(lines[0].find("subj_accuracy="), std::string::npos);
}

TEST(TrainCommandTest, TwoRunsProduceIdenticalMetrics) {
  TempDir dir;
  ExperimentConfig c = SmallExperiment(dir);
  c.plan.epochs = 3;
  std::ostringstream out;
  const TrainOutcome a = CmdTrain(c, {}, out);
  const TrainOutcome b = CmdTrain(c, {}, out);
  EXPECT_NE(a.run_dir, b.run_dir);
  EXPECT_EQ(fs::path(b.run_dir).parent_path(), fs::path(a.run_dir));
  EXPECT_EQ(ReadFile(a.run_dir + "/metrics.csv"), ReadFile(b.run_dir + "/metrics.csv"));
  EXPECT_EQ(ReadFile(a.run_dir + "/checkpoint.mtsk"), ReadFile(b.run_dir + "/checkpoint.mtsk"));
  EXPECT_EQ(a.result.test.tasks[0].accuracy, b.result.test.tasks[0].accuracy);
  EXPECT_EQ(a.result.test.tasks[1].accuracy, b.result.test.tasks[1].accuracy);
}

TEST(TrainCommandTest, ResumeWithoutOptimizerStateWarns) {
  TempDir dir;
  ExperimentConfig c = SmallExperiment(dir);
  c.plan.epochs = 1;
  std::ostringstream out;
  const TrainOutcome first = CmdTrain(c, {}, out);
  Checkpoint ckpt = LoadCheckpoint(first.run_dir + "/checkpoint.mtsk");
  ASSERT_TRUE(ckpt.has_optimizer);
  ckpt.has_optimizer = false;
  SaveCheckpoint(dir.File("bare.mtsk"), ckpt);

  std::ostringstream resumed;
  CmdTrain(c, {dir.File("bare.mtsk")}, resumed);
  EXPECT_NE(resumed.str().find("fresh Adam state"), std::string::npos) << resumed.str();
  std::ostringstream full;
  CmdTrain(c, {first.run_dir + "/checkpoint.mtsk"}, full);
  EXPECT_EQ(full.str().find("fresh Adam state"), std::string::npos);
  EXPECT_NE(full.str().find("resumed from"), std::string::npos);
}

TEST(TrainCommandTest, GloveWidthMismatchIsAConfigError) {
  TempDir dir;
  ExperimentConfig c = SmallExperiment(dir);
  c.glove_path = SurrogateGlovePath(c.data_dir, 8);
  c.model.emb_dim = 6;
  std::ostringstream out;
  EXPECT_THROW(CmdTrain(c, {}, out), ConfigError);
  EXPECT_FALSE(fs::exists(dir.File("runs/metrics.csv")));
  c.model.emb_dim = 8;
  CmdTrain(c, {}, out);
  EXPECT_NE(out.str().find("words found in"), std::string::npos);
}

void WriteRandomEmbeddings(const std::string &path, int64_t count, int64_t steps, int64_t dim) {
  std::mt19937_64 rng(count);
  std::uniform_real_distribution<float> value(-1.0f, 1.0f);
  std::vector<EmbeddingRecord> records(count);
  for (EmbeddingRecord &r : records) {
    for (int64_t i = 0; i < steps * dim; ++i) r.values.push_back(value(rng));
    const int64_t length = 1 + static_cast<int64_t>(rng() % steps);
    for (int64_t t = 0; t < steps; ++t) r.mask.push_back(t < length ? 1 : 0);
  }
  EmbeddingFileHeader header;
  header.count = static_cast<uint32_t>(count);
  header.max_len = static_cast<uint32_t>(steps);
  header.dim = static_cast<uint32_t>(dim);
  WriteEmbeddingFile(path, header, records);
}

TEST(TrainCommandTest, EmbeddingFileMode) {
  TempDir dir;
  ExperimentConfig c = SmallExperiment(dir);
  c.embedding = EmbeddingMode::kBertFile;
  c.pol_embeddings = dir.File("pol.mtss");
  c.subj_embeddings = dir.File("subj.mtss");
  WriteRandomEmbeddings(c.pol_embeddings, 160, 12, 8);
  WriteRandomEmbeddings(c.subj_embeddings, 160, 14, 8);
  std::ostringstream out;
  const TrainOutcome outcome = CmdTrain(c, {}, out);
  EXPECT_EQ(outcome.result.test.tasks[0].count, 32);
  const Checkpoint ckpt = LoadCheckpoint(outcome.run_dir + "/checkpoint.mtsk");
  for (const CheckpointTensor &t : ckpt.tensors) {
    EXPECT_EQ(t.name.find("embedding"), std::string::npos) << t.name;
  }

  WriteRandomEmbeddings(c.subj_embeddings, 160, 14, 6);
  EXPECT_THROW(CmdTrain(c, {}, out), ConfigError);
  WriteRandomEmbeddings(c.subj_embeddings, 160, 10, 8);
  EXPECT_THROW(CmdTrain(c, {}, out), ConfigError);
  WriteRandomEmbeddings(c.subj_embeddings, 150, 14, 8);
  EXPECT_THROW(CmdTrain(c, {}, out), FormatError);
}

TEST(TrainCommandTest, EvalOnMismatchedConfigNamesTensor) {
  TempDir dir;
  ExperimentConfig c = SmallExperiment(dir);
  c.plan.epochs = 1;
  std::ostringstream out;
  const TrainOutcome outcome = CmdTrain(c, {}, out);
  EvalOptions options;
  options.checkpoint = outcome.run_dir + "/checkpoint.mtsk";
  options.overrides = {"hidden=5"};
  try {
    CmdEval(options, out);
    FAIL();
  } catch (const DimensionError &e) {
    EXPECT_NE(std::string(e.what()).find("'pol.lstm_fwd.W_x'"), std::string::npos) << e.what();
  }
}

TEST(ExportReportTest, CollectsRuns) {
  TempDir dir;
  ExperimentConfig c = SmallExperiment(dir);
  c.plan.epochs = 2;
  std::ostringstream out;
  const TrainOutcome a = CmdTrain(c, {}, out);
  c.plan.mode = TrainMode::kSingleSubj;
  const TrainOutcome b = CmdTrain(c, {}, out);
  CmdExportReport({a.run_dir, b.run_dir}, dir.File("report"), out);
  const auto summary = Lines(ReadFile(dir.File("report/summary.csv")));
  ASSERT_EQ(summary.size(), 3u);
  EXPECT_EQ(summary[0].rfind("run,mode,embedding,seed", 0), 0u);
  EXPECT_NE(summary[1].find(",mtl,glove,1,2,"), std::string::npos) << summary[1];
  EXPECT_NE(summary[2].find(",single-subj,"), std::string::npos);
  const auto curves = Lines(ReadFile(dir.File("report/curves.csv")));
  EXPECT_EQ(curves.size(), 1u + 8u + 4u);
  EXPECT_THROW(CmdExportReport({dir.File("missing")}, dir.File("r2"), out), IoError);
}

// --- gradcheck and exit codes -----------------------------------------------

TEST(GradcheckCommandTest, StandardSuitePasses) {
  const auto rows = RunGradCheckSuite(StandardGradCheckSuite());
  std::set<std::string> names;
  for (const GradCheckRow &row : rows) {
    EXPECT_TRUE(row.passed) << row.name << " " << row.max_relative_error << " " << row.error;
    EXPECT_GT(row.coordinates, 0) << row.name;
    names.insert(row.name);
  }
  for (const char *name : {"op/matmul", "op/bilinear", "op/gather_rows", "layer/self_attention",
                           "layer/bilstm", "layer/ntn", "model/mtl/glove"}) {
    EXPECT_TRUE(names.count(name)) << name;
  }
}

// x^2 with the backward rule of x (a factor of 2 short).
Tensor<double> BrokenSquare(Tape<double> &tape, const Tensor<double> &x) {
  std::vector<double> values(x.size());
  for (int64_t i = 0; i < x.size(); ++i) values[i] = x[i] * x[i];
  Tensor<double> out = Tensor<double>::FromData(x.shape(), std::move(values));
  if (tape.ShouldRecord({&x})) {
    out.set_requires_grad(true, false);
    tape.Record("broken_square", {x}, out, [x = x, out]() mutable {
      auto g = out.grad();
      auto gx = x.mutable_grad();
      for (size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * x[i];
    });
  }
  return out;
}

TEST(GradcheckCommandTest, CorruptedBackwardRuleFails) {
  std::vector<GradCheckCase> cases = StandardGradCheckSuite();
  cases.resize(2);
  cases.push_back({"op/broken_square", [] {
                     std::vector<Tensor<double>> in = {
                         Tensor<double>::FromData({2, 2}, {0.3, -0.7, 1.1, 0.5}, true)};
                     return GradCheck([&](Tape<double> &t) { return Sum(t, BrokenSquare(t, in[0])); },
                                      in);
                   }});
  const auto rows = RunGradCheckSuite(cases);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_TRUE(rows[0].passed);
  EXPECT_FALSE(rows[2].passed);
  EXPECT_NEAR(rows[2].max_relative_error, 0.5, 1e-6);
  std::ostringstream table;
  PrintGradCheckTable(table, rows);
  EXPECT_NE(table.str().find("op/broken_square"), std::string::npos);
  EXPECT_NE(table.str().find("FAIL"), std::string::npos);
  EXPECT_NE(table.str().find("2 of 3 checks passed"), std::string::npos);
}

TEST(GradcheckCommandTest, ThrowingCaseIsReportedAsFailure) {
  const auto rows = RunGradCheckSuite(
      {{"throws", []() -> GradCheckReport { throw NumericalError("tanh produced NaN"); }}});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].passed);
  EXPECT_EQ(rows[0].error, "tanh produced NaN");
}

TEST(ExitCodeTest, ErrorClassesMapToDocumentedCodes) {
  EXPECT_EQ(ExitCodeFor(ConfigError("x")), 1);
  EXPECT_EQ(ExitCodeFor(UsageError("x")), 1);
  EXPECT_EQ(ExitCodeFor(DimensionError("x")), 1);
  EXPECT_EQ(ExitCodeFor(IoError("x")), 2);
  EXPECT_EQ(ExitCodeFor(FormatError("x")), 2);
  EXPECT_EQ(ExitCodeFor(NumericalError("x")), 3);
}

}  // namespace
}  // namespace mtss
