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

#include "mtss/cli/experiment.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "mtss/errors.h"

namespace mtss {
namespace {

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename Int>
Int ParseInt(std::string_view key, std::string_view text) {
  Int value{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ConfigError("'" + std::string(key) + "' expects an integer, got '" + std::string(text) +
                      "'");
  }
  return value;
}

double ParseDouble(std::string_view key, std::string_view text) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + std::string(text) +
                      "'");
  }
  return value;
}

bool ParseBool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("'" + std::string(key) + "' expects true or false, got '" + std::string(text) +
                    "'");
}

struct Field {
  const char *key;
  const char *doc;
  std::function<std::string(const ExperimentConfig &)> get;
  std::function<void(ExperimentConfig &, std::string_view)> set;
};

#define MTSS_INT_FIELD(KEY, DOC, MEMBER)                                                 \
  Field {                                                                                \
    KEY, DOC, [](const ExperimentConfig &c) { return std::to_string(c.MEMBER); },        \
        [](ExperimentConfig &c, std::string_view v) {                                    \
          c.MEMBER = ParseInt<decltype(c.MEMBER)>(KEY, v);                               \
        }                                                                                \
  }
#define MTSS_DOUBLE_FIELD(KEY, DOC, MEMBER)                                                    \
  Field {                                                                                      \
    KEY, DOC, [](const ExperimentConfig &c) { return FormatDouble(c.MEMBER); },                \
        [](ExperimentConfig &c, std::string_view v) { c.MEMBER = ParseDouble(KEY, v); }        \
  }
#define MTSS_BOOL_FIELD(KEY, DOC, MEMBER)                                                       \
  Field {                                                                                       \
    KEY, DOC, [](const ExperimentConfig &c) { return std::string(c.MEMBER ? "true" : "false"); }, \
        [](ExperimentConfig &c, std::string_view v) { c.MEMBER = ParseBool(KEY, v); }           \
  }
#define MTSS_STRING_FIELD(KEY, DOC, MEMBER)                                                 \
  Field {                                                                                   \
    KEY, DOC, [](const ExperimentConfig &c) { return c.MEMBER; },                           \
        [](ExperimentConfig &c, std::string_view v) { c.MEMBER = std::string(v); }          \
  }

const std::vector<Field> &Fields() {
  static const std::vector<Field> fields = {
      Field{"mode", "single-pol, single-subj or mtl",
            [](const ExperimentConfig &c) { return std::string(ModeName(c.plan.mode)); },
            [](ExperimentConfig &c, std::string_view v) { c.plan.mode = ParseMode(v); }},
      Field{"embedding", "glove (trainable table) or bert-file (precomputed MTSS files)",
            [](const ExperimentConfig &c) { return std::string(EmbeddingName(c.embedding)); },
            [](ExperimentConfig &c, std::string_view v) { c.embedding = ParseEmbedding(v); }},
      MTSS_INT_FIELD("seed", "experiment seed (sampling, splits, init, batches, dropout)", plan.seed),
      MTSS_BOOL_FIELD("f64", "train in 64-bit floating point", f64),
      MTSS_INT_FIELD("pol_max_len", "polarity sentence length L", model.pol_max_len),
      MTSS_INT_FIELD("subj_max_len", "subjectivity sentence length L", model.subj_max_len),
      MTSS_INT_FIELD("emb_dim", "token vector width", model.emb_dim),
      MTSS_INT_FIELD("hidden", "LSTM units per direction", model.hidden),
      MTSS_INT_FIELD("tdfc_dim", "time-distributed dense width", model.tdfc_dim),
      MTSS_INT_FIELD("attn_fc_dim", "dense width after attention (NTN input)", model.attn_fc_dim),
      MTSS_INT_FIELD("out_dim", "task representation width", model.out_dim),
      MTSS_INT_FIELD("ntn_dim", "NTN slices", model.ntn_dim),
      MTSS_DOUBLE_FIELD("dropout", "dropout rate at both dropout layers", model.dropout),
      MTSS_DOUBLE_FIELD("loss_weight_subj", "weight of the subjectivity loss", model.loss_weight_subj),
      MTSS_DOUBLE_FIELD("loss_weight_pol", "weight of the polarity loss", model.loss_weight_pol),
      MTSS_BOOL_FIELD("attention_mask", "mask padded positions in attention", model.attention_mask),
      Field{"activation", "tanh, relu or linear for the dense layers",
            [](const ExperimentConfig &c) { return std::string(ActivationName(c.model.activation)); },
            [](ExperimentConfig &c, std::string_view v) { c.model.activation = ParseActivation(v); }},
      MTSS_BOOL_FIELD("ablate_ntn", "replace the NTN output with zeros", model.ablate_ntn),
      MTSS_INT_FIELD("epochs", "training epochs", plan.epochs),
      MTSS_INT_FIELD("batch_size", "sentences per batch and task", plan.batch_size),
      MTSS_DOUBLE_FIELD("learning_rate", "Adam step size", plan.adam.learning_rate),
      MTSS_DOUBLE_FIELD("beta1", "Adam first-moment decay", plan.adam.beta1),
      MTSS_DOUBLE_FIELD("beta2", "Adam second-moment decay", plan.adam.beta2),
      MTSS_DOUBLE_FIELD("epsilon", "Adam denominator constant", plan.adam.epsilon),
      MTSS_DOUBLE_FIELD("clip_norm", "global gradient-norm clip, 0 disables", plan.adam.clip_norm),
      MTSS_BOOL_FIELD("early_stop", "stop when dev accuracy stalls", plan.early_stop),
      MTSS_INT_FIELD("patience", "epochs without improvement before stopping", plan.patience),
      MTSS_STRING_FIELD("data_dir", "directory holding the four corpus files", data_dir),
      MTSS_STRING_FIELD("pol_pos", "positive polarity file (default data_dir/rt-polarity.pos)", pol_pos),
      MTSS_STRING_FIELD("pol_neg", "negative polarity file (default data_dir/rt-polarity.neg)", pol_neg),
      MTSS_STRING_FIELD("subj", "subjective file (default data_dir/quote.tok.gt9.5000)", subj),
      MTSS_STRING_FIELD("obj", "objective file (default data_dir/plot.tok.gt9.5000)", obj),
      MTSS_INT_FIELD("pol_per_class", "polarity sentences sampled per class", pol_per_class),
      MTSS_INT_FIELD("subj_per_class", "subjectivity sentences per class, -1 for all", subj_per_class),
      MTSS_DOUBLE_FIELD("train_fraction", "share of each corpus for training", split.train),
      MTSS_DOUBLE_FIELD("dev_fraction", "share of each corpus for model selection", split.dev),
      MTSS_DOUBLE_FIELD("test_fraction", "share of each corpus for testing", split.test),
      MTSS_BOOL_FIELD("stratified", "keep class ratios equal across splits", split.stratified),
      MTSS_STRING_FIELD("glove_path", "word vector text file, empty for random vectors", glove_path),
      MTSS_STRING_FIELD("pol_embeddings", "MTSS file for polarity (bert-file mode)", pol_embeddings),
      MTSS_STRING_FIELD("subj_embeddings", "MTSS file for subjectivity (bert-file mode)", subj_embeddings),
      MTSS_STRING_FIELD("out_dir", "output directory", out_dir),
  };
  return fields;
}

#undef MTSS_INT_FIELD
#undef MTSS_DOUBLE_FIELD
#undef MTSS_BOOL_FIELD
#undef MTSS_STRING_FIELD

std::string_view Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

CorpusPaths ExperimentConfig::ResolvedCorpusPaths() const {
  namespace fs = std::filesystem;
  auto pick = [&](const std::string &explicit_path, const char *name) {
    return explicit_path.empty() ? (fs::path(data_dir) / name).string() : explicit_path;
  };
  return {pick(pol_pos, "rt-polarity.pos"), pick(pol_neg, "rt-polarity.neg"),
          pick(subj, "quote.tok.gt9.5000"), pick(obj, "plot.tok.gt9.5000")};
}

void ExperimentConfig::Validate() const {
  model.Validate();
  plan.Validate();
  if (embedding == EmbeddingMode::kBertFile) {
    for (Task task : kAllTasks) {
      if (!ModeUsesTask(plan.mode, task)) continue;
      const std::string &path = task == Task::kPolarity ? pol_embeddings : subj_embeddings;
      if (path.empty()) {
        throw ConfigError("bert-file mode needs " + std::string(TaskName(task)) +
                          "_embeddings to name an MTSS file");
      }
    }
  }
  if (pol_per_class == 0 || subj_per_class == 0) {
    throw ConfigError("per-class sample sizes must be positive (or -1 for subj)");
  }
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> keys;
  for (const Field &f : Fields()) keys.emplace_back(f.key);
  return keys;
}

void SetConfigValue(ExperimentConfig &config, std::string_view key, std::string_view value) {
  for (const Field &f : Fields()) {
    if (key == f.key) {
      f.set(config, Trim(value));
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

std::string SerializeConfig(const ExperimentConfig &config) {
  std::ostringstream out;
  for (const Field &f : Fields()) {
    out << "# " << f.doc << "\n" << f.key << " = " << f.get(config) << "\n";
  }
  return out.str();
}

ExperimentConfig ParseConfig(std::string_view text, const ExperimentConfig &base) {
  ExperimentConfig config = base;
  int line_number = 0;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
    ++line_number;
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_number) + ": expected key = value");
    }
    try {
      SetConfigValue(config, Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
    } catch (const ConfigError &e) {
      throw ConfigError("config line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return config;
}

ExperimentConfig LoadConfigFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

}  // namespace mtss
