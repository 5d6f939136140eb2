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

// mtss: prepare, train, eval, gradcheck, export-report, synth, config.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mtss/cli/commands.h"
#include "mtss/cli/experiment.h"
#include "mtss/errors.h"

namespace {

// Flags shared by every command that takes an experiment config.
struct CommonFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> embedding;
  std::optional<std::string> out;
  bool f64 = false;
  std::vector<std::string> settings;

  void Attach(CLI::App *app) {
    app->add_option("--config", config_path, "Config file (key = value lines)");
    app->add_option("--seed", seed, "Experiment seed");
    app->add_option("--mode", mode, "single-pol, single-subj or mtl");
    app->add_option("--embedding", embedding, "glove or bert-file");
    app->add_option("--out", out, "Output directory");
    app->add_flag("--f64", f64, "Use 64-bit floating point");
    app->add_option("--set", settings, "Override any config key: --set key=value")
        ->take_all();
  }

  // Defaults, then the config file, then flags.
  mtss::ExperimentConfig Resolve() const {
    mtss::ExperimentConfig config =
        config_path.empty() ? mtss::ExperimentConfig{} : mtss::LoadConfigFile(config_path);
    for (const std::string &item : settings) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw mtss::ConfigError("--set expects key=value, got '" + item + "'");
      }
      mtss::SetConfigValue(config, item.substr(0, eq), item.substr(eq + 1));
    }
    if (seed) config.plan.seed = *seed;
    if (mode) config.plan.mode = mtss::ParseMode(*mode);
    if (embedding) config.embedding = mtss::ParseEmbedding(*embedding);
    if (out) config.out_dir = *out;
    if (f64) config.f64 = true;
    return config;
  }
};

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Multitask polarity and subjectivity classifier"};
  app.require_subcommand(1);

  CommonFlags prepare_flags, train_flags, config_flags;
  auto *prepare = app.add_subcommand("prepare", "Sample, split, and encode the corpora");
  prepare_flags.Attach(prepare);

  auto *train = app.add_subcommand("train", "Train and write metrics plus the best checkpoint");
  train_flags.Attach(train);
  mtss::TrainOptions train_options;
  train->add_option("--resume", train_options.resume, "Start from this checkpoint");

  auto *eval = app.add_subcommand("eval", "Evaluate a checkpoint on one split");
  mtss::EvalOptions eval_options;
  std::string split_name = "test";
  eval->add_option("--checkpoint", eval_options.checkpoint, "Checkpoint file")->required();
  eval->add_option("--split", split_name, "train, dev or test");
  eval->add_flag("--machine", eval_options.machine, "Print one key=value summary row");
  eval->add_option("--set", eval_options.overrides, "Override a saved config key: --set key=value")
      ->take_all();

  auto *gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of every layer");

  auto *report = app.add_subcommand("export-report", "Collect run directories into CSV files");
  std::vector<std::string> runs;
  std::string report_dir = "report";
  report->add_option("--runs", runs, "Run directories")->required();
  report->add_option("--output", report_dir, "Directory for summary.csv and curves.csv");

  auto *synth = app.add_subcommand("synth", "Write a surrogate corpus with word vectors");
  mtss::SurrogateSpec synth_spec;
  std::string synth_dir = "data";
  synth->add_option("--dir", synth_dir, "Output directory");
  synth->add_option("--seed", synth_spec.seed, "Generator seed");
  synth->add_option("--glove-dim", synth_spec.glove_dim, "Word vector width");
  synth->add_option("--pol-per-class", synth_spec.pol_per_class, "Lines per polarity file");
  synth->add_option("--subj-per-class", synth_spec.subj_per_class,
                    "Lines per subjectivity file");
  synth->add_option("--vocab", synth_spec.vocab, "Lexicon size");

  auto *config = app.add_subcommand("config", "Print the effective config with documentation");
  config_flags.Attach(config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? mtss::kExitOk : mtss::kExitUsage;
  }

  try {
    if (*prepare) {
      mtss::CmdPrepare(prepare_flags.Resolve(), std::cout);
    } else if (*train) {
      mtss::CmdTrain(train_flags.Resolve(), train_options, std::cout);
    } else if (*eval) {
      eval_options.split = mtss::ParseSplit(split_name);
      mtss::CmdEval(eval_options, std::cout);
    } else if (*gradcheck) {
      return mtss::CmdGradcheck(std::cout);
    } else if (*report) {
      mtss::CmdExportReport(runs, report_dir, std::cout);
    } else if (*synth) {
      mtss::CmdSynth(synth_dir, synth_spec, std::cout);
    } else if (*config) {
      const mtss::ExperimentConfig resolved = config_flags.Resolve();
      resolved.Validate();
      std::cout << mtss::SerializeConfig(resolved);
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return mtss::ExitCodeFor(e);
  }
  return mtss::kExitOk;
}
