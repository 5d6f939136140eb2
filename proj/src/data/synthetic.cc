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

#include "mtss/data/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <vector>

#include "mtss/errors.h"
#include "mtss/random.h"

namespace mtss {

int32_t MarkerToken(Task task) { return task == Task::kPolarity ? 2 : 3; }

EncodedDataset MarkerTaskDataset(Task task, const MarkerTaskSpec &spec) {
  if (spec.vocab < 6 || spec.min_len < 1 || spec.max_len < spec.min_len || spec.sentences < 2) {
    throw ConfigError("marker task needs vocab >= 6, 1 <= min_len <= max_len, 2+ sentences");
  }
  std::mt19937_64 rng = MakeRng(spec.seed, 100 + TaskIndex(task));
  std::uniform_int_distribution<int32_t> filler(4, static_cast<int32_t>(spec.vocab - 1));
  std::uniform_int_distribution<int64_t> length(spec.min_len, spec.max_len);

  std::vector<int32_t> labels(spec.sentences);
  for (int64_t i = 0; i < spec.sentences; ++i) labels[i] = static_cast<int32_t>(i % 2);
  std::shuffle(labels.begin(), labels.end(), rng);

  EncodedDataset d;
  d.task = task;
  d.max_len = spec.max_len;
  d.ids.assign(spec.sentences * spec.max_len, 0);
  d.mask.assign(spec.sentences * spec.max_len, 0);
  d.labels = labels;
  for (int64_t s = 0; s < spec.sentences; ++s) {
    const int64_t n = length(rng);
    int32_t *ids = &d.ids[s * spec.max_len];
    for (int64_t t = 0; t < n; ++t) {
      ids[t] = filler(rng);
      d.mask[s * spec.max_len + t] = 1;
    }
    if (labels[s] == 1) {
      ids[std::uniform_int_distribution<int64_t>(0, n - 1)(rng)] = MarkerToken(task);
    }
  }
  return d;
}

namespace {

enum Cue { kNeutral, kPositive, kNegative, kSubjective, kObjective };

struct Lexicon {
  std::vector<std::string> words;
  std::vector<Cue> cue;
  std::vector<double> weight;  // Zipfian by rank
};

std::string MakeWord(std::mt19937_64 &rng) {
  static const std::string kConsonants = "bcdfghjklmnprstvwyz";
  static const std::string kVowels = "aeiou";
  const int syllables = std::uniform_int_distribution<int>(1, 4)(rng);
  std::string w;
  for (int i = 0; i < syllables; ++i) {
    w += kConsonants[rng() % kConsonants.size()];
    w += kVowels[rng() % kVowels.size()];
    if (rng() % 3 == 0) w += kConsonants[rng() % kConsonants.size()];
  }
  return w;
}

Lexicon BuildLexicon(int64_t size, std::mt19937_64 &rng) {
  Lexicon lex;
  std::set<std::string> seen;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (static_cast<int64_t>(lex.words.size()) < size) {
    std::string w = MakeWord(rng);
    if (!seen.insert(w).second) continue;
    const auto rank = static_cast<int64_t>(lex.words.size());
    Cue cue = kNeutral;
    // The most frequent words behave like function words and carry no cue.
    if (rank >= 40) {
      const double r = u(rng);
      cue = r < 0.06 ? kPositive : r < 0.12 ? kNegative : r < 0.20 ? kSubjective
            : r < 0.28 ? kObjective : kNeutral;
    }
    lex.words.push_back(std::move(w));
    lex.cue.push_back(cue);
    lex.weight.push_back(1.0 / std::pow(static_cast<double>(rank) + 2.7, 1.05));
  }
  return lex;
}

// Zipfian sampler restricted to words with a given cue.
std::discrete_distribution<size_t> CueSampler(const Lexicon &lex, Cue cue) {
  std::vector<double> w(lex.words.size(), 0.0);
  for (size_t i = 0; i < w.size(); ++i) {
    if (lex.cue[i] == cue) w[i] = lex.weight[i];
  }
  return std::discrete_distribution<size_t>(w.begin(), w.end());
}

struct Samplers {
  std::discrete_distribution<size_t> neutral, positive, negative, subjective, objective;
};

// Cue mix of one sentence: probabilities of drawing each cue class per token.
struct Mix {
  double positive = 0, negative = 0, subjective = 0, objective = 0;
};

std::string WriteSentence(const Lexicon &lex, Samplers &s, const Mix &mix, double mean_len,
                          double sd_len, int64_t min_len, int64_t max_len,
                          std::mt19937_64 &rng) {
  std::normal_distribution<double> length_dist(mean_len, sd_len);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto n = std::clamp<int64_t>(std::llround(length_dist(rng)), min_len, max_len);
  std::string line;
  for (int64_t t = 0; t < n; ++t) {
    const double r = u(rng);
    size_t w;
    if (r < mix.positive) {
      w = s.positive(rng);
    } else if (r < mix.positive + mix.negative) {
      w = s.negative(rng);
    } else if (r < mix.positive + mix.negative + mix.subjective) {
      w = s.subjective(rng);
    } else if (r < mix.positive + mix.negative + mix.subjective + mix.objective) {
      w = s.objective(rng);
    } else {
      w = s.neutral(rng);
    }
    if (!line.empty()) line += ' ';
    line += lex.words[w];
    if (t + 1 < n && u(rng) < 0.06) line += " ,";
  }
  line += u(rng) < 0.15 ? " !" : " .";
  return line;
}

// A handful of Latin-1 encoded words, as found in the original files.
const char *const kLatin1Words[] = {"caf\xe9", "clich\xe9", "na\xefve", "d\xe9j\xe0", "r\xe9sum\xe9"};

void WriteLines(const std::string &path, const std::vector<std::string> &lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (const std::string &l : lines) out << l << '\n';
}

}  // namespace

std::string SurrogateGlovePath(const std::string &dir, int64_t dim) {
  return (std::filesystem::path(dir) / ("glove." + std::to_string(dim) + "d.txt")).string();
}

CorpusPaths WriteSurrogateCorpus(const std::string &dir, const SurrogateSpec &spec) {
  if (spec.vocab < 500 || spec.pol_per_class < 1 || spec.subj_per_class < 1 ||
      spec.glove_dim < 1) {
    throw ConfigError("surrogate corpus needs vocab >= 500 and positive sizes");
  }
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng = MakeRng(spec.seed, 200);
  const Lexicon lex = BuildLexicon(spec.vocab, rng);
  Samplers s{CueSampler(lex, kNeutral), CueSampler(lex, kPositive), CueSampler(lex, kNegative),
             CueSampler(lex, kSubjective), CueSampler(lex, kObjective)};
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // Polarity: short review snippets, all subjective in tone.
  const Mix pos{0.10, 0.03, 0.05, 0.01}, neg{0.03, 0.10, 0.05, 0.01};
  // Subjectivity: opinionated quotes versus plot summaries.
  const Mix subj{0.05, 0.05, 0.11, 0.02}, obj{0.01, 0.01, 0.02, 0.12};

  auto lines_for = [&](const Mix &mine, const Mix &other, int64_t count, double mean,
                       double sd, int64_t min_len, int64_t max_len) {
    std::vector<std::string> lines;
    for (int64_t i = 0; i < count; ++i) {
      const Mix &mix = u(rng) < spec.label_noise ? other : mine;
      std::string line = WriteSentence(lex, s, mix, mean, sd, min_len, max_len, rng);
      if (u(rng) < 0.01) {
        line = std::string(kLatin1Words[rng() % std::size(kLatin1Words)]) + " " + line;
      }
      lines.push_back(std::move(line));
    }
    return lines;
  };

  namespace fs = std::filesystem;
  CorpusPaths paths;
  paths.pol_pos = (fs::path(dir) / "rt-polarity.pos").string();
  paths.pol_neg = (fs::path(dir) / "rt-polarity.neg").string();
  paths.subj = (fs::path(dir) / "quote.tok.gt9.5000").string();
  paths.obj = (fs::path(dir) / "plot.tok.gt9.5000").string();
  WriteLines(paths.pol_pos, lines_for(pos, neg, spec.pol_per_class, 20, 8, 3, 60));
  WriteLines(paths.pol_neg, lines_for(neg, pos, spec.pol_per_class, 20, 8, 3, 60));
  WriteLines(paths.subj, lines_for(subj, obj, spec.subj_per_class, 24, 9, 10, 100));
  WriteLines(paths.obj, lines_for(obj, subj, spec.subj_per_class, 24, 9, 10, 100));

  // Vectors: noise plus a fixed direction per cue, in frequency order.
  const int64_t dim = spec.glove_dim;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> directions(4, std::vector<double>(dim));
  for (auto &d : directions) {
    double norm = 0.0;
    for (double &v : d) {
      v = gauss(rng);
      norm += v * v;
    }
    for (double &v : d) v /= std::sqrt(norm);
  }
  const double noise = 0.4 / std::sqrt(static_cast<double>(dim) / 50.0);
  std::ofstream glove(SurrogateGlovePath(dir, dim), std::ios::binary);
  if (!glove) throw IoError("cannot write " + SurrogateGlovePath(dir, dim));
  char buf[32];
  for (size_t w = 0; w < lex.words.size(); ++w) {
    const bool covered = u(rng) < spec.glove_coverage;
    std::vector<double> v(dim);
    for (double &x : v) x = noise * gauss(rng);
    if (!covered) continue;
    const Cue cue = lex.cue[w];
    if (cue != kNeutral) {
      const double strength = 0.8 + 0.4 * u(rng);
      for (int64_t k = 0; k < dim; ++k) v[k] += strength * directions[cue - 1][k];
    }
    glove << lex.words[w];
    for (double x : v) {
      std::snprintf(buf, sizeof buf, " %.5f", x);
      glove << buf;
    }
    glove << '\n';
  }
  return paths;
}

}  // namespace mtss
