//
// Copyright 2026 The advtext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "advtext/ranking.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "advtext/error.h"

namespace advtext {

namespace {

void CheckInputs(const Classifier& classifier, std::span<const Token> tokens,
                 int label) {
  if (CountWords(tokens) == 0) {
    throw Error(ErrorCode::kDegenerateSample, "nothing to rank: no word tokens");
  }
  if (label < 0 || label >= classifier.num_labels()) {
    throw Error(ErrorCode::kInvalidConfig,
                "label " + std::to_string(label) + " outside classifier range");
  }
}

std::vector<size_t> WordPositions(std::span<const Token> tokens) {
  std::vector<size_t> positions;
  for (const Token& token : tokens) {
    if (token.is_word) positions.push_back(token.position);
  }
  return positions;
}

std::string ReplacedText(std::span<const Token> tokens, size_t position,
                         std::string_view word) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    if (i == position) {
      out += word;
    } else {
      out += tokens[i].surface;
    }
  }
  return out;
}

std::string DeletedText(std::span<const Token> tokens, size_t position) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i == position) continue;
    if (!out.empty()) out.push_back(' ');
    out += tokens[i].surface;
  }
  return out;
}

WordRanking Sorted(std::vector<RankedPosition> entries,
                   std::vector<std::string> warnings = {}) {
  std::sort(entries.begin(), entries.end(),
            [](const RankedPosition& a, const RankedPosition& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.position < b.position;
            });
  return WordRanking{std::move(entries), std::move(warnings)};
}

// Scores each word position against one perturbed text per position.
WordRanking RankByPerturbation(
    const Classifier& classifier, std::span<const Token> tokens, int label,
    const std::function<std::string(size_t)>& perturb) {
  CheckInputs(classifier, tokens, label);
  const double base = classifier.Classify(Detokenize(tokens)).prob(label);
  const auto positions = WordPositions(tokens);
  std::vector<std::string> texts;
  texts.reserve(positions.size());
  for (size_t pos : positions) texts.push_back(perturb(pos));
  const auto dists = classifier.ClassifyBatch(texts);
  std::vector<RankedPosition> entries;
  for (size_t k = 0; k < positions.size(); ++k) {
    entries.push_back({positions[k], base - dists[k].prob(label)});
  }
  return Sorted(std::move(entries));
}

// f_y over the language-model substitutes at one position.
struct OcclusionSamples {
  std::vector<double> weights;
  std::vector<double> values;
  double mean = 0.0;
};

OcclusionSamples SampleOcclusion(const Classifier& classifier,
                                 const MaskSampler& sampler,
                                 std::span<const Token> tokens, size_t position,
                                 int label, const OlmConfig& cfg) {
  const auto sampled = sampler.SampleMasked(tokens, position, cfg.n_samples);
  // Merge repeated words, keeping first-seen order.
  std::vector<std::string> words;
  std::map<std::string, double> mass;
  for (const SampledWord& w : sampled) {
    if (w.word.empty()) continue;
    if (!mass.contains(w.word)) words.push_back(w.word);
    mass[w.word] += w.prob;
  }
  OcclusionSamples out;
  if (words.empty()) return out;

  double total = 0.0;
  for (const std::string& w : words) total += mass[w];
  std::vector<std::string> texts;
  for (const std::string& w : words) {
    double p = mass[w];
    if (cfg.renormalize && total > 0.0) p /= total;
    out.weights.push_back(p);
    texts.push_back(ReplacedText(tokens, position, w));
  }
  for (const auto& dist : classifier.ClassifyBatch(texts)) {
    out.values.push_back(dist.prob(label));
  }
  for (size_t k = 0; k < words.size(); ++k) {
    out.mean += out.weights[k] * out.values[k];
  }
  return out;
}

WordRanking RankOcclusion(const Classifier& classifier,
                          const MaskSampler& sampler,
                          std::span<const Token> tokens, int label,
                          const OlmConfig& cfg, bool sensitivity) {
  CheckInputs(classifier, tokens, label);
  if (cfg.n_samples == 0) {
    throw Error(ErrorCode::kInvalidConfig, "n_samples must be >= 1");
  }
  const double base = classifier.Classify(Detokenize(tokens)).prob(label);
  std::vector<RankedPosition> entries;
  std::vector<std::string> warnings;
  for (size_t pos : WordPositions(tokens)) {
    const auto samples =
        SampleOcclusion(classifier, sampler, tokens, pos, label, cfg);
    if (samples.values.empty()) {
      warnings.push_back("position " + std::to_string(pos) + " ('" +
                         tokens[pos].surface +
                         "'): sampler returned no candidates, scored 0");
      entries.push_back({pos, 0.0});
      continue;
    }
    if (!sensitivity) {
      entries.push_back({pos, base - samples.mean});
      continue;
    }
    double variance = 0.0;
    if (samples.values.size() > 1) {
      for (size_t k = 0; k < samples.values.size(); ++k) {
        const double d = samples.values[k] - samples.mean;
        variance += samples.weights[k] * d * d;
      }
    }
    entries.push_back({pos, std::sqrt(variance)});
  }
  return Sorted(std::move(entries), std::move(warnings));
}

}  // namespace

std::optional<RankingStrategy> ParseRankingStrategy(std::string_view name) {
  if (name == "delete") return RankingStrategy::kDelete;
  if (name == "unk") return RankingStrategy::kUnk;
  if (name == "olm") return RankingStrategy::kOlm;
  if (name == "olm-s") return RankingStrategy::kOlmS;
  if (name == "pwws") return RankingStrategy::kPwws;
  return std::nullopt;
}

std::string_view RankingStrategyName(RankingStrategy strategy) {
  switch (strategy) {
    case RankingStrategy::kDelete:
      return "delete";
    case RankingStrategy::kUnk:
      return "unk";
    case RankingStrategy::kOlm:
      return "olm";
    case RankingStrategy::kOlmS:
      return "olm-s";
    case RankingStrategy::kPwws:
      return "pwws";
  }
  return "unknown";
}

WordRanking RankDelete(const Classifier& classifier,
                       std::span<const Token> tokens, int label) {
  return RankByPerturbation(classifier, tokens, label, [&](size_t pos) {
    return DeletedText(tokens, pos);
  });
}

WordRanking RankUnk(const Classifier& classifier, std::span<const Token> tokens,
                    int label, std::string_view unk_token) {
  if (unk_token.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "unk token must be non-empty");
  }
  return RankByPerturbation(classifier, tokens, label, [&](size_t pos) {
    return ReplacedText(tokens, pos, unk_token);
  });
}

WordRanking RankOlm(const Classifier& classifier, const MaskSampler& sampler,
                    std::span<const Token> tokens, int label,
                    const OlmConfig& cfg) {
  return RankOcclusion(classifier, sampler, tokens, label, cfg, false);
}

WordRanking RankOlmS(const Classifier& classifier, const MaskSampler& sampler,
                     std::span<const Token> tokens, int label,
                     const OlmConfig& cfg) {
  return RankOcclusion(classifier, sampler, tokens, label, cfg, true);
}

WordRanking RankPwws(const Classifier& classifier,
                     std::span<const Token> tokens, int label,
                     const SynonymSource& synonyms) {
  CheckInputs(classifier, tokens, label);
  const double base = classifier.Classify(Detokenize(tokens)).prob(label);
  const auto positions = WordPositions(tokens);

  std::vector<double> saliency;
  std::vector<double> best_drop;
  for (size_t pos : positions) {
    const double unk =
        classifier.Classify(ReplacedText(tokens, pos, kDefaultUnkToken))
            .prob(label);
    saliency.push_back(base - unk);

    std::vector<std::string> texts;
    if (synonyms) {
      for (const std::string& w : synonyms(tokens, pos)) {
        if (!w.empty()) texts.push_back(ReplacedText(tokens, pos, w));
      }
    }
    double drop = 0.0;
    if (!texts.empty()) {
      drop = -std::numeric_limits<double>::infinity();
      for (const auto& dist : classifier.ClassifyBatch(texts)) {
        drop = std::max(drop, base - dist.prob(label));
      }
    }
    best_drop.push_back(drop);
  }

  const double max_s = *std::max_element(saliency.begin(), saliency.end());
  double z = 0.0;
  for (double s : saliency) z += std::exp(s - max_s);
  std::vector<RankedPosition> entries;
  for (size_t k = 0; k < positions.size(); ++k) {
    const double weight = std::exp(saliency[k] - max_s) / z;
    entries.push_back({positions[k], weight * best_drop[k]});
  }
  return Sorted(std::move(entries));
}

WordRanking Rank(RankingStrategy strategy, const RankingInputs& inputs,
                 std::span<const Token> tokens, int label) {
  if (inputs.classifier == nullptr) {
    throw Error(ErrorCode::kInvalidConfig, "ranking needs a classifier");
  }
  const Classifier& classifier = *inputs.classifier;
  switch (strategy) {
    case RankingStrategy::kDelete:
      return RankDelete(classifier, tokens, label);
    case RankingStrategy::kUnk:
      return RankUnk(classifier, tokens, label, inputs.unk_token);
    case RankingStrategy::kOlm:
    case RankingStrategy::kOlmS:
      if (inputs.sampler == nullptr) {
        throw Error(ErrorCode::kInvalidConfig,
                    std::string(RankingStrategyName(strategy)) +
                        " ranking needs a masked-word sampler");
      }
      return strategy == RankingStrategy::kOlm
                 ? RankOlm(classifier, *inputs.sampler, tokens, label,
                           inputs.olm)
                 : RankOlmS(classifier, *inputs.sampler, tokens, label,
                            inputs.olm);
    case RankingStrategy::kPwws:
      return RankPwws(classifier, tokens, label, inputs.synonyms);
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown ranking strategy");
}

}  // namespace advtext
