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

#ifndef ADVTEXT_RANKING_H_
#define ADVTEXT_RANKING_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advtext/model.h"
#include "advtext/text.h"

namespace advtext {

enum class RankingStrategy { kDelete, kUnk, kOlm, kOlmS, kPwws };

// "delete", "unk", "olm", "olm-s", "pwws".
std::optional<RankingStrategy> ParseRankingStrategy(std::string_view name);
std::string_view RankingStrategyName(RankingStrategy strategy);

struct RankedPosition {
  size_t position = 0;
  double score = 0.0;

  friend bool operator==(const RankedPosition&,
                         const RankedPosition&) = default;
};

// Word positions by descending score; equal scores by ascending position.
struct WordRanking {
  std::vector<RankedPosition> entries;
  // Per-position notes, e.g. a sampler that returned no candidates.
  std::vector<std::string> warnings;
};

struct OlmConfig {
  size_t n_samples = 30;
  // Rescale the probabilities of the unique sampled words to sum to 1.
  bool renormalize = true;
};

inline constexpr std::string_view kDefaultUnkToken = "[UNK]";

// Substitute words offered for `position`; feeds the PWWS saliency term.
using SynonymSource = std::function<std::vector<std::string>(
    std::span<const Token> tokens, size_t position)>;

// score(i) = f_y(x) - f_y(x without token i). One query per word token plus
// one for x.
WordRanking RankDelete(const Classifier& classifier,
                       std::span<const Token> tokens, int label);

// As RankDelete, with token i replaced by `unk_token` instead of removed.
WordRanking RankUnk(const Classifier& classifier, std::span<const Token> tokens,
                    int label, std::string_view unk_token = kDefaultUnkToken);

// Occlusion with a language model. For each word position the sampler's
// unique words w_k with probabilities p_k stand in for the missing word:
//
//   mu_i     = sum_k p_k f_y(x with i -> w_k)
//   score(i) = f_y(x) - mu_i
//
// A position with no sampled words scores 0 and is reported in warnings.
WordRanking RankOlm(const Classifier& classifier, const MaskSampler& sampler,
                    std::span<const Token> tokens, int label,
                    const OlmConfig& cfg);

// Positional sensitivity over the same samples:
//   score(i) = sqrt(sum_k p_k (f_y(x with i -> w_k) - mu_i)^2)
// The original word at i does not enter the score. Positions with fewer than
// two unique samples score 0.
WordRanking RankOlmS(const Classifier& classifier, const MaskSampler& sampler,
                     std::span<const Token> tokens, int label,
                     const OlmConfig& cfg);

// Probability-weighted word saliency:
//   S(i)   = f_y(x) - f_y(x with i -> [UNK])
//   dP*(i) = max over substitutes w of f_y(x) - f_y(x with i -> w), 0 if none
//   score  = softmax(S over word positions)_i * dP*(i)
WordRanking RankPwws(const Classifier& classifier,
                     std::span<const Token> tokens, int label,
                     const SynonymSource& synonyms);

struct RankingInputs {
  const Classifier* classifier = nullptr;
  // Required by olm and olm-s.
  const MaskSampler* sampler = nullptr;
  // Required by pwws.
  SynonymSource synonyms;
  OlmConfig olm;
  std::string unk_token = std::string(kDefaultUnkToken);
};

// Dispatches on strategy. Throws kInvalidConfig when a required input is
// missing.
WordRanking Rank(RankingStrategy strategy, const RankingInputs& inputs,
                 std::span<const Token> tokens, int label);

}  // namespace advtext

#endif  // ADVTEXT_RANKING_H_
