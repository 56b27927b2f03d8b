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

#ifndef ADVTEXT_REPLACEMENT_H_
#define ADVTEXT_REPLACEMENT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "advtext/lexsim.h"
#include "advtext/model.h"
#include "advtext/text.h"

namespace advtext {

enum class ReplacementStrategy {
  kEmbedding,  // "tf-embed": counter-fitted synonym neighbours
  kMaskedLm,   // "bae-mlm": masked language model predictions
};

std::optional<ReplacementStrategy> ParseReplacementStrategy(
    std::string_view name);
std::string_view ReplacementStrategyName(ReplacementStrategy strategy);

struct ReplacementConfig {
  ReplacementStrategy strategy = ReplacementStrategy::kEmbedding;
  size_t top_n = 50;
  double delta = 0.7;
  double epsilon = 0.7;
  size_t k_lm = 20;

  // Throws kInvalidConfig.
  void Validate() const;
};

struct Candidate {
  std::string word;
  // Embedding cosine or LM probability.
  double source_score = 0.0;
  bool passed_pos = false;
  // Similarity of the original sample to the sample with this substitution.
  double sentence_sim = 0.0;
};

// Read-only linguistic resources shared by every worker. Either pointer may
// be null: a missing store yields no embedding candidates and similarity
// checks fall back to token identity; a missing lexicon tags everything
// OTHER.
struct LexicalResources {
  const EmbeddingStore* embeddings = nullptr;
  const PosLexicon* lexicon = nullptr;

  double SentenceSimilarity(std::span<const Token> a,
                            std::span<const Token> b) const;
  bool SamePos(std::string_view a, std::string_view b) const;
};

// Re-cases `word` to the shape of `like`: ALLCAPS, Capitalized or unchanged.
std::string MatchCase(std::string_view word, std::string_view like);

// Nearest embedding neighbours of the word at `position`, kept if they share
// its POS and the substituted sample stays >= cfg.epsilon similar to the
// origin. Descending cosine.
std::vector<Candidate> GenerateEmbeddingCandidates(
    const PerturbedSample& state, size_t position,
    const LexicalResources& lex, const ReplacementConfig& cfg);

// Top cfg.k_lm masked-LM predictions at `position` minus the original word,
// with the same POS and similarity filters. Descending LM probability.
std::vector<Candidate> GenerateMaskedLmCandidates(
    const PerturbedSample& state, size_t position, const MaskSampler& sampler,
    const LexicalResources& lex, const ReplacementConfig& cfg);

std::vector<Candidate> GenerateCandidates(const PerturbedSample& state,
                                          size_t position,
                                          const MaskSampler* sampler,
                                          const LexicalResources& lex,
                                          const ReplacementConfig& cfg);

struct Choice {
  Candidate candidate;
  LabelDistribution distribution;
};

enum class ChooseMode {
  // Classify every candidate; the winner does not depend on candidate order.
  kExhaustive,
  // Stop at the first candidate that flips the label.
  kFirstFlip,
};

// Picks the substitution for `position`. A candidate that moves the argmax
// away from `label` wins (highest sentence_sim among several); otherwise the
// candidate with the lowest p(label), if strictly below the current p(label).
// nullopt means no improvement. `current` is classified when not given.
std::optional<Choice> ChooseBest(
    std::span<const Candidate> candidates, const Classifier& classifier,
    const PerturbedSample& state, size_t position, int label,
    const std::optional<LabelDistribution>& current = std::nullopt,
    ChooseMode mode = ChooseMode::kExhaustive);

}  // namespace advtext

#endif  // ADVTEXT_REPLACEMENT_H_
