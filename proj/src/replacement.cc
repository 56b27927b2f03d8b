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

#include "advtext/replacement.h"

#include <algorithm>
#include <cctype>

#include "advtext/error.h"

namespace advtext {

namespace {

bool IsSingleWord(std::string_view word) {
  if (word.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    return false;
  }
  const auto tokens = Tokenize(word);
  return tokens.size() == 1 && tokens[0].is_word && tokens[0].surface == word;
}

// Shared tail of both generators: reject non-words and the original word,
// then apply the POS and sentence-similarity filters.
std::vector<Candidate> Filter(const PerturbedSample& state, size_t position,
                              const std::vector<ScoredWord>& raw,
                              const LexicalResources& lex,
                              const ReplacementConfig& cfg) {
  const std::string& original = state.current_tokens()[position].surface;
  const std::string folded_original = FoldCase(original);
  std::vector<Candidate> out;
  for (const ScoredWord& source : raw) {
    const std::string word = MatchCase(source.word, original);
    if (FoldCase(word) == folded_original || !IsSingleWord(word)) continue;
    if (!lex.SamePos(word, original)) continue;
    const PerturbedSample next = state.Substitute(position, word);
    const double sim = lex.SentenceSimilarity(state.origin().tokens,
                                              next.current_tokens());
    if (sim < cfg.epsilon) continue;
    out.push_back(Candidate{word, source.similarity, true, sim});
  }
  return out;
}

void CheckPosition(const PerturbedSample& state, size_t position) {
  const auto& tokens = state.current_tokens();
  if (position >= tokens.size() || !tokens[position].is_word) {
    throw Error(ErrorCode::kInvalidPosition,
                "replacement position " + std::to_string(position) +
                    " is not a word token");
  }
}

}  // namespace

std::optional<ReplacementStrategy> ParseReplacementStrategy(
    std::string_view name) {
  if (name == "tf-embed") return ReplacementStrategy::kEmbedding;
  if (name == "bae-mlm") return ReplacementStrategy::kMaskedLm;
  return std::nullopt;
}

std::string_view ReplacementStrategyName(ReplacementStrategy strategy) {
  return strategy == ReplacementStrategy::kEmbedding ? "tf-embed" : "bae-mlm";
}

void ReplacementConfig::Validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "epsilon must lie in [0,1]");
  }
  if (top_n < 1) throw Error(ErrorCode::kInvalidConfig, "top_n must be >= 1");
  if (k_lm < 1) throw Error(ErrorCode::kInvalidConfig, "k_lm must be >= 1");
}

double LexicalResources::SentenceSimilarity(std::span<const Token> a,
                                            std::span<const Token> b) const {
  if (embeddings != nullptr) return embeddings->SentenceSimilarity(a, b);
  return EmbeddingStore().SentenceSimilarity(a, b);
}

bool LexicalResources::SamePos(std::string_view a, std::string_view b) const {
  return lexicon == nullptr || lexicon->SamePos(a, b);
}

std::string MatchCase(std::string_view word, std::string_view like) {
  std::string out(word);
  const bool has_alpha = std::any_of(like.begin(), like.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c));
  });
  if (!has_alpha) return out;
  const bool all_upper =
      like.size() > 1 && std::none_of(like.begin(), like.end(), [](char c) {
        return std::islower(static_cast<unsigned char>(c));
      });
  const bool capitalized = std::isupper(static_cast<unsigned char>(like[0]));
  if (all_upper) {
    for (char& c : out) {
      if (static_cast<unsigned char>(c) < 0x80) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
    }
  } else if (capitalized && !out.empty() &&
             static_cast<unsigned char>(out[0]) < 0x80) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

std::vector<Candidate> GenerateEmbeddingCandidates(
    const PerturbedSample& state, size_t position,
    const LexicalResources& lex, const ReplacementConfig& cfg) {
  CheckPosition(state, position);
  if (lex.embeddings == nullptr) return {};
  const auto raw = lex.embeddings->NearestSynonyms(
      state.current_tokens()[position].surface, cfg.top_n, cfg.delta);
  return Filter(state, position, raw, lex, cfg);
}

std::vector<Candidate> GenerateMaskedLmCandidates(
    const PerturbedSample& state, size_t position, const MaskSampler& sampler,
    const LexicalResources& lex, const ReplacementConfig& cfg) {
  CheckPosition(state, position);
  auto sampled = sampler.SampleMasked(state.current_tokens(), position, cfg.k_lm);
  SortCandidates(sampled);
  std::vector<ScoredWord> raw;
  raw.reserve(sampled.size());
  for (auto& w : sampled) raw.push_back(ScoredWord{std::move(w.word), w.prob});
  return Filter(state, position, raw, lex, cfg);
}

std::vector<Candidate> GenerateCandidates(const PerturbedSample& state,
                                          size_t position,
                                          const MaskSampler* sampler,
                                          const LexicalResources& lex,
                                          const ReplacementConfig& cfg) {
  if (cfg.strategy == ReplacementStrategy::kEmbedding) {
    return GenerateEmbeddingCandidates(state, position, lex, cfg);
  }
  if (sampler == nullptr) {
    throw Error(ErrorCode::kInvalidConfig,
                "bae-mlm replacement needs a masked-word sampler");
  }
  return GenerateMaskedLmCandidates(state, position, *sampler, lex, cfg);
}

std::optional<Choice> ChooseBest(std::span<const Candidate> candidates,
                                 const Classifier& classifier,
                                 const PerturbedSample& state, size_t position,
                                 int label,
                                 const std::optional<LabelDistribution>& current,
                                 ChooseMode mode) {
  if (candidates.empty()) return std::nullopt;
  const double current_p =
      (current ? *current : classifier.Classify(state.text())).prob(label);

  std::optional<size_t> best_flip;
  std::optional<size_t> best_drop;
  std::vector<LabelDistribution> dists;
  dists.reserve(candidates.size());

  auto consider = [&](size_t k) {
    const LabelDistribution& d = dists[k];
    const double p = d.prob(label);
    if (d.Argmax() != label) {
      if (!best_flip) {
        best_flip = k;
        return;
      }
      const Candidate& incumbent = candidates[*best_flip];
      const double incumbent_p = dists[*best_flip].prob(label);
      if (candidates[k].sentence_sim > incumbent.sentence_sim ||
          (candidates[k].sentence_sim == incumbent.sentence_sim &&
           p < incumbent_p)) {
        best_flip = k;
      }
    } else if (!best_drop || p < dists[*best_drop].prob(label)) {
      best_drop = k;
    }
  };

  if (mode == ChooseMode::kFirstFlip) {
    for (size_t k = 0; k < candidates.size(); ++k) {
      dists.push_back(classifier.Classify(
          state.Substitute(position, candidates[k].word).text()));
      consider(k);
      if (best_flip) break;
    }
  } else {
    std::vector<std::string> texts;
    texts.reserve(candidates.size());
    for (const Candidate& c : candidates) {
      texts.push_back(state.Substitute(position, c.word).text());
    }
    dists = classifier.ClassifyBatch(texts);
    for (size_t k = 0; k < candidates.size(); ++k) consider(k);
  }

  if (best_flip) return Choice{candidates[*best_flip], dists[*best_flip]};
  if (best_drop && dists[*best_drop].prob(label) < current_p) {
    return Choice{candidates[*best_drop], dists[*best_drop]};
  }
  return std::nullopt;
}

}  // namespace advtext
