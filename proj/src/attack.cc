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

#include "advtext/attack.h"

#include <atomic>
#include <memory>
#include <thread>

#include "advtext/error.h"

namespace advtext {

void AttackConfig::Validate() const {
  replacement.Validate();
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "epsilon must lie in [0,1]");
  }
  if (!(max_perturb_fraction > 0.0 && max_perturb_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                "max_perturb_fraction must lie in (0,1]");
  }
  if (olm.n_samples < 1) {
    throw Error(ErrorCode::kInvalidConfig, "n_samples must be >= 1");
  }
  if (unk_token.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "unk token must be non-empty");
  }
}

std::string_view OutcomeKindName(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::kSuccess:
      return "Success";
    case OutcomeKind::kFailure:
      return "Failure";
    case OutcomeKind::kSkipped:
      return "Skipped";
  }
  return "Failure";
}

SynonymSource EmbeddingSynonyms(const LexicalResources& lex,
                                const ReplacementConfig& cfg) {
  return [lex, cfg](std::span<const Token> tokens, size_t position) {
    std::vector<std::string> words;
    if (lex.embeddings == nullptr) return words;
    for (const ScoredWord& w : lex.embeddings->NearestSynonyms(
             tokens[position].surface, cfg.top_n, cfg.delta)) {
      words.push_back(MatchCase(w.word, tokens[position].surface));
    }
    return words;
  };
}

PerturbedSample Replay(const Sample& sample,
                       std::span<const Substitution> substitutions) {
  PerturbedSample state(std::make_shared<const Sample>(sample));
  for (const Substitution& s : substitutions) {
    state = state.Substitute(s.position, s.to);
  }
  return state;
}

AttackOutcome Attack(const Sample& sample, const AttackBackends& backends,
                     const AttackConfig& cfg) {
  if (backends.classifier == nullptr) {
    throw Error(ErrorCode::kInvalidConfig, "attack needs a classifier");
  }
  if (sample.gold_label < 0 ||
      sample.gold_label >= backends.classifier->num_labels()) {
    throw Error(ErrorCode::kInvalidConfig,
                "sample '" + sample.id + "' has label " +
                    std::to_string(sample.gold_label) + " outside the classifier");
  }
  QueryLedger ledger;
  CountingClassifier classifier(*backends.classifier, ledger, cfg.memoize);
  std::unique_ptr<CountingSampler> sampler;
  if (backends.sampler != nullptr) {
    sampler = std::make_unique<CountingSampler>(*backends.sampler, ledger);
  }

  AttackOutcome outcome;
  outcome.id = sample.id;
  outcome.gold_label = sample.gold_label;
  PerturbedSample state(std::make_shared<const Sample>(sample));
  outcome.final_text = state.text();

  auto finish = [&](OutcomeKind kind, std::string reason = {}) {
    outcome.kind = kind;
    outcome.reason = std::move(reason);
    outcome.final_text = state.text();
    outcome.substitutions = state.substitutions();
    outcome.perturbed_pct = CountWords(sample.tokens) == 0
                                ? 0.0
                                : PerturbedWordRatio(state);
    const QueryCounts counts = ledger.counts();
    outcome.classify_queries = counts.classify;
    outcome.mask_queries = counts.mask;
    return outcome;
  };

  try {
    LabelDistribution current = classifier.Classify(state.text());
    outcome.final_distribution = current;
    if (current.Argmax() != sample.gold_label) {
      return finish(OutcomeKind::kSkipped);
    }
    const size_t words = CountWords(sample.tokens);
    if (words == 0) return finish(OutcomeKind::kFailure, "no word tokens");

    RankingInputs inputs;
    inputs.classifier = &classifier;
    inputs.sampler = sampler.get();
    inputs.olm = cfg.olm;
    inputs.unk_token = cfg.unk_token;
    if (cfg.ranking == RankingStrategy::kPwws) {
      inputs.synonyms = EmbeddingSynonyms(backends.lex, cfg.replacement);
    }
    const WordRanking ranking =
        Rank(cfg.ranking, inputs, sample.tokens, sample.gold_label);

    for (const RankedPosition& entry : ranking.entries) {
      const size_t next_count = state.substitutions().size() + 1;
      if (static_cast<double>(next_count) >
          cfg.max_perturb_fraction * static_cast<double>(words)) {
        return finish(OutcomeKind::kFailure, "perturbation cap reached");
      }
      auto candidates = GenerateCandidates(state, entry.position,
                                           sampler.get(), backends.lex,
                                           cfg.replacement);
      std::erase_if(candidates, [&](const Candidate& c) {
        return c.sentence_sim < cfg.epsilon;
      });
      const auto choice =
          ChooseBest(candidates, classifier, state, entry.position,
                     sample.gold_label, current, cfg.choose_mode);
      if (!choice) continue;
      state = state.Substitute(entry.position, choice->candidate.word);
      current = choice->distribution;
      outcome.final_distribution = current;
      if (current.Argmax() != sample.gold_label) {
        const double sim = backends.lex.SentenceSimilarity(
            sample.tokens, state.current_tokens());
        if (sim >= cfg.epsilon) return finish(OutcomeKind::kSuccess);
        return finish(OutcomeKind::kFailure,
                      "label flipped below the similarity threshold");
      }
    }
    return finish(OutcomeKind::kFailure, "positions exhausted");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBackendError) throw;
    return finish(OutcomeKind::kFailure, e.what());
  }
}

std::vector<AttackOutcome> AttackBatch(std::span<const Sample> samples,
                                       const AttackBackends& backends,
                                       const AttackConfig& cfg,
                                       size_t workers) {
  if (workers < 1) throw Error(ErrorCode::kInvalidConfig, "workers must be >= 1");
  cfg.Validate();
  std::vector<AttackOutcome> outcomes(samples.size());
  auto run_one = [&](size_t i) {
    try {
      outcomes[i] = Attack(samples[i], backends, cfg);
    } catch (const std::exception& e) {
      AttackOutcome failed;
      failed.id = samples[i].id;
      failed.gold_label = samples[i].gold_label;
      failed.kind = OutcomeKind::kFailure;
      failed.final_text = Detokenize(samples[i].tokens);
      failed.reason = e.what();
      outcomes[i] = std::move(failed);
    }
  };

  const size_t threads = std::min(workers, samples.size());
  if (threads <= 1) {
    for (size_t i = 0; i < samples.size(); ++i) run_one(i);
    return outcomes;
  }
  std::atomic<size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < samples.size();
           i = next.fetch_add(1)) {
        run_one(i);
      }
    });
  }
  pool.clear();
  return outcomes;
}

}  // namespace advtext
