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

#ifndef ADVTEXT_ATTACK_H_
#define ADVTEXT_ATTACK_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advtext/model.h"
#include "advtext/ranking.h"
#include "advtext/replacement.h"
#include "advtext/text.h"

namespace advtext {

struct AttackConfig {
  RankingStrategy ranking = RankingStrategy::kOlm;
  ReplacementConfig replacement;
  OlmConfig olm;
  // Minimum similarity of the adversarial text to the original.
  double epsilon = 0.7;
  // Upper bound on the fraction of word tokens an attack may change.
  double max_perturb_fraction = 0.4;
  ChooseMode choose_mode = ChooseMode::kExhaustive;
  bool memoize = true;
  std::string unk_token = std::string(kDefaultUnkToken);

  // Throws kInvalidConfig.
  void Validate() const;
};

enum class OutcomeKind { kSuccess, kFailure, kSkipped };

std::string_view OutcomeKindName(OutcomeKind kind);

struct AttackOutcome {
  std::string id;
  int gold_label = 0;
  OutcomeKind kind = OutcomeKind::kFailure;
  std::string final_text;
  std::vector<Substitution> substitutions;
  double perturbed_pct = 0.0;
  uint64_t classify_queries = 0;
  uint64_t mask_queries = 0;
  // Empty when the backend failed before answering.
  LabelDistribution final_distribution;
  // Why a Failure happened; empty otherwise.
  std::string reason;
};

// Backends and resources an attack runs against. Backends must be
// thread-safe when used from attack_batch with several workers.
struct AttackBackends {
  const Classifier* classifier = nullptr;
  const MaskSampler* sampler = nullptr;
  LexicalResources lex;
};

// Greedy word-substitution attack. The sample is skipped when already
// misclassified; otherwise words are visited once in ranking order and the
// best candidate is substituted until the label flips (Success), the
// perturbation cap would be exceeded or positions run out (Failure).
// Query counts are the backend invocations made for this sample only.
AttackOutcome Attack(const Sample& sample, const AttackBackends& backends,
                     const AttackConfig& cfg);

// Runs Attack over `samples` on `workers` threads. Outcomes are in input
// order and identical to a sequential run; a failing sample never affects
// the others.
std::vector<AttackOutcome> AttackBatch(std::span<const Sample> samples,
                                       const AttackBackends& backends,
                                       const AttackConfig& cfg,
                                       size_t workers = 1);

// Synonym source for PWWS backed by the embedding neighbours used for
// replacement.
SynonymSource EmbeddingSynonyms(const LexicalResources& lex,
                                const ReplacementConfig& cfg);

// Applies `substitutions` in order to `sample`.
PerturbedSample Replay(const Sample& sample,
                       std::span<const Substitution> substitutions);

}  // namespace advtext

#endif  // ADVTEXT_ATTACK_H_
