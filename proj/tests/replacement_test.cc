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

#include <map>
#include <random>

#include "advtext/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace advtext {
namespace {

using ::advtext::testing::SharedSample;

std::vector<std::string> WordsOf(const std::vector<Candidate>& candidates) {
  std::vector<std::string> out;
  for (const auto& c : candidates) out.push_back(c.word);
  return out;
}

struct GoodStore {
  EmbeddingStore store;
  PosLexicon lexicon;

  GoodStore() {
    const double s9 = std::sqrt(1.0 - 0.81);
    const double s8 = std::sqrt(1.0 - 0.64);
    store.Add("good", {1.0, 0.0, 0.0});
    store.Add("great", {0.9, s9, 0.0});
    store.Add("well", {0.8, 0.0, s8});
    store.Add("movie", {0.0, 0.0, 1.0});
    lexicon.Set("good", PosTag::kAdj);
    lexicon.Set("great", PosTag::kAdj);
    lexicon.Set("well", PosTag::kAdv);
    lexicon.Set("movie", PosTag::kNoun);
  }

  LexicalResources lex() const { return {&store, &lexicon}; }
};

TEST(EmbeddingCandidatesTest, PosFilterRemovesAdverb) {
  const GoodStore g;
  const PerturbedSample state(SharedSample("a good movie"));
  ReplacementConfig cfg;
  cfg.epsilon = 0.0;
  cfg.delta = 0.5;
  const auto out = GenerateEmbeddingCandidates(state, 1, g.lex(), cfg);
  ASSERT_EQ(WordsOf(out), (std::vector<std::string>{"great"}));
  EXPECT_NEAR(out[0].source_score, 0.9, 1e-12);
  EXPECT_TRUE(out[0].passed_pos);
  EXPECT_GT(out[0].sentence_sim, 0.5);
}

TEST(EmbeddingCandidatesTest, EpsilonOneRejectsRealSubstitutions) {
  const GoodStore g;
  const PerturbedSample state(SharedSample("a good movie"));
  ReplacementConfig cfg;
  cfg.epsilon = 1.0;
  cfg.delta = 0.5;
  EXPECT_TRUE(GenerateEmbeddingCandidates(state, 1, g.lex(), cfg).empty());
}

TEST(EmbeddingCandidatesTest, AbsentWordOrStore) {
  const GoodStore g;
  const PerturbedSample state(SharedSample("a fine movie"));
  ReplacementConfig cfg;
  cfg.epsilon = 0.0;
  EXPECT_TRUE(GenerateEmbeddingCandidates(state, 1, g.lex(), cfg).empty());
  EXPECT_TRUE(
      GenerateEmbeddingCandidates(state, 1, LexicalResources{}, cfg).empty());
}

TEST(EmbeddingCandidatesTest, KeepsOriginalCasing) {
  const GoodStore g;
  const PerturbedSample state(SharedSample("Good movie"));
  ReplacementConfig cfg;
  cfg.epsilon = 0.0;
  EXPECT_EQ(WordsOf(GenerateEmbeddingCandidates(state, 0, g.lex(), cfg)),
            (std::vector<std::string>{"Great"}));
}

TEST(EmbeddingCandidatesTest, InvalidPosition) {
  const GoodStore g;
  const PerturbedSample state(SharedSample("good !"));
  EXPECT_THROW(GenerateEmbeddingCandidates(state, 1, g.lex(), {}), Error);
}

TEST(MaskedLmCandidatesTest, TablePassesAllFilters) {
  PosLexicon lexicon;
  for (const char* w : {"awful", "bad", "fine"}) lexicon.Set(w, PosTag::kAdj);
  const FixedTableSampler sampler({{"bad", 0.6}, {"fine", 0.4}});
  const PerturbedSample state(SharedSample("so awful"));
  ReplacementConfig cfg;
  cfg.epsilon = 0.0;
  const auto out = GenerateMaskedLmCandidates(state, 1, sampler,
                                              {nullptr, &lexicon}, cfg);
  EXPECT_EQ(WordsOf(out), (std::vector<std::string>{"bad", "fine"}));
  EXPECT_DOUBLE_EQ(out[0].source_score, 0.6);
}

TEST(MaskedLmCandidatesTest, OriginalWordDropped) {
  const FixedTableSampler sampler({{"awful", 0.9}});
  const PerturbedSample state(SharedSample("so Awful"));
  ReplacementConfig cfg;
  cfg.epsilon = 0.0;
  EXPECT_TRUE(GenerateMaskedLmCandidates(state, 1, sampler, {}, cfg).empty());
}

TEST(MaskedLmCandidatesTest, PosFilter) {
  PosLexicon lexicon;
  lexicon.Set("awful", PosTag::kAdj);
  lexicon.Set("bad", PosTag::kAdj);
  lexicon.Set("fine", PosTag::kOther);
  const FixedTableSampler sampler({{"bad", 0.6}, {"fine", 0.4}});
  const PerturbedSample state(SharedSample("so awful"));
  ReplacementConfig cfg;
  cfg.epsilon = 0.0;
  EXPECT_EQ(WordsOf(GenerateMaskedLmCandidates(state, 1, sampler,
                                               {nullptr, &lexicon}, cfg)),
            (std::vector<std::string>{"bad"}));
}

TEST(MaskedLmCandidatesTest, DropsNonWordPredictions) {
  const FixedTableSampler sampler({{"...", 0.5}, {"two words", 0.3}, {"ok", 0.2}});
  const PerturbedSample state(SharedSample("so awful"));
  ReplacementConfig cfg;
  cfg.epsilon = 0.0;
  EXPECT_EQ(WordsOf(GenerateMaskedLmCandidates(state, 1, sampler, {}, cfg)),
            (std::vector<std::string>{"ok"}));
}

TEST(MaskedLmCandidatesTest, RespectsKlm) {
  const FixedTableSampler sampler({{"a", 0.5}, {"b", 0.3}, {"c", 0.2}});
  const PerturbedSample state(SharedSample("so awful"));
  ReplacementConfig cfg;
  cfg.epsilon = 0.0;
  cfg.k_lm = 2;
  EXPECT_EQ(WordsOf(GenerateMaskedLmCandidates(state, 1, sampler, {}, cfg)),
            (std::vector<std::string>{"a", "b"}));
}

// Filters only remove; with epsilon 0 and no lexicon the embedding
// generator is the raw neighbour list minus the original word.
TEST(CandidatePropertyTest, FilteredSubsetOfRawNeighbours) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<PosTag> tags = {PosTag::kNoun, PosTag::kAdj, PosTag::kOther};
  for (int trial = 0; trial < 100; ++trial) {
    EmbeddingStore store;
    PosLexicon lexicon;
    const int n = 3 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      const std::string w = "w" + std::to_string(i);
      store.Add(w, {u(rng), u(rng), u(rng) + 0.01});
      lexicon.Set(w, tags[rng() % tags.size()]);
    }
    const PerturbedSample state(SharedSample("w0 w1 w2"));
    const size_t pos = rng() % 3;
    ReplacementConfig cfg;
    cfg.top_n = 1 + rng() % 5;
    cfg.delta = u(rng);
    cfg.epsilon = 0.0;
    const auto raw = store.NearestSynonyms(state.current_tokens()[pos].surface,
                                           cfg.top_n, cfg.delta);
    const auto permissive = GenerateEmbeddingCandidates(
        state, pos, LexicalResources{&store, nullptr}, cfg);
    ASSERT_EQ(permissive.size(), raw.size());
    for (size_t k = 0; k < raw.size(); ++k) {
      EXPECT_EQ(permissive[k].word, raw[k].word);
    }

    cfg.epsilon = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto filtered = GenerateEmbeddingCandidates(
        state, pos, LexicalResources{&store, &lexicon}, cfg);
    size_t cursor = 0;
    for (const auto& c : filtered) {
      while (cursor < raw.size() && raw[cursor].word != c.word) ++cursor;
      ASSERT_LT(cursor, raw.size()) << "not an order-preserving subset";
      EXPECT_GE(c.sentence_sim, cfg.epsilon);
      EXPECT_TRUE(lexicon.SamePos(c.word, state.current_tokens()[pos].surface));
    }
  }
}

FunctionClassifier TableClassifier(std::map<std::string, double> p1) {
  return FunctionClassifier(2, [p1](std::string_view text) {
    const double p = p1.at(std::string(text));
    return LabelDistribution{{1.0 - p, p}};
  });
}

Candidate Cand(std::string word, double sim) {
  return Candidate{std::move(word), 0.5, true, sim};
}

TEST(ChooseBestTest, LowersConfidenceWithoutFlip) {
  // Four labels so that p(label 3) = 0.3 can remain the argmax.
  const FunctionClassifier clf(4, [](std::string_view text) {
    return text == "it was bad" ? LabelDistribution{{0.04, 0.03, 0.03, 0.9}}
                                : LabelDistribution{{0.25, 0.25, 0.2, 0.3}};
  });
  const PerturbedSample state(SharedSample("it was bad", 3));
  const std::vector<Candidate> cands = {Cand("weak", 0.8)};
  const auto choice = ChooseBest(cands, clf, state, 2, 3);
  ASSERT_TRUE(choice.has_value());
  EXPECT_EQ(choice->candidate.word, "weak");
  EXPECT_NEAR(choice->distribution.prob(3), 0.3, 1e-12);
  EXPECT_EQ(choice->distribution.Argmax(), 3);
}

TEST(ChooseBestTest, PicksLowestWhenNoFlip) {
  const auto clf = TableClassifier({{"it was bad", 0.9}, {"it was poor", 0.6},
                                    {"it was weak", 0.7}});
  const PerturbedSample state(SharedSample("it was bad"));
  const std::vector<Candidate> cands = {Cand("weak", 0.9), Cand("poor", 0.8)};
  const auto choice = ChooseBest(cands, clf, state, 2, 1);
  ASSERT_TRUE(choice.has_value());
  EXPECT_EQ(choice->candidate.word, "poor");
  EXPECT_EQ(choice->distribution.Argmax(), 1);
}

TEST(ChooseBestTest, FlipTieBreakBySimilarity) {
  const auto clf = TableClassifier(
      {{"it was bad", 0.9}, {"it was poor", 0.2}, {"it was weak", 0.4}});
  const PerturbedSample state(SharedSample("it was bad"));
  const std::vector<Candidate> cands = {Cand("poor", 0.8), Cand("weak", 0.9)};
  const auto choice = ChooseBest(cands, clf, state, 2, 1);
  ASSERT_TRUE(choice.has_value());
  EXPECT_EQ(choice->candidate.word, "weak");
  // Independent of candidate order.
  const std::vector<Candidate> reversed = {cands[1], cands[0]};
  EXPECT_EQ(ChooseBest(reversed, clf, state, 2, 1)->candidate.word, "weak");
}

TEST(ChooseBestTest, FirstFlipModeStopsEarly) {
  const auto inner = TableClassifier(
      {{"it was bad", 0.9}, {"it was poor", 0.2}, {"it was weak", 0.4}});
  QueryLedger ledger;
  CountingClassifier clf(inner, ledger);
  const PerturbedSample state(SharedSample("it was bad"));
  const std::vector<Candidate> cands = {Cand("poor", 0.8), Cand("weak", 0.9)};
  const auto choice =
      ChooseBest(cands, clf, state, 2, 1, inner.Classify("it was bad"),
                 ChooseMode::kFirstFlip);
  EXPECT_EQ(choice->candidate.word, "poor");
  EXPECT_EQ(ledger.counts().classify, 1u);
}

TEST(ChooseBestTest, NoImprovement) {
  const auto clf = TableClassifier(
      {{"it was bad", 0.6}, {"it was poor", 0.7}, {"it was weak", 0.6}});
  const PerturbedSample state(SharedSample("it was bad"));
  const std::vector<Candidate> cands = {Cand("poor", 0.8), Cand("weak", 0.9)};
  EXPECT_FALSE(ChooseBest(cands, clf, state, 2, 1).has_value());
  EXPECT_FALSE(ChooseBest({}, clf, state, 2, 1).has_value());
}

// Never returns a candidate that keeps the label without lowering p(label).
TEST(ChooseBestTest, NeverWorsensWithoutFlip) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::map<std::string, double> p1 = {{"x w", 0.5 + 0.5 * u(rng)}};
    std::vector<Candidate> cands;
    for (int k = 0; k < 4; ++k) {
      const std::string w = "c" + std::to_string(k);
      p1["x " + w] = u(rng);
      cands.push_back(Cand(w, u(rng)));
    }
    const auto clf = TableClassifier(p1);
    const PerturbedSample state(SharedSample("x w"));
    const auto choice = ChooseBest(cands, clf, state, 1, 1);
    if (!choice) continue;
    const double p = choice->distribution.probs[1];
    EXPECT_TRUE(choice->distribution.Argmax() != 1 || p < p1["x w"]);
  }
}

TEST(ReplacementConfigTest, Validate) {
  ReplacementConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.epsilon = 1.5;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg.epsilon = 0.5;
  cfg.top_n = 0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg.top_n = 1;
  cfg.k_lm = 0;
  EXPECT_THROW(cfg.Validate(), Error);
}

TEST(MatchCaseTest, Shapes) {
  EXPECT_EQ(MatchCase("great", "GOOD"), "GREAT");
  EXPECT_EQ(MatchCase("great", "Good"), "Great");
  EXPECT_EQ(MatchCase("great", "good"), "great");
  EXPECT_EQ(MatchCase("great", "I"), "Great");
}

TEST(ReplacementStrategyTest, Names) {
  EXPECT_EQ(ParseReplacementStrategy("tf-embed"), ReplacementStrategy::kEmbedding);
  EXPECT_EQ(ParseReplacementStrategy("bae-mlm"), ReplacementStrategy::kMaskedLm);
  EXPECT_FALSE(ParseReplacementStrategy("pso").has_value());
}

}  // namespace
}  // namespace advtext
