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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "advtext/attack.h"
#include "advtext/bench.h"
#include "advtext/ranking.h"
#include "test_util.h"

namespace advtext {
namespace {

using ::advtext::testing::BinaryFromWords;
using ::advtext::testing::EnumerateOcclusion;
using ::advtext::testing::KeywordFlag;
using ::advtext::testing::MakeKeywordSample;
using ::advtext::testing::MakeKeywordWorld;
using ::advtext::testing::SplitWords;

// Collects the first failure message of a criterion.
class Check {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok && message_.empty()) message_ = what;
  }
  void Near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s.precision(12);
    s << what << ": got " << got << ", want " << want << " +- " << tol;
    Expect(std::fabs(got - want) <= tol, s.str());
  }
  bool ok() const { return message_.empty(); }
  const std::string& message() const { return message_; }

 private:
  std::string message_;
};

double ScoreAt(const WordRanking& ranking, size_t position) {
  for (const auto& e : ranking.entries) {
    if (e.position == position) return e.score;
  }
  return std::nan("");
}

// Random small case: <= 6 words, <= 4 table words, logistic classifier.
struct OracleCase {
  std::function<double(const std::vector<std::string>&)> f;
  std::vector<std::pair<std::string, double>> table;
  std::string text;
  int label;
  bool renormalize;
};

OracleCase MakeOracleCase(std::mt19937& rng) {
  static const std::vector<std::string> vocab = {"a", "b", "c", "d",
                                                 "e", "f", "g"};
  auto weights = std::make_shared<std::map<std::string, double>>();
  for (const auto& w : vocab) {
    (*weights)[w] = std::uniform_real_distribution<double>(-3, 3)(rng);
  }
  const double bias = std::uniform_real_distribution<double>(-1, 1)(rng);
  OracleCase c;
  c.f = [weights, bias](const std::vector<std::string>& words) {
    double z = bias;
    for (const auto& w : words) {
      if (auto it = weights->find(w); it != weights->end()) z += it->second;
    }
    return 1.0 / (1.0 + std::exp(-z));
  };
  std::vector<std::string> shuffled = vocab;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const size_t table_size = 1 + rng() % 4;
  for (size_t k = 0; k < table_size; ++k) {
    c.table.emplace_back(shuffled[k], (1 + rng() % 100) / 400.0);
  }
  const size_t n_words = 1 + rng() % 6;
  for (size_t i = 0; i < n_words; ++i) {
    c.text += vocab[rng() % vocab.size()] + " ";
  }
  c.label = static_cast<int>(rng() % 2);
  c.renormalize = rng() % 2 == 0;
  return c;
}

// Runs `trials` random cases comparing `rank` to the enumeration `expect`.
void OracleSweep(
    Check& check, int trials,
    const std::function<WordRanking(const Classifier&, const MaskSampler&,
                                    const std::vector<Token>&, int,
                                    const OlmConfig&)>& rank,
    const std::function<double(double base, const testing::OracleStats&)>&
        expect) {
  std::mt19937 rng(20240601);
  for (int trial = 0; trial < trials; ++trial) {
    const OracleCase c = MakeOracleCase(rng);
    const auto fy = [&](const std::vector<std::string>& w) {
      return c.label == 1 ? c.f(w) : 1.0 - c.f(w);
    };
    const auto clf = BinaryFromWords(c.f);
    std::vector<SampledWord> table;
    for (const auto& [w, p] : c.table) table.push_back({w, p});
    const FixedTableSampler sampler(table);
    const auto tokens = Tokenize(c.text);
    const auto words = SplitWords(c.text);
    const auto ranking =
        rank(clf, sampler, tokens, c.label, OlmConfig{30, c.renormalize});
    const double base = fy(words);
    for (size_t pos = 0; pos < words.size(); ++pos) {
      const auto stats =
          EnumerateOcclusion(words, pos, c.table, fy, c.renormalize);
      check.Near(ScoreAt(ranking, pos), expect(base, stats), 1e-9,
                 "trial " + std::to_string(trial) + " position " +
                     std::to_string(pos));
    }
  }
}

Check OlmOracle() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  OracleSweep(check, 200,
              [](const auto& clf, const auto& s, const auto& t, int y,
                 const OlmConfig& cfg) { return RankOlm(clf, s, t, y, cfg); },
              [](double base, const auto& st) { return base - st.mean; });
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  check.Expect(secs < 5.0, "runtime " + std::to_string(secs) + " s");
  return check;
}

Check OlmSOracle() {
  Check check;
  OracleSweep(check, 200,
              [](const auto& clf, const auto& s, const auto& t, int y,
                 const OlmConfig& cfg) { return RankOlmS(clf, s, t, y, cfg); },
              [](double, const auto& st) { return st.stddev; });
  const auto clf = BinaryFromWords([](const std::vector<std::string>& w) {
    return std::find(w.begin(), w.end(), "fine") != w.end() ? 0.2 : 0.9;
  });
  for (double p : {1.0, 0.3}) {
    for (bool renormalize : {true, false}) {
      const FixedTableSampler single({{"fine", p}});
      const auto ranking = RankOlmS(clf, single, Tokenize("so very awful"), 1,
                                    OlmConfig{30, renormalize});
      for (const auto& e : ranking.entries) {
        check.Expect(e.score == 0.0, "single-candidate position not 0");
      }
    }
  }
  return check;
}

Check HandAnchors() {
  Check check;
  const auto clf = BinaryFromWords([](const std::vector<std::string>& w) {
    return std::find(w.begin(), w.end(), "fine") != w.end() ? 0.2 : 0.9;
  });
  const FixedTableSampler sampler({{"bad", 0.6}, {"fine", 0.4}});
  const auto tokens = Tokenize("so awful");
  check.Near(ScoreAt(RankOlm(clf, sampler, tokens, 1, OlmConfig{}), 1), 0.28,
             1e-5, "olm");
  check.Near(ScoreAt(RankOlmS(clf, sampler, tokens, 1, OlmConfig{}), 1),
             0.34293, 1e-5, "olm-s");
  return check;
}

Check RankingSeparation() {
  Check check;
  std::mt19937 rng(7);
  std::vector<std::string> fillers;
  for (int i = 0; i < 30; ++i) fillers.push_back("w" + std::to_string(i));
  std::string corpus;
  for (const auto& f : fillers) corpus += f + " ";
  const UnigramSampler sampler(std::vector<std::string>{corpus});
  for (int i = 0; i < 100; ++i) {
    const size_t n = 4 + rng() % 9;
    std::vector<std::string> words;
    for (size_t k = 0; k < n; ++k) words.push_back(fillers[rng() % fillers.size()]);
    const size_t key = rng() % (n + 1);
    words.insert(words.begin() + key, "bad");
    std::string text;
    for (const auto& w : words) text += w + " ";
    const Sample sample = MakeSample(std::to_string(i), text, 1);
    const LengthGatedClassifier clf("bad", sample.tokens.size(), 0.9);
    const auto del = RankDelete(clf, sample.tokens, 1);
    for (const auto& e : del.entries) {
      check.Expect(e.score == del.entries[0].score,
                   "delete not tied in sample " + sample.id);
    }
    const auto olm = RankOlm(clf, sampler, sample.tokens, 1, OlmConfig{});
    check.Expect(olm.entries[0].position == key &&
                     olm.entries[0].score > olm.entries[1].score,
                 "olm missed keyword in sample " + sample.id);
  }
  return check;
}

Check QueryAccounting() {
  Check check;
  const auto inner = KeywordFlag("w3");
  const FixedTableSampler five(
      {{"a", 0.2}, {"b", 0.2}, {"c", 0.2}, {"d", 0.2}, {"e", 0.2}});
  QueryLedger ledger;
  CountingClassifier clf(inner, ledger);
  const auto tokens = Tokenize("w0 w1 w2 w3 w4 w5 w6 w7");
  RankOlm(clf, five, tokens, 1, OlmConfig{});
  check.Expect(ledger.counts().classify == 41,
               "cold: " + std::to_string(ledger.counts().classify));
  RankOlm(clf, five, tokens, 1, OlmConfig{});
  check.Expect(ledger.counts().classify == 41, "warm cache issued queries");

  const FixedTableSampler two({{"p", 0.5}, {"q", 0.5}});
  const std::vector<Sample> dataset = {MakeSample("a", "w0 w1 w2 w3", 1),
                                       MakeSample("b", "w3 x y", 1)};
  const std::vector<size_t> n_values = {2, 3, 5, 10, 30};
  const auto points = SweepQueries(dataset, AttackBackends{&inner, &two, {}},
                                   AttackConfig{}, n_values);
  for (const auto& p : points) {
    check.Expect(p.avg_classify_queries == points[0].avg_classify_queries,
                 "sweep not constant at n=" + std::to_string(p.n_samples));
  }
  return check;
}

Check MetricIdentities() {
  Check check;
  const auto world = MakeKeywordWorld(31, 1);
  std::mt19937 rng(5);
  std::vector<Sample> dataset;
  for (int i = 0; i < 500; ++i) {
    std::string keyword;
    if (i < 400) {
      keyword = world.keywords[i % world.keywords.size()];
    } else if (i < 470) {
      keyword = world.orphans[0];
    }
    dataset.push_back(MakeKeywordSample(world, rng, std::to_string(i), keyword));
  }
  const AttackBackends backends{world.classifier.get(), world.sampler.get(),
                                {world.store.get(), world.lexicon.get()}};
  const RunReport r = Evaluate(dataset, backends, AttackConfig{}, 4).report;
  check.Expect(r.n_total == 500 && r.n_attempted == 470 && r.n_success == 400,
               "counts " + std::to_string(r.n_attempted) + "/" +
                   std::to_string(r.n_success));
  check.Near(r.original_acc, 0.94, 1e-12, "original_acc");
  check.Near(r.success_rate.value_or(-1), 0.851, 1e-3, "success_rate");
  check.Expect(r.attacked_acc == 0.14, "attacked_acc not exactly 0.14");
  check.Expect(r.n_attempted - r.n_success == 70, "attacked-correct count");
  return check;
}

Check EndToEnd() {
  Check check;
  const auto world = MakeKeywordWorld(99);
  check.Expect(world.store->words().size() == 50, "store size");
  std::mt19937 rng(17);
  std::vector<Sample> dataset;
  for (int i = 0; i < 100; ++i) {
    dataset.push_back(MakeKeywordSample(world, rng, std::to_string(i),
                                        world.keywords[i % 5]));
  }
  const LexicalResources lex{world.store.get(), world.lexicon.get()};
  const AttackBackends backends{world.classifier.get(), world.sampler.get(), lex};
  AttackConfig cfg;
  cfg.epsilon = 0.7;
  cfg.replacement.epsilon = 0.7;
  cfg.replacement.delta = 0.7;
  const Evaluation eval = Evaluate(dataset, backends, cfg, 2);
  check.Expect(eval.report.success_rate == 1.0, "success rate below 1");
  for (size_t i = 0; i < dataset.size(); ++i) {
    const AttackOutcome& o = eval.outcomes[i];
    check.Expect(o.kind == OutcomeKind::kSuccess && o.substitutions.size() == 1,
                 "sample " + o.id + " not a single-substitution success");
    const PerturbedSample replay = Replay(dataset[i], o.substitutions);
    check.Expect(replay.text() == o.final_text, "replay text " + o.id);
    check.Expect(world.classifier->Classify(replay.text()).Argmax() !=
                     dataset[i].gold_label,
                 "replay does not flip " + o.id);
    const auto final_tokens = replay.current_tokens();
    check.Expect(lex.SentenceSimilarity(dataset[i].tokens, final_tokens) >=
                     cfg.epsilon,
                 "similarity below epsilon " + o.id);
  }
  return check;
}

}  // namespace
}  // namespace advtext

int main() {
  using advtext::Check;
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"olm-oracle-equivalence", advtext::OlmOracle},
      {"olm-s-oracle-equivalence", advtext::OlmSOracle},
      {"hand-anchored-values", advtext::HandAnchors},
      {"ranking-separation", advtext::RankingSeparation},
      {"query-accounting", advtext::QueryAccounting},
      {"metric-identities", advtext::MetricIdentities},
      {"end-to-end-attack", advtext::EndToEnd},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Check check;
    try {
      check = run();
    } catch (const std::exception& e) {
      check.Expect(false, std::string("exception: ") + e.what());
    }
    if (check.ok()) {
      std::printf("PASS %s\n", name.c_str());
    } else {
      ++failures;
      std::printf("FAIL %s: %s\n", name.c_str(), check.message().c_str());
    }
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
