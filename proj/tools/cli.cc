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

#include "cli.h"

#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "advtext/attack.h"
#include "advtext/bench.h"
#include "advtext/error.h"
#include "advtext/remote.h"

namespace advtext {

namespace {

struct Options {
  std::string dataset;
  std::string backend;
  std::string sampler = "none";
  std::string embeddings;
  std::string pos_lexicon;
  std::string ranking = "olm";
  std::string replacement = "tf-embed";
  std::string unk_token = std::string(kDefaultUnkToken);
  double epsilon = 0.7;
  size_t n_samples = 30;
  bool no_renormalize = false;
  size_t top_n = 50;
  double delta = 0.7;
  size_t k_lm = 20;
  double max_perturb = 0.4;
  size_t workers = 1;
  uint64_t seed = 0;
  std::string out;
  std::string format = "markdown";
  std::string id;
  std::string n_values = "1,2,5,10,20,30";
  std::string outcomes;
};

// Everything a subcommand needs, resolved from Options.
struct Setup {
  std::vector<Sample> dataset;
  std::shared_ptr<RemoteEndpoint> classifier_endpoint;
  std::shared_ptr<RemoteEndpoint> sampler_endpoint;
  std::unique_ptr<Classifier> classifier;
  std::unique_ptr<MaskSampler> base_sampler;
  std::unique_ptr<MaskSampler> sampler;
  std::unique_ptr<EmbeddingStore> embeddings;
  std::unique_ptr<PosLexicon> lexicon;
  AttackConfig cfg;

  AttackBackends backends() const {
    return AttackBackends{classifier.get(), sampler.get(),
                          LexicalResources{embeddings.get(), lexicon.get()}};
  }
};

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

// Splits "kind:rest" once.
std::pair<std::string, std::string> SplitSpec(const std::string& spec) {
  const size_t colon = spec.find(':');
  if (colon == std::string::npos) return {spec, ""};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInputError, "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

RankingStrategy ToRanking(const std::string& name) {
  const auto parsed = ParseRankingStrategy(name);
  if (!parsed) {
    throw Error(ErrorCode::kInvalidConfig,
                "unknown ranking strategy '" + name +
                    "' (expected delete, unk, olm, olm-s, pwws)");
  }
  return *parsed;
}

std::unique_ptr<Classifier> MakeClassifier(const std::string& spec,
                                           Setup& setup) {
  auto [kind, rest] = SplitSpec(spec);
  if (kind == "remote") {
    setup.classifier_endpoint = std::make_shared<RemoteEndpoint>(rest);
    return std::make_unique<RemoteClassifier>(setup.classifier_endpoint);
  }
  if (kind == "toy") {
    auto [name, arg] = SplitSpec(rest);
    if (name == "keyword" && !arg.empty()) {
      return std::make_unique<KeywordLogisticClassifier>(
          KeywordLogisticClassifier::FromFile(arg));
    }
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown backend '" + spec +
                  "' (expected toy:keyword:<weights.tsv> or remote:<url>)");
}

void MakeSampler(const Options& opt, Setup& setup) {
  if (opt.sampler.empty() || opt.sampler == "none") return;
  auto [kind, rest] = SplitSpec(opt.sampler);
  if (kind == "remote") {
    setup.sampler_endpoint =
        setup.classifier_endpoint && opt.backend == "remote:" + rest
            ? setup.classifier_endpoint
            : std::make_shared<RemoteEndpoint>(rest);
    setup.sampler = std::make_unique<RemoteSampler>(setup.sampler_endpoint);
    return;
  }
  if (kind == "toy") {
    auto [name, arg] = SplitSpec(rest);
    if (name == "table" && !arg.empty()) {
      setup.sampler = std::make_unique<FixedTableSampler>(
          FixedTableSampler::FromFile(arg));
      return;
    }
    if (name == "unigram" || name == "unigram-draw") {
      std::vector<std::string> corpus;
      if (arg.empty()) {
        for (const Sample& s : setup.dataset) corpus.push_back(s.text);
      } else {
        corpus = ReadLines(arg);
      }
      auto unigram = std::make_unique<UnigramSampler>(corpus);
      if (name == "unigram") {
        setup.sampler = std::move(unigram);
      } else {
        const size_t support = unigram->distribution().size();
        setup.base_sampler = std::move(unigram);
        setup.sampler = std::make_unique<DrawingSampler>(
            *setup.base_sampler, support, opt.seed);
      }
      return;
    }
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown sampler '" + opt.sampler +
                  "' (expected none, toy:table:<file>, toy:unigram[:<file>], "
                  "toy:unigram-draw[:<file>] or remote:<url>)");
}

Setup Resolve(const Options& opt, std::ostream& err) {
  Setup setup;
  setup.dataset = LoadDataset(opt.dataset);
  if (!opt.embeddings.empty()) {
    std::vector<std::string> warnings;
    setup.embeddings = std::make_unique<EmbeddingStore>(
        EmbeddingStore::Load(opt.embeddings, &warnings));
    for (const auto& w : warnings) err << "warning: " << w << '\n';
  }
  if (!opt.pos_lexicon.empty()) {
    setup.lexicon =
        std::make_unique<PosLexicon>(PosLexicon::Load(opt.pos_lexicon));
  }

  AttackConfig& cfg = setup.cfg;
  const auto replacement = ParseReplacementStrategy(opt.replacement);
  if (!replacement) {
    throw Error(ErrorCode::kInvalidConfig,
                "unknown replacement '" + opt.replacement +
                    "' (expected tf-embed or bae-mlm)");
  }
  cfg.replacement.strategy = *replacement;
  cfg.replacement.top_n = opt.top_n;
  cfg.replacement.delta = opt.delta;
  cfg.replacement.epsilon = opt.epsilon;
  cfg.replacement.k_lm = opt.k_lm;
  cfg.olm.n_samples = opt.n_samples;
  cfg.olm.renormalize = !opt.no_renormalize;
  cfg.epsilon = opt.epsilon;
  cfg.max_perturb_fraction = opt.max_perturb;
  cfg.unk_token = opt.unk_token;
  cfg.Validate();

  setup.classifier = MakeClassifier(opt.backend, setup);
  MakeSampler(opt, setup);
  for (const Sample& s : setup.dataset) {
    if (s.gold_label >= setup.classifier->num_labels()) {
      throw Error(ErrorCode::kInputError,
                  "sample '" + s.id + "' has label " +
                      std::to_string(s.gold_label) + " but the classifier has " +
                      std::to_string(setup.classifier->num_labels()));
    }
  }
  return setup;
}

// Writes to --out when given, else to `out`.
void Emit(const Options& opt, const std::string& text, std::ostream& out) {
  if (opt.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(opt.out, std::ios::binary);
  if (!file) throw Error(ErrorCode::kInputError, "cannot write " + opt.out);
  file << text;
}

int RunRank(const Options& opt, std::ostream& out, std::ostream& err) {
  Setup setup = Resolve(opt, err);
  const Sample* sample = nullptr;
  for (const Sample& s : setup.dataset) {
    if (s.id == opt.id) sample = &s;
  }
  if (sample == nullptr) {
    throw Error(ErrorCode::kInputError, "no sample with id '" + opt.id + "'");
  }
  setup.cfg.ranking = ToRanking(opt.ranking);
  QueryLedger ledger;
  CountingClassifier classifier(*setup.classifier, ledger);
  std::optional<CountingSampler> sampler;
  if (setup.sampler) sampler.emplace(*setup.sampler, ledger);

  RankingInputs inputs;
  inputs.classifier = &classifier;
  inputs.sampler = sampler ? &*sampler : nullptr;
  inputs.olm = setup.cfg.olm;
  inputs.unk_token = setup.cfg.unk_token;
  const LexicalResources lex{setup.embeddings.get(), setup.lexicon.get()};
  if (setup.cfg.ranking == RankingStrategy::kPwws) {
    inputs.synonyms = EmbeddingSynonyms(lex, setup.cfg.replacement);
  }
  const WordRanking ranking =
      Rank(setup.cfg.ranking, inputs, sample->tokens, sample->gold_label);
  for (const auto& w : ranking.warnings) err << "warning: " << w << '\n';

  std::ostringstream table;
  table << "rank\tposition\tword\tscore\n";
  size_t rank = 0;
  for (const RankedPosition& e : ranking.entries) {
    char score[64];
    std::snprintf(score, sizeof(score), "%.6f", e.score);
    table << ++rank << '\t' << e.position << '\t'
          << sample->tokens[e.position].surface << '\t' << score << '\n';
  }
  const QueryCounts counts = ledger.counts();
  table << "# classify_queries=" << counts.classify
        << " mask_queries=" << counts.mask << '\n';
  Emit(opt, table.str(), out);
  return kExitOk;
}

int RunAttack(const Options& opt, std::ostream& out, std::ostream& err) {
  Setup setup = Resolve(opt, err);
  setup.cfg.ranking = ToRanking(opt.ranking);
  const Evaluation eval =
      Evaluate(setup.dataset, setup.backends(), setup.cfg, opt.workers);
  std::ostringstream jsonl;
  WriteOutcomesJsonl(eval.outcomes, jsonl);
  Emit(opt, jsonl.str(), out);
  const RunReport& r = eval.report;
  err << "attempted " << r.n_attempted << "/" << r.n_total << ", succeeded "
      << r.n_success << '\n';
  return kExitOk;
}

int RunBench(const Options& opt, std::ostream& out, std::ostream& err) {
  Setup setup = Resolve(opt, err);
  const auto format = ParseReportFormat(opt.format);
  const auto names = SplitList(opt.ranking);
  if (names.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "empty strategy grid");
  }
  std::vector<RunReport> reports;
  for (const std::string& name : names) {
    setup.cfg.ranking = ToRanking(name);
    Evaluation eval =
        Evaluate(setup.dataset, setup.backends(), setup.cfg, opt.workers);
    if (!opt.outcomes.empty()) {
      const std::string path = opt.outcomes + name + ".jsonl";
      std::ofstream file(path, std::ios::binary);
      if (!file) throw Error(ErrorCode::kInputError, "cannot write " + path);
      WriteOutcomesJsonl(eval.outcomes, file);
    }
    reports.push_back(std::move(eval.report));
  }
  Emit(opt, RenderReports(reports, format), out);
  return kExitOk;
}

int RunSweep(const Options& opt, std::ostream& out, std::ostream& err) {
  Setup setup = Resolve(opt, err);
  setup.cfg.ranking = ToRanking(opt.ranking);
  std::vector<size_t> n_values;
  for (const std::string& item : SplitList(opt.n_values)) {
    try {
      size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      n_values.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidConfig, "bad --n-values entry '" + item + "'");
    }
  }
  const auto points =
      SweepQueries(setup.dataset, setup.backends(), setup.cfg, n_values);
  Emit(opt, RenderSweep(points, ParseReportFormat(opt.format)), out);
  return kExitOk;
}

void AddCommonOptions(CLI::App& cmd, Options& opt) {
  cmd.add_option("--dataset", opt.dataset, "JSON-lines dataset")->required();
  cmd.add_option("--backend", opt.backend,
                 "Classifier: toy:keyword:<weights.tsv> | remote:<url>")
      ->required();
  cmd.add_option("--sampler", opt.sampler,
                 "Masked-word sampler: none | toy:table:<file> | "
                 "toy:unigram[:<file>] | toy:unigram-draw[:<file>] | "
                 "remote:<url>")
      ->capture_default_str();
  cmd.add_option("--embeddings", opt.embeddings, "Word vector file");
  cmd.add_option("--pos-lexicon", opt.pos_lexicon, "word<TAB>TAG lexicon");
  cmd.add_option("--replacement", opt.replacement, "tf-embed | bae-mlm")
      ->capture_default_str();
  cmd.add_option("--unk-token", opt.unk_token, "Token used by unk and pwws")
      ->capture_default_str();
  cmd.add_option("--epsilon", opt.epsilon, "Sentence similarity threshold")
      ->capture_default_str();
  cmd.add_option("--n-samples", opt.n_samples, "LM samples per position")
      ->capture_default_str();
  cmd.add_flag("--no-renormalize", opt.no_renormalize,
               "Keep raw LM mass of the unique samples");
  cmd.add_option("--top-n", opt.top_n, "Synonyms per word")
      ->capture_default_str();
  cmd.add_option("--delta", opt.delta, "Synonym cosine threshold")
      ->capture_default_str();
  cmd.add_option("--k-lm", opt.k_lm, "Masked-LM candidates per word")
      ->capture_default_str();
  cmd.add_option("--max-perturb", opt.max_perturb,
                 "Maximum fraction of words changed")
      ->capture_default_str();
  cmd.add_option("--workers", opt.workers, "Parallel attack workers")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--seed", opt.seed, "Seed for sampled candidates")
      ->capture_default_str();
  cmd.add_option("--out", opt.out, "Output file (default stdout)");
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  Options opt;
  CLI::App app{"Black-box word-substitution attacks on text classifiers",
               "advtext"};
  app.require_subcommand(1);

  auto* rank = app.add_subcommand("rank", "Print the word ranking of one sample");
  AddCommonOptions(*rank, opt);
  rank->add_option("--ranking", opt.ranking,
                   "delete | unk | olm | olm-s | pwws")
      ->capture_default_str();
  rank->add_option("--id", opt.id, "Sample id")->required();

  auto* attack = app.add_subcommand("attack", "Attack a dataset, write JSONL");
  AddCommonOptions(*attack, opt);
  attack->add_option("--ranking", opt.ranking, "Ranking strategy")
      ->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Compare ranking strategies");
  AddCommonOptions(*bench, opt);
  bench
      ->add_option("--ranking,--strategy-grid", opt.ranking,
                   "Comma-separated ranking strategies")
      ->capture_default_str();
  bench->add_option("--format", opt.format, "markdown | csv | json")
      ->capture_default_str();
  bench->add_option("--outcomes", opt.outcomes,
                    "Write per-sample JSONL to <prefix><strategy>.jsonl");

  auto* sweep = app.add_subcommand("sweep", "Ranking queries vs LM samples");
  AddCommonOptions(*sweep, opt);
  sweep->add_option("--ranking", opt.ranking, "olm | olm-s (or any)")
      ->capture_default_str();
  sweep->add_option("--n-values", opt.n_values, "Comma-separated sample counts")
      ->capture_default_str();
  sweep->add_option("--format", opt.format, "markdown | csv | json")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n";
    const CLI::App* sub =
        app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitInputError;
  }

  try {
    if (rank->parsed()) return RunRank(opt, out, err);
    if (attack->parsed()) return RunAttack(opt, out, err);
    if (bench->parsed()) return RunBench(opt, out, err);
    return RunSweep(opt, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kBackendError ? kExitBackendError
                                                : kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace advtext
