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

#include "advtext/bench.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "advtext/error.h"
#include "json.hpp"

namespace advtext {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string Fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string CsvField(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string MarkdownCell(std::string_view field) {
  std::string out;
  for (char c : field) {
    if (c == '|') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::vector<RunReport> SortedByLabel(std::span<const RunReport> reports) {
  std::vector<RunReport> rows(reports.begin(), reports.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const RunReport& a, const RunReport& b) {
                     return a.label < b.label;
                   });
  return rows;
}

const std::vector<std::string>& Columns() {
  static const std::vector<std::string> columns = {
      "strategy",        "original_acc",     "attacked_acc",
      "success_rate",    "perturbed_pct",    "avg_classify_queries",
      "avg_mask_queries", "n_total",         "n_attempted",
      "n_success",       "n_skipped"};
  return columns;
}

std::vector<std::string> Cells(const RunReport& r) {
  return {r.label,
          Fixed(r.original_acc),
          Fixed(r.attacked_acc),
          r.success_rate ? Fixed(*r.success_rate) : "n/a",
          Fixed(r.mean_perturbed_pct),
          Fixed(r.avg_classify_queries, 2),
          Fixed(r.avg_mask_queries, 2),
          std::to_string(r.n_total),
          std::to_string(r.n_attempted),
          std::to_string(r.n_success),
          std::to_string(r.n_skipped)};
}

ordered_json ToJson(const RunReport& r) {
  ordered_json j;
  j["strategy"] = r.label;
  j["original_acc"] = r.original_acc;
  j["attacked_acc"] = r.attacked_acc;
  j["success_rate"] =
      r.success_rate ? ordered_json(*r.success_rate) : ordered_json(nullptr);
  j["perturbed_pct"] = r.mean_perturbed_pct;
  j["avg_classify_queries"] = r.avg_classify_queries;
  j["avg_mask_queries"] = r.avg_mask_queries;
  j["n_total"] = r.n_total;
  j["n_attempted"] = r.n_attempted;
  j["n_success"] = r.n_success;
  j["n_skipped"] = r.n_skipped;
  return j;
}

}  // namespace

RunReport Summarize(std::span<const AttackOutcome> outcomes,
                    std::string label) {
  RunReport r;
  r.label = std::move(label);
  r.n_total = outcomes.size();
  double perturbed = 0.0;
  double classify = 0.0;
  double mask = 0.0;
  for (const AttackOutcome& o : outcomes) {
    if (o.kind == OutcomeKind::kSkipped) {
      ++r.n_skipped;
      continue;
    }
    ++r.n_attempted;
    if (o.kind == OutcomeKind::kSuccess) ++r.n_success;
    perturbed += o.perturbed_pct;
    classify += static_cast<double>(o.classify_queries);
    mask += static_cast<double>(o.mask_queries);
  }
  if (r.n_total > 0) {
    const auto total = static_cast<double>(r.n_total);
    r.original_acc = static_cast<double>(r.n_attempted) / total;
    r.attacked_acc = static_cast<double>(r.n_attempted - r.n_success) / total;
  }
  if (r.n_attempted > 0) {
    const auto attempted = static_cast<double>(r.n_attempted);
    r.success_rate = static_cast<double>(r.n_success) / attempted;
    r.mean_perturbed_pct = perturbed / attempted;
    r.avg_classify_queries = classify / attempted;
    r.avg_mask_queries = mask / attempted;
  }
  return r;
}

Evaluation Evaluate(std::span<const Sample> dataset,
                    const AttackBackends& backends, const AttackConfig& cfg,
                    size_t workers) {
  if (dataset.empty()) throw Error(ErrorCode::kInputError, "dataset is empty");
  Evaluation eval;
  eval.outcomes = AttackBatch(dataset, backends, cfg, workers);
  eval.report =
      Summarize(eval.outcomes, std::string(RankingStrategyName(cfg.ranking)));
  return eval;
}

std::vector<SweepPoint> SweepQueries(std::span<const Sample> dataset,
                                     const AttackBackends& backends,
                                     const AttackConfig& cfg,
                                     std::span<const size_t> n_values) {
  if (dataset.empty()) throw Error(ErrorCode::kInputError, "dataset is empty");
  if (n_values.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "n_values must be non-empty");
  }
  for (size_t k = 0; k < n_values.size(); ++k) {
    if (n_values[k] == 0 || (k > 0 && n_values[k] <= n_values[k - 1])) {
      throw Error(ErrorCode::kInvalidConfig,
                  "n_values must be positive and strictly ascending");
    }
  }
  if (backends.classifier == nullptr) {
    throw Error(ErrorCode::kInvalidConfig, "sweep needs a classifier");
  }
  std::vector<SweepPoint> points;
  for (size_t n : n_values) {
    double total = 0.0;
    for (const Sample& sample : dataset) {
      QueryLedger ledger;
      CountingClassifier classifier(*backends.classifier, ledger, cfg.memoize);
      RankingInputs inputs;
      inputs.classifier = &classifier;
      inputs.sampler = backends.sampler;
      inputs.olm = cfg.olm;
      inputs.olm.n_samples = n;
      inputs.unk_token = cfg.unk_token;
      if (cfg.ranking == RankingStrategy::kPwws) {
        inputs.synonyms = EmbeddingSynonyms(backends.lex, cfg.replacement);
      }
      Rank(cfg.ranking, inputs, sample.tokens, sample.gold_label);
      total += static_cast<double>(ledger.counts().classify);
    }
    points.push_back({n, total / static_cast<double>(dataset.size())});
  }
  return points;
}

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw Error(ErrorCode::kInvalidConfig,
              "unknown report format '" + std::string(name) + "'");
}

std::string RenderReports(std::span<const RunReport> reports,
                          ReportFormat format) {
  if (reports.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "no reports to render");
  }
  const auto rows = SortedByLabel(reports);
  std::ostringstream out;
  switch (format) {
    case ReportFormat::kJson: {
      ordered_json arr = ordered_json::array();
      for (const RunReport& r : rows) arr.push_back(ToJson(r));
      out << arr.dump(2) << '\n';
      break;
    }
    case ReportFormat::kCsv: {
      const auto& cols = Columns();
      for (size_t c = 0; c < cols.size(); ++c) {
        out << (c ? "," : "") << cols[c];
      }
      out << "\r\n";
      for (const RunReport& r : rows) {
        const auto cells = Cells(r);
        for (size_t c = 0; c < cells.size(); ++c) {
          out << (c ? "," : "") << CsvField(cells[c]);
        }
        out << "\r\n";
      }
      break;
    }
    case ReportFormat::kMarkdown: {
      const auto& cols = Columns();
      out << '|';
      for (const auto& c : cols) out << ' ' << c << " |";
      out << "\n|";
      for (size_t c = 0; c < cols.size(); ++c) out << (c ? " ---: |" : " --- |");
      out << '\n';
      for (const RunReport& r : rows) {
        out << '|';
        for (const auto& cell : Cells(r)) out << ' ' << MarkdownCell(cell) << " |";
        out << '\n';
      }
      break;
    }
  }
  return out.str();
}

std::string RenderReports(std::span<const RunReport> reports,
                          std::string_view format) {
  return RenderReports(reports, ParseReportFormat(format));
}

std::vector<RunReport> ParseReportsJson(std::string_view json) {
  std::vector<RunReport> reports;
  try {
    for (const auto& j : nlohmann::json::parse(json)) {
      RunReport r;
      r.label = j.at("strategy").get<std::string>();
      r.original_acc = j.at("original_acc").get<double>();
      r.attacked_acc = j.at("attacked_acc").get<double>();
      if (!j.at("success_rate").is_null()) {
        r.success_rate = j.at("success_rate").get<double>();
      }
      r.mean_perturbed_pct = j.at("perturbed_pct").get<double>();
      r.avg_classify_queries = j.at("avg_classify_queries").get<double>();
      r.avg_mask_queries = j.at("avg_mask_queries").get<double>();
      r.n_total = j.at("n_total").get<size_t>();
      r.n_attempted = j.at("n_attempted").get<size_t>();
      r.n_success = j.at("n_success").get<size_t>();
      r.n_skipped = j.at("n_skipped").get<size_t>();
      reports.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInputError, std::string("report JSON: ") + e.what());
  }
  return reports;
}

void WriteOutcomesJsonl(std::span<const AttackOutcome> outcomes,
                        std::ostream& out) {
  for (const AttackOutcome& o : outcomes) {
    ordered_json j;
    j["id"] = o.id;
    j["kind"] = OutcomeKindName(o.kind);
    j["final_text"] = o.final_text;
    ordered_json subs = ordered_json::array();
    for (const Substitution& s : o.substitutions) {
      subs.push_back({{"pos", s.position}, {"from", s.from}, {"to", s.to}});
    }
    j["substitutions"] = std::move(subs);
    j["perturbed_pct"] = o.perturbed_pct;
    j["classify_queries"] = o.classify_queries;
    j["mask_queries"] = o.mask_queries;
    if (!o.reason.empty()) j["reason"] = o.reason;
    out << j.dump() << '\n';
  }
}

std::string RenderSweep(std::span<const SweepPoint> points,
                        ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::kJson: {
      ordered_json arr = ordered_json::array();
      for (const SweepPoint& p : points) {
        arr.push_back({{"n_samples", p.n_samples},
                       {"avg_classify_queries", p.avg_classify_queries}});
      }
      out << arr.dump(2) << '\n';
      break;
    }
    case ReportFormat::kCsv:
      out << "n_samples,avg_classify_queries\r\n";
      for (const SweepPoint& p : points) {
        out << p.n_samples << ',' << Fixed(p.avg_classify_queries, 2) << "\r\n";
      }
      break;
    case ReportFormat::kMarkdown:
      out << "| n_samples | avg_classify_queries |\n| ---: | ---: |\n";
      for (const SweepPoint& p : points) {
        out << "| " << p.n_samples << " | " << Fixed(p.avg_classify_queries, 2)
            << " |\n";
      }
      break;
  }
  return out.str();
}

}  // namespace advtext
