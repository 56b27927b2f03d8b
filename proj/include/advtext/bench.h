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

#ifndef ADVTEXT_BENCH_H_
#define ADVTEXT_BENCH_H_

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "advtext/attack.h"

namespace advtext {

struct RunReport {
  // Row label, normally the ranking strategy name.
  std::string label;
  double original_acc = 0.0;
  double attacked_acc = 0.0;
  // Not applicable when nothing was attempted.
  std::optional<double> success_rate;
  double mean_perturbed_pct = 0.0;
  double avg_classify_queries = 0.0;
  double avg_mask_queries = 0.0;
  size_t n_total = 0;
  size_t n_attempted = 0;
  size_t n_success = 0;
  size_t n_skipped = 0;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// Aggregates per-sample outcomes. Skipped samples count as incorrect both
// before and after the attack; means are over attempted samples.
RunReport Summarize(std::span<const AttackOutcome> outcomes,
                    std::string label);

struct Evaluation {
  std::vector<AttackOutcome> outcomes;
  RunReport report;
};

// Attacks every sample and summarizes. Throws kInputError on an empty
// dataset.
Evaluation Evaluate(std::span<const Sample> dataset,
                    const AttackBackends& backends, const AttackConfig& cfg,
                    size_t workers = 1);

struct SweepPoint {
  size_t n_samples = 0;
  double avg_classify_queries = 0.0;

  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

// Ranking-only pass over the dataset for each n in `n_values` (strictly
// ascending), recording the mean classifier queries per sample with a cold
// cache. Uses cfg.ranking and cfg.olm apart from n_samples.
std::vector<SweepPoint> SweepQueries(std::span<const Sample> dataset,
                                     const AttackBackends& backends,
                                     const AttackConfig& cfg,
                                     std::span<const size_t> n_values);

enum class ReportFormat { kMarkdown, kCsv, kJson };

// "markdown" / "md", "csv", "json"; throws kInvalidConfig otherwise.
ReportFormat ParseReportFormat(std::string_view name);

// Rows are ordered by label. Output is byte-deterministic.
std::string RenderReports(std::span<const RunReport> reports,
                          ReportFormat format);
std::string RenderReports(std::span<const RunReport> reports,
                          std::string_view format);

// Inverse of the JSON rendering.
std::vector<RunReport> ParseReportsJson(std::string_view json);

// One JSON object per line: id, kind, final_text, substitutions
// [{pos, from, to}], perturbed_pct, classify_queries, mask_queries.
void WriteOutcomesJsonl(std::span<const AttackOutcome> outcomes,
                        std::ostream& out);

std::string RenderSweep(std::span<const SweepPoint> points,
                        ReportFormat format);

}  // namespace advtext

#endif  // ADVTEXT_BENCH_H_
