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

#include "advtext/model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "advtext/error.h"

namespace advtext {

namespace {

std::vector<std::string> FoldedWords(std::string_view text) {
  std::vector<std::string> words;
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    return words;
  }
  for (const Token& token : Tokenize(text)) {
    words.push_back(FoldCase(token.surface));
  }
  return words;
}

double Sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z))
                : std::exp(z) / (1.0 + std::exp(z));
}

uint64_t Fnv1a(uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::pair<std::string, std::string>> ReadTsv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInputError, "cannot open " + path);
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kInputError,
                  path + ":" + std::to_string(line_no) + ": expected a TAB");
    }
    rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return rows;
}

double ParseNumber(const std::string& s, const std::string& where) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInputError, where + ": bad number '" + s + "'");
  }
}

}  // namespace

int LabelDistribution::Argmax() const {
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) -
                          probs.begin());
}

void LabelDistribution::Validate() const {
  if (probs.size() < 2) {
    throw Error(ErrorCode::kBackendError, "distribution has < 2 labels");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kBackendError, "probability outside [0,1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error(ErrorCode::kBackendError,
                "probabilities sum to " + std::to_string(sum));
  }
}

std::vector<LabelDistribution> Classifier::ClassifyBatch(
    std::span<const std::string> texts) const {
  std::vector<LabelDistribution> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) out.push_back(Classify(text));
  return out;
}

void CheckMaskRequest(std::span<const Token> tokens, size_t position,
                      size_t n) {
  if (position >= tokens.size() || !tokens[position].is_word) {
    throw Error(ErrorCode::kInvalidPosition,
                "mask position " + std::to_string(position) +
                    " is not a word token");
  }
  if (n == 0) throw Error(ErrorCode::kInvalidConfig, "n must be >= 1");
}

void SortCandidates(std::vector<SampledWord>& words) {
  std::sort(words.begin(), words.end(),
            [](const SampledWord& a, const SampledWord& b) {
              if (a.prob != b.prob) return a.prob > b.prob;
              return a.word < b.word;
            });
}

LabelDistribution CountingClassifier::Classify(std::string_view text) const {
  const std::string key(text);
  if (memoize_) {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  LabelDistribution dist = inner_.Classify(text);
  ledger_.AddClassify(1);
  if (memoize_) {
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(key, dist);
  }
  return dist;
}

std::vector<LabelDistribution> CountingClassifier::ClassifyBatch(
    std::span<const std::string> texts) const {
  if (!memoize_) {
    auto out = inner_.ClassifyBatch(texts);
    ledger_.AddClassify(texts.size());
    return out;
  }
  std::vector<std::string> misses;
  {
    std::lock_guard<std::mutex> lock(mu_);
    std::unordered_set<std::string> seen;
    for (const std::string& text : texts) {
      if (!cache_.contains(text) && seen.insert(text).second) {
        misses.push_back(text);
      }
    }
  }
  if (!misses.empty()) {
    auto answers = inner_.ClassifyBatch(misses);
    if (answers.size() != misses.size()) {
      throw Error(ErrorCode::kBackendError, "batch answer has wrong length");
    }
    ledger_.AddClassify(misses.size());
    std::lock_guard<std::mutex> lock(mu_);
    for (size_t i = 0; i < misses.size(); ++i) {
      cache_.emplace(misses[i], std::move(answers[i]));
    }
  }
  std::vector<LabelDistribution> out;
  out.reserve(texts.size());
  std::lock_guard<std::mutex> lock(mu_);
  for (const std::string& text : texts) out.push_back(cache_.at(text));
  return out;
}

std::vector<SampledWord> CountingSampler::SampleMasked(
    std::span<const Token> tokens, size_t position, size_t n) const {
  CheckMaskRequest(tokens, position, n);
  auto out = inner_.SampleMasked(tokens, position, n);
  ledger_.AddMask(1);
  return out;
}

KeywordLogisticClassifier::KeywordLogisticClassifier(
    std::map<std::string, double> weights, double bias)
    : bias_(bias) {
  for (auto& [word, weight] : weights) weights_[FoldCase(word)] += weight;
}

KeywordLogisticClassifier KeywordLogisticClassifier::FromFile(
    const std::string& path) {
  std::map<std::string, double> weights;
  double bias = 0.0;
  for (const auto& [word, value] : ReadTsv(path)) {
    const double v = ParseNumber(value, path);
    if (word == "__bias__") {
      bias = v;
    } else {
      weights[word] = v;
    }
  }
  return KeywordLogisticClassifier(std::move(weights), bias);
}

LabelDistribution KeywordLogisticClassifier::Classify(
    std::string_view text) const {
  double z = bias_;
  for (const std::string& word : FoldedWords(text)) {
    if (auto it = weights_.find(word); it != weights_.end()) z += it->second;
  }
  const double p1 = Sigmoid(z);
  return LabelDistribution{{1.0 - p1, p1}};
}

LengthGatedClassifier::LengthGatedClassifier(std::string keyword,
                                             size_t min_tokens,
                                             double confidence)
    : keyword_(FoldCase(keyword)),
      min_tokens_(min_tokens),
      confidence_(confidence) {}

LabelDistribution LengthGatedClassifier::Classify(std::string_view text) const {
  const auto words = FoldedWords(text);
  if (words.size() < min_tokens_) return LabelDistribution{{0.5, 0.5}};
  const bool present =
      std::find(words.begin(), words.end(), keyword_) != words.end();
  const double p1 = present ? confidence_ : 1.0 - confidence_;
  return LabelDistribution{{1.0 - p1, p1}};
}

FixedTableSampler::FixedTableSampler(std::vector<SampledWord> table)
    : table_(std::move(table)) {
  std::unordered_set<std::string> seen;
  double total = 0.0;
  for (const SampledWord& w : table_) {
    if (w.word.empty() || !(w.prob > 0.0 && w.prob <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "table entries need a word and a probability in (0,1]");
    }
    if (!seen.insert(w.word).second) {
      throw Error(ErrorCode::kInvalidConfig, "duplicate word " + w.word);
    }
    total += w.prob;
  }
  if (total > 1.0 + 1e-6) {
    throw Error(ErrorCode::kInvalidConfig, "table probabilities exceed 1");
  }
  SortCandidates(table_);
}

FixedTableSampler FixedTableSampler::FromFile(const std::string& path) {
  std::vector<SampledWord> table;
  for (const auto& [word, value] : ReadTsv(path)) {
    table.push_back(SampledWord{word, ParseNumber(value, path)});
  }
  return FixedTableSampler(std::move(table));
}

std::vector<SampledWord> FixedTableSampler::SampleMasked(
    std::span<const Token> tokens, size_t position, size_t n) const {
  CheckMaskRequest(tokens, position, n);
  const size_t k = std::min(n, table_.size());
  return {table_.begin(), table_.begin() + static_cast<ptrdiff_t>(k)};
}

UnigramSampler::UnigramSampler(std::span<const std::string> corpus) {
  std::map<std::string, size_t> counts;
  size_t total = 0;
  for (const std::string& text : corpus) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    for (const Token& token : Tokenize(text)) {
      if (!token.is_word) continue;
      ++counts[FoldCase(token.surface)];
      ++total;
    }
  }
  for (const auto& [word, count] : counts) {
    dist_.push_back(SampledWord{
        word, static_cast<double>(count) / static_cast<double>(total)});
  }
  SortCandidates(dist_);
}

std::vector<SampledWord> UnigramSampler::SampleMasked(
    std::span<const Token> tokens, size_t position, size_t n) const {
  CheckMaskRequest(tokens, position, n);
  const size_t k = std::min(n, dist_.size());
  return {dist_.begin(), dist_.begin() + static_cast<ptrdiff_t>(k)};
}

std::vector<SampledWord> DrawingSampler::SampleMasked(
    std::span<const Token> tokens, size_t position, size_t n) const {
  CheckMaskRequest(tokens, position, n);
  const auto support = inner_.SampleMasked(tokens, position, support_);
  if (support.empty()) return {};
  double mass = 0.0;
  for (const SampledWord& w : support) mass += w.prob;

  uint64_t state = Fnv1a(14695981039346656037ULL ^ seed_,
                         std::to_string(position));
  for (const Token& token : tokens) state = Fnv1a(state, token.surface + " ");
  // splitmix64 keeps the stream identical across platforms.
  auto next_uniform = [&state]() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  };

  std::map<std::string, size_t> hits;
  for (size_t draw = 0; draw < n; ++draw) {
    double u = next_uniform() * mass;
    size_t pick = support.size() - 1;
    for (size_t k = 0; k < support.size(); ++k) {
      if (u < support[k].prob) {
        pick = k;
        break;
      }
      u -= support[k].prob;
    }
    ++hits[support[pick].word];
  }
  std::vector<SampledWord> out;
  for (const auto& [word, count] : hits) {
    out.push_back(SampledWord{
        word, static_cast<double>(count) / static_cast<double>(n)});
  }
  SortCandidates(out);
  return out;
}

}  // namespace advtext
