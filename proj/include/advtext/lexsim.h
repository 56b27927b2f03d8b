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

#ifndef ADVTEXT_LEXSIM_H_
#define ADVTEXT_LEXSIM_H_

#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "advtext/text.h"

namespace advtext {

struct WordVector {
  std::string word;
  std::vector<double> vec;
};

// Standard cosine. Throws kInvalidConfig on a dimension mismatch and
// kDegenerateVector if either vector has zero norm.
double Cosine(std::span<const double> a, std::span<const double> b);
double Cosine(const WordVector& a, const WordVector& b);

struct ScoredWord {
  std::string word;
  double similarity = 0.0;

  friend bool operator==(const ScoredWord&, const ScoredWord&) = default;
};

// Case-folded word vectors of one shared dimension (>= 2). Immutable once
// built.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  // Replaces an existing entry for the same folded word. Throws
  // kInvalidConfig on a dimension mismatch or d < 2, kDegenerateVector on a
  // zero vector. Returns false when an earlier entry was replaced.
  bool Add(std::string_view word, std::vector<double> vec);

  // "word v1 ... vd" lines. Duplicates keep the last entry; a warning per
  // duplicate is appended to `warnings` when given.
  static EmbeddingStore Read(std::istream& in,
                             std::vector<std::string>* warnings = nullptr);
  static EmbeddingStore Load(const std::string& path,
                             std::vector<std::string>* warnings = nullptr);

  size_t size() const { return words_.size(); }
  size_t dimension() const { return dim_; }
  bool empty() const { return words_.empty(); }
  bool Contains(std::string_view word) const;
  // nullptr when absent.
  const std::vector<double>* Find(std::string_view word) const;
  const std::vector<std::string>& words() const { return words_; }

  // Up to top_n other words with cosine >= delta, descending similarity,
  // ties lexicographic. Empty for a word not in the store.
  std::vector<ScoredWord> NearestSynonyms(std::string_view word, size_t top_n,
                                          double delta) const;

  // Cosine of the mean vectors of the in-vocabulary word tokens of each
  // side, mapped affinely onto [0,1]. If either side has no in-vocabulary
  // word: 1.0 for identical token lists, else 0.5.
  double SentenceSimilarity(std::span<const Token> a,
                            std::span<const Token> b) const;

 private:
  std::optional<std::vector<double>> MeanVector(
      std::span<const Token> tokens) const;

  size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<std::vector<double>> vecs_;
  std::vector<double> norms_;
  std::unordered_map<std::string, size_t> index_;
};

enum class PosTag { kNoun, kVerb, kAdj, kAdv, kOther };

std::optional<PosTag> ParsePosTag(std::string_view name);
std::string_view PosTagName(PosTag tag);

// Coarse word -> tag lexicon; unknown words are kOther.
class PosLexicon {
 public:
  PosLexicon() = default;

  void Set(std::string_view word, PosTag tag);
  PosTag Tag(std::string_view word) const;
  // Tags equal; two unknown words match.
  bool SamePos(std::string_view a, std::string_view b) const {
    return Tag(a) == Tag(b);
  }

  // "word<TAB>TAG" lines.
  static PosLexicon Read(std::istream& in);
  static PosLexicon Load(const std::string& path);

 private:
  std::unordered_map<std::string, PosTag> tags_;
};

}  // namespace advtext

#endif  // ADVTEXT_LEXSIM_H_
