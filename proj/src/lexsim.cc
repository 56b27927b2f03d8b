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

#include "advtext/lexsim.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "advtext/error.h"

namespace advtext {

namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double Norm(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

bool SameFoldedSurfaces(std::span<const Token> a, std::span<const Token> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](const Token& x, const Token& y) {
                      return FoldCase(x.surface) == FoldCase(y.surface);
                    });
}

}  // namespace

double Cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidConfig, "cosine of vectors of different dimension");
  }
  const double na = Norm(a);
  const double nb = Norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::kDegenerateVector, "cosine of a zero vector");
  }
  return std::clamp(Dot(a, b) / (na * nb), -1.0, 1.0);
}

double Cosine(const WordVector& a, const WordVector& b) {
  return Cosine(a.vec, b.vec);
}

bool EmbeddingStore::Add(std::string_view word, std::vector<double> vec) {
  if (vec.size() < 2) {
    throw Error(ErrorCode::kInvalidConfig, "embedding dimension must be >= 2");
  }
  if (dim_ != 0 && vec.size() != dim_) {
    throw Error(ErrorCode::kInvalidConfig,
                "embedding for '" + std::string(word) + "' has dimension " +
                    std::to_string(vec.size()) + ", expected " +
                    std::to_string(dim_));
  }
  const double norm = Norm(vec);
  if (norm == 0.0) {
    throw Error(ErrorCode::kDegenerateVector,
                "zero vector for '" + std::string(word) + "'");
  }
  dim_ = vec.size();
  std::string key = FoldCase(word);
  if (auto it = index_.find(key); it != index_.end()) {
    vecs_[it->second] = std::move(vec);
    norms_[it->second] = norm;
    return false;
  }
  index_.emplace(key, words_.size());
  words_.push_back(std::move(key));
  vecs_.push_back(std::move(vec));
  norms_.push_back(norm);
  return true;
}

EmbeddingStore EmbeddingStore::Read(std::istream& in,
                                    std::vector<std::string>* warnings) {
  EmbeddingStore store;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> vec;
    std::string value;
    while (fields >> value) {
      try {
        size_t used = 0;
        vec.push_back(std::stod(value, &used));
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kInputError,
                    "embeddings line " + std::to_string(line_no) +
                        ": bad value '" + value + "'");
      }
    }
    try {
      if (!store.Add(word, std::move(vec)) && warnings != nullptr) {
        warnings->push_back("embeddings line " + std::to_string(line_no) +
                            ": duplicate word '" + word +
                            "', keeping the last entry");
      }
    } catch (const Error& e) {
      throw Error(e.code() == ErrorCode::kDegenerateVector
                      ? ErrorCode::kDegenerateVector
                      : ErrorCode::kInputError,
                  "embeddings line " + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return store;
}

EmbeddingStore EmbeddingStore::Load(const std::string& path,
                                    std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInputError, "cannot open embeddings " + path);
  return Read(in, warnings);
}

bool EmbeddingStore::Contains(std::string_view word) const {
  return index_.contains(FoldCase(word));
}

const std::vector<double>* EmbeddingStore::Find(std::string_view word) const {
  auto it = index_.find(FoldCase(word));
  return it == index_.end() ? nullptr : &vecs_[it->second];
}

std::vector<ScoredWord> EmbeddingStore::NearestSynonyms(std::string_view word,
                                                        size_t top_n,
                                                        double delta) const {
  auto it = index_.find(FoldCase(word));
  if (it == index_.end() || top_n == 0) return {};
  const size_t query = it->second;
  const auto& qv = vecs_[query];
  std::vector<ScoredWord> hits;
  for (size_t i = 0; i < words_.size(); ++i) {
    if (i == query) continue;
    const double sim =
        std::clamp(Dot(qv, vecs_[i]) / (norms_[query] * norms_[i]), -1.0, 1.0);
    if (sim >= delta) hits.push_back(ScoredWord{words_[i], sim});
  }
  std::sort(hits.begin(), hits.end(),
            [](const ScoredWord& a, const ScoredWord& b) {
              if (a.similarity != b.similarity) {
                return a.similarity > b.similarity;
              }
              return a.word < b.word;
            });
  if (hits.size() > top_n) hits.resize(top_n);
  return hits;
}

std::optional<std::vector<double>> EmbeddingStore::MeanVector(
    std::span<const Token> tokens) const {
  std::vector<double> sum(dim_, 0.0);
  size_t hits = 0;
  for (const Token& token : tokens) {
    if (!token.is_word) continue;
    if (const auto* vec = Find(token.surface)) {
      for (size_t d = 0; d < dim_; ++d) sum[d] += (*vec)[d];
      ++hits;
    }
  }
  if (hits == 0) return std::nullopt;
  for (double& v : sum) v /= static_cast<double>(hits);
  return sum;
}

double EmbeddingStore::SentenceSimilarity(std::span<const Token> a,
                                          std::span<const Token> b) const {
  const bool identical = SameFoldedSurfaces(a, b);
  if (identical) return 1.0;
  const auto ma = MeanVector(a);
  const auto mb = MeanVector(b);
  if (!ma || !mb) return 0.5;
  const double na = Norm(*ma);
  const double nb = Norm(*mb);
  // Vectors can cancel out in the mean.
  if (na == 0.0 || nb == 0.0) return 0.5;
  const double cos = std::clamp(Dot(*ma, *mb) / (na * nb), -1.0, 1.0);
  return (cos + 1.0) / 2.0;
}

std::optional<PosTag> ParsePosTag(std::string_view name) {
  if (name == "NOUN") return PosTag::kNoun;
  if (name == "VERB") return PosTag::kVerb;
  if (name == "ADJ") return PosTag::kAdj;
  if (name == "ADV") return PosTag::kAdv;
  if (name == "OTHER") return PosTag::kOther;
  return std::nullopt;
}

std::string_view PosTagName(PosTag tag) {
  switch (tag) {
    case PosTag::kNoun:
      return "NOUN";
    case PosTag::kVerb:
      return "VERB";
    case PosTag::kAdj:
      return "ADJ";
    case PosTag::kAdv:
      return "ADV";
    case PosTag::kOther:
      return "OTHER";
  }
  return "OTHER";
}

void PosLexicon::Set(std::string_view word, PosTag tag) {
  tags_[FoldCase(word)] = tag;
}

PosTag PosLexicon::Tag(std::string_view word) const {
  auto it = tags_.find(FoldCase(word));
  return it == tags_.end() ? PosTag::kOther : it->second;
}

PosLexicon PosLexicon::Read(std::istream& in) {
  PosLexicon lexicon;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const size_t tab = line.find('\t');
    const auto tag = tab == std::string::npos
                         ? std::nullopt
                         : ParsePosTag(std::string_view(line).substr(tab + 1));
    if (!tag) {
      throw Error(ErrorCode::kInputError,
                  "pos lexicon line " + std::to_string(line_no) +
                      ": expected word<TAB>{NOUN,VERB,ADJ,ADV,OTHER}");
    }
    lexicon.Set(line.substr(0, tab), *tag);
  }
  return lexicon;
}

PosLexicon PosLexicon::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInputError, "cannot open lexicon " + path);
  return Read(in);
}

}  // namespace advtext
