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

#ifndef ADVTEXT_MODEL_H_
#define ADVTEXT_MODEL_H_

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "advtext/text.h"

namespace advtext {

// Post-softmax label probabilities.
struct LabelDistribution {
  std::vector<double> probs;

  double prob(int label) const { return probs.at(static_cast<size_t>(label)); }
  // Lowest index wins ties.
  int Argmax() const;
  // Throws kBackendError unless there are >= 2 entries in [0,1] summing to 1
  // within 1e-6.
  void Validate() const;

  friend bool operator==(const LabelDistribution&,
                         const LabelDistribution&) = default;
};

struct SampledWord {
  std::string word;
  double prob = 0.0;

  friend bool operator==(const SampledWord&, const SampledWord&) = default;
};

// Black-box target model. Implementations must be safe to call concurrently.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual int num_labels() const = 0;
  virtual LabelDistribution Classify(std::string_view text) const = 0;
  // Default forwards one text at a time.
  virtual std::vector<LabelDistribution> ClassifyBatch(
      std::span<const std::string> texts) const;
};

// Proposes words for a masked position given the rest of the sentence.
// Returns at most n unique words in descending probability. Implementations
// must be safe to call concurrently.
class MaskSampler {
 public:
  virtual ~MaskSampler() = default;

  virtual std::vector<SampledWord> SampleMasked(std::span<const Token> tokens,
                                                size_t position,
                                                size_t n) const = 0;
};

// Throws kInvalidPosition unless `position` is a word token, kInvalidConfig
// when n == 0.
void CheckMaskRequest(std::span<const Token> tokens, size_t position, size_t n);

struct QueryCounts {
  uint64_t classify = 0;
  uint64_t mask = 0;

  friend bool operator==(const QueryCounts&, const QueryCounts&) = default;
};

class QueryLedger {
 public:
  void AddClassify(uint64_t n) { classify_.fetch_add(n); }
  void AddMask(uint64_t n) { mask_.fetch_add(n); }
  QueryCounts counts() const { return {classify_.load(), mask_.load()}; }

 private:
  std::atomic<uint64_t> classify_{0};
  std::atomic<uint64_t> mask_{0};
};

// Forwards to `inner`, counting every backend invocation (a batch of k
// uncached texts counts k). With memoization on, repeated texts are answered
// from a cache and do not count.
class CountingClassifier : public Classifier {
 public:
  CountingClassifier(const Classifier& inner, QueryLedger& ledger,
                     bool memoize = true)
      : inner_(inner), ledger_(ledger), memoize_(memoize) {}

  int num_labels() const override { return inner_.num_labels(); }
  LabelDistribution Classify(std::string_view text) const override;
  std::vector<LabelDistribution> ClassifyBatch(
      std::span<const std::string> texts) const override;

 private:
  const Classifier& inner_;
  QueryLedger& ledger_;
  bool memoize_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, LabelDistribution> cache_;
};

class CountingSampler : public MaskSampler {
 public:
  CountingSampler(const MaskSampler& inner, QueryLedger& ledger)
      : inner_(inner), ledger_(ledger) {}

  std::vector<SampledWord> SampleMasked(std::span<const Token> tokens,
                                        size_t position,
                                        size_t n) const override;

 private:
  const MaskSampler& inner_;
  QueryLedger& ledger_;
};

// ---------------------------------------------------------------------------
// In-process toy backends.

// p(label 1) = sigmoid(bias + sum of weights of the (case-folded) tokens in
// the text); binary.
class KeywordLogisticClassifier : public Classifier {
 public:
  KeywordLogisticClassifier(std::map<std::string, double> weights,
                            double bias);

  // Reads "word<TAB>weight" lines; a "__bias__" row sets the bias.
  static KeywordLogisticClassifier FromFile(const std::string& path);

  int num_labels() const override { return 2; }
  LabelDistribution Classify(std::string_view text) const override;

 private:
  std::map<std::string, double> weights_;
  double bias_;
};

// Binary classifier that is only confident on full-length inputs: when the
// text has fewer tokens than `min_tokens` it answers [0.5, 0.5]; otherwise
// p(label 1) is `confidence` if the keyword is present, 1 - confidence if not.
class LengthGatedClassifier : public Classifier {
 public:
  LengthGatedClassifier(std::string keyword, size_t min_tokens,
                        double confidence);

  int num_labels() const override { return 2; }
  LabelDistribution Classify(std::string_view text) const override;

 private:
  std::string keyword_;
  size_t min_tokens_;
  double confidence_;
};

// Adapts an arbitrary scoring function; used heavily by tests.
class FunctionClassifier : public Classifier {
 public:
  using Fn = std::function<LabelDistribution(std::string_view)>;
  FunctionClassifier(int num_labels, Fn fn)
      : num_labels_(num_labels), fn_(std::move(fn)) {}

  int num_labels() const override { return num_labels_; }
  LabelDistribution Classify(std::string_view text) const override {
    return fn_(text);
  }

 private:
  int num_labels_;
  Fn fn_;
};

// Returns the same table for every masked position, top-n by probability
// (ties by word).
class FixedTableSampler : public MaskSampler {
 public:
  explicit FixedTableSampler(std::vector<SampledWord> table);

  // Reads "word<TAB>prob" lines.
  static FixedTableSampler FromFile(const std::string& path);

  std::vector<SampledWord> SampleMasked(std::span<const Token> tokens,
                                        size_t position,
                                        size_t n) const override;

 private:
  std::vector<SampledWord> table_;
};

// Context-free unigram model over the word tokens of a corpus, case-folded.
class UnigramSampler : public MaskSampler {
 public:
  explicit UnigramSampler(std::span<const std::string> corpus);

  std::vector<SampledWord> SampleMasked(std::span<const Token> tokens,
                                        size_t position,
                                        size_t n) const override;

  const std::vector<SampledWord>& distribution() const { return dist_; }

 private:
  std::vector<SampledWord> dist_;
};

// Monte-Carlo wrapper: draws n words from the inner sampler's full
// distribution and reports empirical frequencies of the unique draws. The
// draw stream is seeded from (seed, context, position), so a call with n+1
// draws extends the draws made with n.
class DrawingSampler : public MaskSampler {
 public:
  DrawingSampler(const MaskSampler& inner, size_t support, uint64_t seed)
      : inner_(inner), support_(support), seed_(seed) {}

  std::vector<SampledWord> SampleMasked(std::span<const Token> tokens,
                                        size_t position,
                                        size_t n) const override;

 private:
  const MaskSampler& inner_;
  size_t support_;
  uint64_t seed_;
};

// Sorts descending by probability, ties by word.
void SortCandidates(std::vector<SampledWord>& words);

}  // namespace advtext

#endif  // ADVTEXT_MODEL_H_
