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

#ifndef ADVTEXT_TEXT_H_
#define ADVTEXT_TEXT_H_

#include <cstddef>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace advtext {

struct Token {
  std::string surface;
  size_t position = 0;
  // False for punctuation and number-only tokens.
  bool is_word = false;

  friend bool operator==(const Token&, const Token&) = default;
};

// Splits on whitespace, then peels leading and trailing punctuation runs off
// each chunk into their own tokens. A token is a word iff it contains at
// least one letter (any non-ASCII byte counts as a letter). Throws
// kEmptyInput on blank text.
std::vector<Token> Tokenize(std::string_view text);

// Joins surfaces with single spaces. This is the text classifiers see.
std::string Detokenize(std::span<const Token> tokens);

size_t CountWords(std::span<const Token> tokens);

std::string FoldCase(std::string_view word);

struct Sample {
  std::string id;
  std::string text;
  std::vector<Token> tokens;
  int gold_label = 0;
};

Sample MakeSample(std::string id, std::string text, int gold_label);

struct Substitution {
  size_t position = 0;
  std::string from;
  std::string to;

  friend bool operator==(const Substitution&, const Substitution&) = default;
};

// An immutable view of a sample with a set of word substitutions applied.
// Each position appears at most once in substitutions(); `from` always holds
// the surface from the origin sample.
class PerturbedSample {
 public:
  explicit PerturbedSample(std::shared_ptr<const Sample> origin);

  const Sample& origin() const { return *origin_; }
  const std::shared_ptr<const Sample>& origin_ptr() const { return origin_; }
  const std::vector<Substitution>& substitutions() const {
    return substitutions_;
  }
  const std::vector<Token>& current_tokens() const { return current_; }
  std::string text() const { return Detokenize(current_); }

  // Last write wins for a repeated position. Throws kInvalidPosition for an
  // out-of-range or non-word position, kEmptyInput for an empty word.
  PerturbedSample Substitute(size_t position, std::string word) const;

 private:
  std::shared_ptr<const Sample> origin_;
  std::vector<Substitution> substitutions_;
  std::vector<Token> current_;
};

// |substitutions that changed the surface| / |word tokens|. Throws
// kDegenerateSample if the origin has no word tokens.
double PerturbedWordRatio(const PerturbedSample& sample);

// Reads {"id","text","label"} JSON lines; blank lines are skipped. Throws
// kInputError naming the offending line.
std::vector<Sample> ReadDataset(std::istream& in);
std::vector<Sample> LoadDataset(const std::string& path);

}  // namespace advtext

#endif  // ADVTEXT_TEXT_H_
