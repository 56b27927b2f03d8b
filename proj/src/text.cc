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

#include "advtext/text.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <utility>

#include "advtext/error.h"
#include "json.hpp"

namespace advtext {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyInput:
      return "EmptyInput";
    case ErrorCode::kInvalidPosition:
      return "InvalidPosition";
    case ErrorCode::kDegenerateSample:
      return "DegenerateSample";
    case ErrorCode::kDegenerateVector:
      return "DegenerateVector";
    case ErrorCode::kBackendError:
      return "BackendError";
    case ErrorCode::kInvalidConfig:
      return "InvalidConfig";
    case ErrorCode::kInputError:
      return "InputError";
  }
  return "Unknown";
}

namespace {

bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsPunct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

bool IsLetter(unsigned char c) { return c >= 0x80 || std::isalpha(c); }

bool HasLetter(std::string_view s) {
  return std::any_of(s.begin(), s.end(),
                     [](char c) { return IsLetter(static_cast<unsigned char>(c)); });
}

void Push(std::vector<Token>& out, std::string_view surface) {
  if (surface.empty()) return;
  out.push_back(Token{std::string(surface), out.size(), HasLetter(surface)});
}

}  // namespace

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    size_t end = i;
    while (end < text.size() && !IsSpace(text[end])) ++end;
    if (end == i) break;
    std::string_view chunk = text.substr(i, end - i);
    i = end;

    size_t lead = 0;
    while (lead < chunk.size() && IsPunct(chunk[lead])) ++lead;
    if (lead == chunk.size()) {
      Push(tokens, chunk);
      continue;
    }
    size_t trail = chunk.size();
    while (trail > lead && IsPunct(chunk[trail - 1])) --trail;
    Push(tokens, chunk.substr(0, lead));
    Push(tokens, chunk.substr(lead, trail - lead));
    Push(tokens, chunk.substr(trail));
  }
  if (tokens.empty()) {
    throw Error(ErrorCode::kEmptyInput, "text is empty after trimming");
  }
  return tokens;
}

std::string Detokenize(std::span<const Token> tokens) {
  std::string out;
  for (const Token& token : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += token.surface;
  }
  return out;
}

size_t CountWords(std::span<const Token> tokens) {
  return static_cast<size_t>(std::count_if(
      tokens.begin(), tokens.end(), [](const Token& t) { return t.is_word; }));
}

std::string FoldCase(std::string_view word) {
  std::string out(word);
  for (char& c : out) {
    if (static_cast<unsigned char>(c) < 0x80) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

Sample MakeSample(std::string id, std::string text, int gold_label) {
  Sample sample;
  sample.tokens = Tokenize(text);
  sample.id = std::move(id);
  sample.text = std::move(text);
  sample.gold_label = gold_label;
  return sample;
}

PerturbedSample::PerturbedSample(std::shared_ptr<const Sample> origin)
    : origin_(std::move(origin)), current_(origin_->tokens) {}

PerturbedSample PerturbedSample::Substitute(size_t position,
                                            std::string word) const {
  if (position >= current_.size() || !origin_->tokens[position].is_word) {
    throw Error(ErrorCode::kInvalidPosition,
                "position " + std::to_string(position) +
                    " is not a word token of sample '" + origin_->id + "'");
  }
  if (word.empty()) {
    throw Error(ErrorCode::kEmptyInput, "substitute word is empty");
  }
  PerturbedSample next = *this;
  next.current_[position].surface = word;
  auto it = std::find_if(
      next.substitutions_.begin(), next.substitutions_.end(),
      [position](const Substitution& s) { return s.position == position; });
  if (it != next.substitutions_.end()) {
    it->to = std::move(word);
  } else {
    next.substitutions_.push_back(Substitution{
        position, origin_->tokens[position].surface, std::move(word)});
  }
  return next;
}

double PerturbedWordRatio(const PerturbedSample& sample) {
  const size_t words = CountWords(sample.origin().tokens);
  if (words == 0) {
    throw Error(ErrorCode::kDegenerateSample,
                "sample '" + sample.origin().id + "' has no word tokens");
  }
  const auto changed = std::count_if(
      sample.substitutions().begin(), sample.substitutions().end(),
      [](const Substitution& s) { return s.from != s.to; });
  return static_cast<double>(changed) / static_cast<double>(words);
}

std::vector<Sample> ReadDataset(std::istream& in) {
  std::vector<Sample> samples;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      samples.push_back(MakeSample(obj.at("id").get<std::string>(),
                                   obj.at("text").get<std::string>(),
                                   obj.at("label").get<int>()));
      if (samples.back().gold_label < 0) {
        throw Error(ErrorCode::kInputError, "negative label");
      }
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kInputError,
                  "dataset line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return samples;
}

std::vector<Sample> LoadDataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInputError, "cannot open dataset " + path);
  return ReadDataset(in);
}

}  // namespace advtext
