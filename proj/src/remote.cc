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

#include "advtext/remote.h"

#include <unordered_set>

#include "advtext/error.h"
#include "httplib.h"
#include "json.hpp"

namespace advtext {

namespace {

using nlohmann::json;

json ParseBody(const std::string& body, const std::string& what) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBackendError,
                what + ": malformed JSON response: " + e.what());
  }
}

}  // namespace

RemoteEndpoint::RemoteEndpoint(const std::string& base_url, size_t max_batch)
    : base_url_(base_url),
      max_batch_(max_batch == 0 ? 1 : max_batch),
      client_(std::make_unique<httplib::Client>(base_url)) {
  if (!client_->is_valid()) {
    throw Error(ErrorCode::kBackendError, "invalid backend URL " + base_url);
  }
  client_->set_connection_timeout(5);
  client_->set_read_timeout(120);
  const json meta = ParseBody(Get("/v1/meta"), "/v1/meta");
  try {
    num_labels_ = meta.at("num_labels").get<int>();
    name_ = meta.value("name", "");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBackendError,
                std::string("/v1/meta: ") + e.what());
  }
  if (num_labels_ < 2) {
    throw Error(ErrorCode::kBackendError, "/v1/meta: num_labels < 2");
  }
}

RemoteEndpoint::~RemoteEndpoint() = default;

std::string RemoteEndpoint::Post(const std::string& path,
                                 const std::string& body) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto res = client_->Post(path, body, "application/json");
  if (!res) {
    throw Error(ErrorCode::kBackendError,
                "POST " + base_url_ + path + " failed: " +
                    httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kBackendError,
                "POST " + path + " returned HTTP " +
                    std::to_string(res->status) + ": " + res->body);
  }
  return res->body;
}

std::string RemoteEndpoint::Get(const std::string& path) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto res = client_->Get(path);
  if (!res) {
    throw Error(ErrorCode::kBackendError,
                "GET " + base_url_ + path + " failed: " +
                    httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kBackendError,
                "GET " + path + " returned HTTP " +
                    std::to_string(res->status) + ": " + res->body);
  }
  return res->body;
}

LabelDistribution RemoteClassifier::Classify(std::string_view text) const {
  const std::string owned(text);
  return ClassifyBatch(std::span<const std::string>(&owned, 1)).front();
}

std::vector<LabelDistribution> RemoteClassifier::ClassifyBatch(
    std::span<const std::string> texts) const {
  std::vector<LabelDistribution> out;
  out.reserve(texts.size());
  for (size_t begin = 0; begin < texts.size();
       begin += endpoint_->max_batch()) {
    const auto chunk = texts.subspan(
        begin, std::min(endpoint_->max_batch(), texts.size() - begin));
    const json request = {
        {"texts", std::vector<std::string>(chunk.begin(), chunk.end())}};
    const json response =
        ParseBody(endpoint_->Post("/v1/classify", request.dump()),
                  "/v1/classify");
    try {
      const auto& rows = response.at("probs");
      if (!rows.is_array() || rows.size() != chunk.size()) {
        throw Error(ErrorCode::kBackendError,
                    "/v1/classify: expected " + std::to_string(chunk.size()) +
                        " rows");
      }
      for (const auto& row : rows) {
        LabelDistribution dist{row.get<std::vector<double>>()};
        dist.Validate();
        if (static_cast<int>(dist.probs.size()) != endpoint_->num_labels()) {
          throw Error(ErrorCode::kBackendError,
                      "/v1/classify: row length differs from num_labels");
        }
        out.push_back(std::move(dist));
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kBackendError,
                  std::string("/v1/classify: ") + e.what());
    }
  }
  return out;
}

std::vector<SampledWord> RemoteSampler::SampleMasked(
    std::span<const Token> tokens, size_t position, size_t n) const {
  CheckMaskRequest(tokens, position, n);
  std::vector<std::string> surfaces;
  surfaces.reserve(tokens.size());
  for (const Token& token : tokens) surfaces.push_back(token.surface);
  const json request = {
      {"tokens", surfaces}, {"position", position}, {"n", n}};
  const json response = ParseBody(
      endpoint_->Post("/v1/fill_mask", request.dump()), "/v1/fill_mask");
  std::vector<SampledWord> out;
  try {
    std::unordered_set<std::string> seen;
    double total = 0.0;
    for (const auto& item : response.at("candidates")) {
      SampledWord w{item.at("word").get<std::string>(),
                    item.at("prob").get<double>()};
      if (w.word.empty() || !(w.prob > 0.0 && w.prob <= 1.0)) {
        throw Error(ErrorCode::kBackendError,
                    "/v1/fill_mask: invalid candidate '" + w.word + "'");
      }
      if (!seen.insert(w.word).second) {
        throw Error(ErrorCode::kBackendError,
                    "/v1/fill_mask: duplicate candidate '" + w.word + "'");
      }
      if (!out.empty() && w.prob > out.back().prob) {
        throw Error(ErrorCode::kBackendError,
                    "/v1/fill_mask: candidates not in descending order");
      }
      total += w.prob;
      out.push_back(std::move(w));
    }
    if (total > 1.0 + 1e-6) {
      throw Error(ErrorCode::kBackendError,
                  "/v1/fill_mask: probabilities exceed 1");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBackendError,
                std::string("/v1/fill_mask: ") + e.what());
  }
  if (out.size() > n) out.resize(n);
  return out;
}

}  // namespace advtext
