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

#ifndef ADVTEXT_REMOTE_H_
#define ADVTEXT_REMOTE_H_

#include <memory>
#include <mutex>
#include <string>

#include "advtext/model.h"

namespace httplib {
class Client;
}

namespace advtext {

// Client side of the JSON-over-HTTP model protocol:
//   POST /v1/classify   {"texts": [...]}                  -> {"probs": [[...]]}
//   POST /v1/fill_mask  {"tokens": [...], "position", "n"} -> {"candidates": [...]}
//   GET  /v1/meta                                         -> {"num_labels", "name"}
// Any transport failure, non-200 status or malformed body raises
// kBackendError; for HTTP errors the response body is part of the message.
class RemoteEndpoint {
 public:
  // `base_url` is scheme://host[:port]. Fetches /v1/meta eagerly.
  explicit RemoteEndpoint(const std::string& base_url,
                          size_t max_batch = 64);
  ~RemoteEndpoint();

  RemoteEndpoint(const RemoteEndpoint&) = delete;
  RemoteEndpoint& operator=(const RemoteEndpoint&) = delete;

  int num_labels() const { return num_labels_; }
  const std::string& name() const { return name_; }
  size_t max_batch() const { return max_batch_; }

  std::string Post(const std::string& path, const std::string& body) const;
  std::string Get(const std::string& path) const;

 private:
  std::string base_url_;
  size_t max_batch_;
  std::unique_ptr<httplib::Client> client_;
  mutable std::mutex mu_;
  int num_labels_ = 0;
  std::string name_;
};

class RemoteClassifier : public Classifier {
 public:
  explicit RemoteClassifier(std::shared_ptr<RemoteEndpoint> endpoint)
      : endpoint_(std::move(endpoint)) {}

  int num_labels() const override { return endpoint_->num_labels(); }
  LabelDistribution Classify(std::string_view text) const override;
  std::vector<LabelDistribution> ClassifyBatch(
      std::span<const std::string> texts) const override;

 private:
  std::shared_ptr<RemoteEndpoint> endpoint_;
};

class RemoteSampler : public MaskSampler {
 public:
  explicit RemoteSampler(std::shared_ptr<RemoteEndpoint> endpoint)
      : endpoint_(std::move(endpoint)) {}

  std::vector<SampledWord> SampleMasked(std::span<const Token> tokens,
                                        size_t position,
                                        size_t n) const override;

 private:
  std::shared_ptr<RemoteEndpoint> endpoint_;
};

}  // namespace advtext

#endif  // ADVTEXT_REMOTE_H_
