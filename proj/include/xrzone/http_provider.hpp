// Copyright 2026 The xrzone Authors
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

#pragma once

#include <chrono>
#include <memory>
#include <regex>
#include <string>

// Eigen must precede httplib: <resolv.h> defines _res as a macro.
#include "xrzone/json.hpp"
#include "xrzone/recommender.hpp"

#include "httplib.h"

namespace xrzone {

/// Chat-completions provider over plain HTTP. The payload is sent as the
/// single user message; the first choice's content is returned.
class HttpProvider : public LanguageModelProvider {
 public:
  explicit HttpProvider(ProviderSettings settings) : settings_(std::move(settings)) {
    static const std::regex url_re(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(settings_.endpoint, m, url_re))
      throw Error(ErrorCode::kInvalidDocument, "provider endpoint '" + settings_.endpoint + "' is not a URL");
    if (m[1] == "https")
      throw Error(ErrorCode::kInvalidDocument, "this build has no TLS; use an http:// endpoint or a local proxy");
    host_ = m[2];
    port_ = m[3].matched ? std::stoi(m[3]) : 80;
    path_ = m[4].matched ? m[4].str() : "/v1/chat/completions";
  }

  std::string name() const override { return "http:" + settings_.model; }

  std::string complete(const std::string& payload, std::chrono::milliseconds timeout) override {
    httplib::Client client(host_, port_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!settings_.api_key.empty()) headers.emplace("Authorization", "Bearer " + settings_.api_key);
    const Json request{{"model", settings_.model},
                       {"temperature", 0},
                       {"messages", Json::array({Json{{"role", "user"}, {"content", payload}}})}};
    auto res = client.Post(path_, headers, request.dump(), "application/json");
    if (!res) {
      if (res.error() == httplib::Error::Read || res.error() == httplib::Error::Connection)
        throw Error(ErrorCode::kTimeout, "provider did not answer: " + httplib::to_string(res.error()));
      throw Error(ErrorCode::kProvider, "provider request failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200)
      throw Error(ErrorCode::kProvider, "provider returned HTTP " + std::to_string(res->status));
    try {
      const Json body = Json::parse(res->body);
      return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kProvider, std::string("unexpected provider response: ") + e.what());
    }
  }

 private:
  ProviderSettings settings_;
  std::string host_;
  int port_ = 80;
  std::string path_;
};

}  // namespace xrzone
