/*
 * Copyright 2026 The SeeSay Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Minimal JSON-over-HTTP POST with bounded retries, shared by the live
// detector and VLM clients.

#include <chrono>
#include <map>
#include <string>
#include <thread>

#include "httplib.h"
#include "seesay/error.hpp"

namespace seesay {

struct RetryPolicy {
  int max_retries = 2;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{120};
};

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // begins with '/'
};

inline ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("url without scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

// POSTs `body` as application/json. Connection failures, 429 and 5xx are
// retried with exponential backoff; any other non-2xx status fails at once.
// Throws TransportError carrying the number of attempts made.
inline std::string post_json(const std::string& url, const std::string& body,
                             const std::map<std::string, std::string>& headers,
                             const RetryPolicy& policy) {
  const ParsedUrl target = parse_url(url);
  httplib::Headers hdrs(headers.begin(), headers.end());
  auto backoff = policy.initial_backoff;
  std::string last_error;
  int attempt = 0;
  for (;;) {
    ++attempt;
    httplib::Client client(target.origin);
    client.set_connection_timeout(policy.timeout);
    client.set_read_timeout(policy.timeout);
    client.set_write_timeout(policy.timeout);
    auto result = client.Post(target.path, hdrs, body, "application/json");
    bool retryable = true;
    if (!result) {
      last_error = "POST " + url + " failed: " + httplib::to_string(result.error());
    } else if (result->status >= 200 && result->status < 300) {
      return result->body;
    } else {
      last_error = "POST " + url + " returned HTTP " + std::to_string(result->status);
      retryable = result->status == 429 || result->status >= 500;
    }
    if (!retryable || attempt > policy.max_retries) throw TransportError(last_error, attempt);
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
}

}  // namespace seesay
