// Copyright 2026 The isnad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Annotator client contract.
//
// A Transport turns one AnnotationRequest into one AnnotationResponse (or a
// TransportError). AnnotatorClient wraps a transport with retries,
// exponential backoff and a client-side token bucket. Two transports ship:
// MockTransport, a pure function of the request used for tests and offline
// runs, and HttpTransport, which speaks the wire format below.
//
// Wire format (HTTP POST, application/json):
//   request  {"request_id": str, "task": str, "input_text": str,
//             "context": {"book_title", "adjacent_text", "vocabulary",
//                         "pivot_translation"} | null}
//   response {"request_id": str, "output": str, "model_version": str}
// where task is one of translate:<lang>, diacritize, summarize, key_points,
// tag, segment_window, classify_hadith, embed.
//
// Status codes: 200 success; 408, 425, 429 and 5xx are retried; every other
// status fails the request immediately.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isnad/corpus.hpp"

namespace isnad::annotate {

enum class Task { translate, diacritize, summarize, key_points, tag, segment_window, classify_hadith, embed };

struct AnnotationContext {
  std::string book_title;
  std::string adjacent_text;
  std::vector<std::string> vocabulary;  // tag task
  std::string pivot_translation;        // summarize may draw on it

  bool operator==(const AnnotationContext&) const = default;
};

struct AnnotationRequest {
  std::string request_id;
  Task task = Task::summarize;
  std::string language;  // translate only
  std::string input_text;
  std::optional<AnnotationContext> context;

  /// Wire name, e.g. "translate:fa".
  std::string task_name() const;
};

/// Throws ValidationError: request_id and input_text non-empty, translate
/// carries a language.
void validate(const AnnotationRequest& r);

struct AnnotationResponse {
  std::string request_id;
  std::string output;
  std::string model_version;
};

json to_wire(const AnnotationRequest& r);
AnnotationRequest request_from_wire(const json& j);
json to_wire(const AnnotationResponse& r);
AnnotationResponse response_from_wire(const json& j);

/// HTTP statuses the client retries.
bool is_retryable_status(int status);

class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, bool retryable, int status = 0)
      : std::runtime_error(what), retryable_(retryable), status_(status) {}
  bool retryable() const noexcept { return retryable_; }
  int status() const noexcept { return status_; }

 private:
  bool retryable_;
  int status_;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual AnnotationResponse send(const AnnotationRequest& request) = 0;
  virtual std::string name() const = 0;
  /// Timestamp recorded in provenance. Wall clock unless overridden.
  virtual std::string timestamp() const;
};

/// Deterministic annotator: every output is a pure function of the request.
///  - translate: "[lang] " + a Latin transliteration (the input text kept for
///    Arabic-script target languages)
///  - diacritize: a fixed harakah after each letter, sukun at word end
///  - summarize: leading third of the words
///  - key_points: first words of each sentence, one per line
///  - tag: one or two labels picked from the context vocabulary by hash
///  - segment_window: the rule segmenter's verdict as JSON
///  - classify_hadith: "true" iff the text opens with a transmission formula
///  - embed: the local hashing embedding as a JSON array
class MockTransport : public Transport {
 public:
  static constexpr const char* kName = "mock-annotator";
  static constexpr const char* kVersion = "mock-1";

  AnnotationResponse send(const AnnotationRequest& request) override;
  std::string name() const override { return kName; }
  std::string timestamp() const override { return "1970-01-01T00:00:00Z"; }

  std::uint64_t calls() const { return calls_.load(); }

 private:
  std::atomic<std::uint64_t> calls_{0};
};

/// Pure mock output for a request; shared with MockTransport.
std::string mock_output(const AnnotationRequest& request);

struct ClientConfig {
  std::string endpoint;  // http://host:port/path; unused by the mock
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  double backoff_multiplier = 2.0;
  double rate_limit_rps = 20.0;
  std::chrono::milliseconds timeout{30000};
  int concurrency = 4;
};

/// Throws ValidationError on out-of-range fields. rate_limit_rps 0 disables
/// client-side rate limiting.
void validate(const ClientConfig& c);
ClientConfig client_config_from_json(const json& j);
json to_json(const ClientConfig& c);

class HttpTransport : public Transport {
 public:
  explicit HttpTransport(ClientConfig config);
  AnnotationResponse send(const AnnotationRequest& request) override;
  std::string name() const override { return "remote:" + config_.endpoint; }

 private:
  ClientConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

/// Blocking token bucket. Sleeps through the injected sleeper so tests can
/// observe waits without real time passing.
class TokenBucket {
 public:
  using Clock = std::chrono::steady_clock;
  using Sleeper = std::function<void(std::chrono::nanoseconds)>;

  TokenBucket(double rate_per_second, double burst, Sleeper sleeper = {});
  void acquire();

 private:
  std::mutex mutex_;
  double rate_;
  double burst_;
  double tokens_;
  Clock::time_point last_;
  Sleeper sleeper_;
};

struct AnnotationOutcome {
  bool ok = false;
  std::string output;
  std::string annotator;
  std::string model_version;
  std::string timestamp;
  int attempts = 0;
  std::string error;  // last failure when !ok
};

class AnnotatorClient {
 public:
  using Sleeper = std::function<void(std::chrono::nanoseconds)>;

  AnnotatorClient(std::shared_ptr<Transport> transport, ClientConfig config, Sleeper sleeper = {});

  /// Retries transport errors marked retryable and malformed responses
  /// (wrong request_id, empty output) up to max_attempts. Never throws for
  /// transport trouble; the outcome carries the failure.
  AnnotationOutcome annotate(const AnnotationRequest& request);

  const ClientConfig& config() const { return config_; }
  Transport& transport() { return *transport_; }
  std::uint64_t annotate_calls() const { return annotate_calls_.load(); }
  std::uint64_t attempts() const { return attempts_.load(); }

 private:
  std::shared_ptr<Transport> transport_;
  ClientConfig config_;
  Sleeper sleeper_;
  TokenBucket bucket_;
  std::atomic<std::uint64_t> annotate_calls_{0};
  std::atomic<std::uint64_t> attempts_{0};
};

}  // namespace isnad::annotate
