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

// HTTP service backing the expert review form.
//
//   GET  /api/v1/sample/next?evaluator=ID   200 item | 204 nothing left | 400
//   POST /api/v1/evaluations                201 new | 200 unchanged | 400 | 422 | 500
//   GET  /api/v1/evaluations/{record_id}    200 record | 404
//   GET  /api/v1/report                     200 AggregateReport
//   GET  /healthz                           200
//
// Error bodies are {"error": kind, "message": str} plus "invariant" for
// 422 responses. The service keeps no state of its own beyond the open
// stores: every response is computed from what the stores hold.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "isnad/corpus.hpp"
#include "isnad/store.hpp"

namespace httplib {
class Server;
}

namespace isnad::service {

struct ServiceConfig {
  std::filesystem::path corpus_store;      // narrations (with group ids); may be absent
  std::filesystem::path bundles_store;     // may be absent
  std::filesystem::path evaluation_store;  // created when missing
  std::size_t sample_size = 1213;          // clipped to the corpus size
  std::uint64_t seed = 0;
  std::filesystem::path static_dir;        // review UI bundle, optional
};

struct Reply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  Reply next_item(const std::string& evaluator_id);
  Reply submit(const std::string& body);
  Reply get_evaluation(const std::string& record_id);
  Reply report();

  /// Ids of the review sample, in presentation order.
  const std::vector<std::string>& sample() const { return sample_; }

  /// Binds and serves until stop(). Returns false when the bind fails.
  bool listen(const std::string& host, int port);
  /// Binds to a free port and returns it (or -1); serve with listen_bound().
  int bind_any(const std::string& host);
  bool listen_bound();
  void stop();

 private:
  void install_routes();

  ServiceConfig config_;
  std::unique_ptr<RecordStore> corpus_;
  std::unique_ptr<RecordStore> bundles_;
  std::unique_ptr<RecordStore> evaluations_;
  std::vector<std::string> sample_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace isnad::service
