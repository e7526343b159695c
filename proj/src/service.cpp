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

#include "isnad/service.hpp"

#include <httplib.h>

#include "isnad/error.hpp"
#include "isnad/evaluate.hpp"

namespace isnad::service {

namespace {

Reply error_reply(int status, const std::string& kind, const std::string& message) {
  return Reply{status, json{{"error", kind}, {"message", message}}.dump()};
}

std::unique_ptr<RecordStore> open_optional(const std::filesystem::path& p) {
  if (p.empty() || !std::filesystem::exists(p)) return nullptr;
  return std::make_unique<RecordStore>(p, RecordStore::Options{false, false});
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  if (config_.evaluation_store.empty()) throw Error(ErrorKind::config, "serve: evaluation store path not set");
  corpus_ = open_optional(config_.corpus_store);
  bundles_ = open_optional(config_.bundles_store);
  evaluations_ = std::make_unique<RecordStore>(config_.evaluation_store);
  if (corpus_) {
    std::vector<std::string> ids;
    for (const auto& n : corpus_->load<Narration>().records) ids.push_back(n.narration_id);
    sample_ = evaluate::draw_sample(ids, std::min(config_.sample_size, ids.size()), config_.seed);
  }
  install_routes();
}

Service::~Service() { stop(); }

Reply Service::next_item(const std::string& evaluator_id) {
  if (evaluator_id.empty()) return error_reply(400, "request", "evaluator query parameter required");
  for (const auto& id : sample_) {
    if (evaluations_->get<EvaluationRecord>(id + "@" + evaluator_id)) continue;
    auto n = corpus_->get<Narration>(id);
    if (!n) continue;
    json item{{"narration", *n}, {"bundle", nullptr}, {"neighbors", json::array()}};
    if (bundles_) {
      if (auto b = bundles_->get<EnrichmentBundle>(id)) item["bundle"] = *b;
    }
    if (n->group_id) {
      for (const auto& other : corpus_->load<Narration>().records) {
        if (other.narration_id != id && other.group_id == n->group_id) item["neighbors"].push_back(other);
      }
    }
    return Reply{200, item.dump()};
  }
  return Reply{204, ""};
}

Reply Service::submit(const std::string& body) {
  EvaluationRecord record;
  try {
    record = json::parse(body).get<EvaluationRecord>();
  } catch (const ValidationError& e) {
    return Reply{422, json{{"error", "validation"}, {"invariant", e.invariant()}, {"message", e.what()}}.dump()};
  } catch (const std::exception& e) {
    return error_reply(400, "malformed", e.what());
  }
  try {
    validate(record);
  } catch (const ValidationError& e) {
    return Reply{422, json{{"error", "validation"}, {"invariant", e.invariant()}, {"message", e.what()}}.dump()};
  }
  try {
    const bool written = evaluations_->put_if_changed(record);
    return Reply{written ? 201 : 200, json{{"record_id", record.record_id()}, {"created", written}}.dump()};
  } catch (const std::exception& e) {
    return error_reply(500, "store", e.what());
  }
}

Reply Service::get_evaluation(const std::string& record_id) {
  auto r = evaluations_->get<EvaluationRecord>(record_id);
  if (!r) return error_reply(404, "not_found", record_id);
  return Reply{200, json(*r).dump()};
}

Reply Service::report() {
  const auto records = evaluations_->load<EvaluationRecord>().records;
  return Reply{200, evaluate::to_json(evaluate::build_report(records)).dump()};
}

void Service::install_routes() {
  server_ = std::make_unique<httplib::Server>();
  auto send = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    if (r.status != 204) res.set_content(r.body, r.content_type);
  };
  server_->Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });
  server_->Get("/api/v1/sample/next", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, next_item(req.get_param_value("evaluator")));
  });
  server_->Post("/api/v1/evaluations", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, submit(req.body));
  });
  server_->Get(R"(/api/v1/evaluations/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, get_evaluation(req.matches[1]));
  });
  server_->Get("/api/v1/report", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, report());
  });
  if (!config_.static_dir.empty()) server_->set_mount_point("/", config_.static_dir.string());
}

bool Service::listen(const std::string& host, int port) { return server_->listen(host, port); }

int Service::bind_any(const std::string& host) { return server_->bind_to_any_port(host); }

bool Service::listen_bound() { return server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

}  // namespace isnad::service
