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

#include "isnad/annotator.hpp"

#include <cmath>
#include <ctime>
#include <regex>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "isnad/error.hpp"
#include "isnad/segment.hpp"
#include "isnad/similarity.hpp"
#include "isnad/text.hpp"

namespace isnad::annotate {

namespace {

struct TaskName {
  Task task;
  std::string_view name;
};

constexpr TaskName kTaskNames[] = {
    {Task::translate, "translate"},   {Task::diacritize, "diacritize"},
    {Task::summarize, "summarize"},   {Task::key_points, "key_points"},
    {Task::tag, "tag"},               {Task::segment_window, "segment_window"},
    {Task::classify_hadith, "classify_hadith"}, {Task::embed, "embed"},
};

std::string_view base_name(Task t) {
  for (const auto& tn : kTaskNames) {
    if (tn.task == t) return tn.name;
  }
  return "unknown";
}

bool is_arabic_script_language(std::string_view lang) {
  return lang == "fa" || lang == "ur" || lang == "ps" || lang == "ckb" || lang == "ug" || lang == "sd";
}

std::string_view transliterate(char32_t c) {
  switch (c) {
    case U'ا': return "a";
    case U'ب': return "b";
    case U'ت': return "t";
    case U'ث': return "th";
    case U'ج': return "j";
    case U'ح': return "h";
    case U'خ': return "kh";
    case U'د': return "d";
    case U'ذ': return "dh";
    case U'ر': return "r";
    case U'ز': return "z";
    case U'س': return "s";
    case U'ش': return "sh";
    case U'ص': return "s";
    case U'ض': return "d";
    case U'ط': return "t";
    case U'ظ': return "z";
    case U'ع': return "'";
    case U'غ': return "gh";
    case U'ف': return "f";
    case U'ق': return "q";
    case U'ك': return "k";
    case U'ل': return "l";
    case U'م': return "m";
    case U'ن': return "n";
    case U'ه': return "h";
    case U'و': return "w";
    case U'ي': return "y";
    case U'ى': return "a";
    case U'ة': return "h";
    case U'ء':
    case U'ئ':
    case U'ؤ': return "'";
    case U'أ':
    case U'إ':
    case U'آ': return "a";
    case U'،': return ",";
    case U'؛': return ";";
    case U'؟': return "?";
    default: return {};
  }
}

std::string mock_translate(const AnnotationRequest& r) {
  std::string out = "[" + r.language + "] ";
  if (is_arabic_script_language(r.language)) return out + r.input_text;
  for (char32_t c : text::to_u32(r.input_text)) {
    if (text::is_space(c)) {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else {
      out += transliterate(c);
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string mock_diacritize(std::string_view input) {
  static constexpr char32_t kHarakat[] = {0x064E, 0x064F, 0x0650};  // fatha, damma, kasra
  constexpr char32_t kSukun = 0x0652;
  const auto s = text::to_u32(input);
  std::u32string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char32_t c = s[i];
    out.push_back(c);
    if (!text::is_arabic_letter(c) || c == U'ا') continue;
    const bool word_end = i + 1 == s.size() || !text::is_arabic_letter(s[i + 1]);
    out.push_back(word_end ? kSukun : kHarakat[c % 3]);
  }
  return text::to_utf8(out);
}

std::string join_words(const std::vector<std::u32string>& ws, std::size_t n) {
  std::u32string out;
  for (std::size_t i = 0; i < n && i < ws.size(); ++i) {
    if (i) out.push_back(U' ');
    out += ws[i];
  }
  return text::to_utf8(out);
}

std::string mock_summarize(std::string_view input) {
  const auto s = text::to_u32(input);
  const auto ws = text::words(s);
  if (ws.size() >= 3) return join_words(ws, ws.size() / 3);
  const auto t = text::trim(s);
  return text::to_utf8(t.substr(0, t.size() / 2));
}

std::string mock_key_points(std::string_view input) {
  const auto s = text::to_u32(input);
  std::string out;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i < s.size() && !text::is_sentence_delimiter(s[i])) continue;
    const auto ws = text::words(s.substr(begin, i - begin));
    if (!ws.empty()) {
      if (!out.empty()) out.push_back('\n');
      out += join_words(ws, 6);
    }
    begin = i + 1;
  }
  return out;
}

std::string mock_tags(const AnnotationRequest& r) {
  json labels = json::array();
  if (!r.context || r.context->vocabulary.empty()) return labels.dump();
  const auto& vocab = r.context->vocabulary;
  const std::uint64_t h = similarity::fnv1a(r.input_text);
  labels.push_back(vocab[h % vocab.size()]);
  const auto second = vocab[(h / vocab.size()) % vocab.size()];
  if ((h >> 32) % 2 == 1 && second != labels[0].get<std::string>()) labels.push_back(second);
  return labels.dump();
}

std::string mock_classify(std::string_view input) {
  const auto ws = text::words(text::to_u32(input));
  return !ws.empty() && segment::is_transmission_opener(ws.front()) ? "true" : "false";
}

std::string mock_embed(std::string_view input) {
  similarity::HashingEmbedder embedder;
  return json(embedder.embed(input)).dump();
}

std::string mock_segment(std::string_view input) {
  segment::RuleSegmenter rule;
  return segment::verdict_to_json(rule.segment(text::to_u32(input))).dump();
}

json context_to_json(const AnnotationContext& c) {
  return json{{"book_title", c.book_title},
              {"adjacent_text", c.adjacent_text},
              {"vocabulary", c.vocabulary},
              {"pivot_translation", c.pivot_translation}};
}

AnnotationContext context_from_json(const json& j) {
  AnnotationContext c;
  c.book_title = j.value("book_title", "");
  c.adjacent_text = j.value("adjacent_text", "");
  c.vocabulary = j.value("vocabulary", std::vector<std::string>{});
  c.pivot_translation = j.value("pivot_translation", "");
  return c;
}

}  // namespace

std::string AnnotationRequest::task_name() const {
  std::string name(base_name(task));
  if (task == Task::translate) name += ":" + language;
  return name;
}

void validate(const AnnotationRequest& r) {
  if (r.request_id.empty()) throw ValidationError("request_id is non-empty");
  if (r.input_text.empty()) throw ValidationError("input_text is non-empty", r.request_id);
  if (r.task == Task::translate && r.language.empty()) {
    throw ValidationError("translate requests carry a language", r.request_id);
  }
}

json to_wire(const AnnotationRequest& r) {
  json j{{"request_id", r.request_id}, {"task", r.task_name()}, {"input_text", r.input_text}};
  j["context"] = r.context ? context_to_json(*r.context) : json(nullptr);
  return j;
}

AnnotationRequest request_from_wire(const json& j) {
  AnnotationRequest r;
  r.request_id = j.at("request_id").get<std::string>();
  r.input_text = j.at("input_text").get<std::string>();
  std::string task = j.at("task").get<std::string>();
  if (task.starts_with("translate:")) {
    r.task = Task::translate;
    r.language = task.substr(std::string_view("translate:").size());
  } else {
    bool found = false;
    for (const auto& tn : kTaskNames) {
      if (tn.name == task && tn.task != Task::translate) {
        r.task = tn.task;
        found = true;
      }
    }
    if (!found) throw ValidationError("task is known", task);
  }
  if (j.contains("context") && !j["context"].is_null()) r.context = context_from_json(j["context"]);
  validate(r);
  return r;
}

json to_wire(const AnnotationResponse& r) {
  return json{{"request_id", r.request_id}, {"output", r.output}, {"model_version", r.model_version}};
}

AnnotationResponse response_from_wire(const json& j) {
  AnnotationResponse r;
  r.request_id = j.at("request_id").get<std::string>();
  r.output = j.at("output").get<std::string>();
  r.model_version = j.value("model_version", "");
  return r;
}

bool is_retryable_status(int status) {
  return status == 408 || status == 425 || status == 429 || (status >= 500 && status <= 599);
}

std::string Transport::timestamp() const {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string mock_output(const AnnotationRequest& r) {
  switch (r.task) {
    case Task::translate: return mock_translate(r);
    case Task::diacritize: return mock_diacritize(r.input_text);
    case Task::summarize: return mock_summarize(r.input_text);
    case Task::key_points: return mock_key_points(r.input_text);
    case Task::tag: return mock_tags(r);
    case Task::segment_window: return mock_segment(r.input_text);
    case Task::classify_hadith: return mock_classify(r.input_text);
    case Task::embed: return mock_embed(r.input_text);
  }
  return {};
}

AnnotationResponse MockTransport::send(const AnnotationRequest& request) {
  ++calls_;
  return AnnotationResponse{request.request_id, mock_output(request), kVersion};
}

void validate(const ClientConfig& c) {
  if (c.max_attempts < 1) throw ValidationError("max_attempts >= 1");
  if (c.initial_backoff.count() < 0) throw ValidationError("initial_backoff >= 0");
  if (c.backoff_multiplier < 1.0) throw ValidationError("backoff_multiplier >= 1");
  if (c.rate_limit_rps < 0.0) throw ValidationError("rate_limit_rps >= 0");
  if (c.timeout.count() <= 0) throw ValidationError("timeout > 0");
  if (c.concurrency < 1) throw ValidationError("concurrency >= 1");
}

ClientConfig client_config_from_json(const json& j) {
  static const std::set<std::string> kKeys = {"endpoint",     "max_attempts", "initial_backoff_ms", "backoff_multiplier",
                                              "rate_limit_rps", "timeout_ms", "concurrency"};
  for (const auto& [k, v] : j.items()) {
    if (!kKeys.contains(k)) throw Error(ErrorKind::config, "unknown annotator setting: " + k);
  }
  ClientConfig c;
  c.endpoint = j.value("endpoint", c.endpoint);
  c.max_attempts = j.value("max_attempts", c.max_attempts);
  c.initial_backoff = std::chrono::milliseconds(j.value("initial_backoff_ms", c.initial_backoff.count()));
  c.backoff_multiplier = j.value("backoff_multiplier", c.backoff_multiplier);
  c.rate_limit_rps = j.value("rate_limit_rps", c.rate_limit_rps);
  c.timeout = std::chrono::milliseconds(j.value("timeout_ms", c.timeout.count()));
  c.concurrency = j.value("concurrency", c.concurrency);
  validate(c);
  return c;
}

json to_json(const ClientConfig& c) {
  return json{{"endpoint", c.endpoint},
              {"max_attempts", c.max_attempts},
              {"initial_backoff_ms", c.initial_backoff.count()},
              {"backoff_multiplier", c.backoff_multiplier},
              {"rate_limit_rps", c.rate_limit_rps},
              {"timeout_ms", c.timeout.count()},
              {"concurrency", c.concurrency}};
}

HttpTransport::HttpTransport(ClientConfig config) : config_(std::move(config)) {
  static const std::regex url(R"(^(http://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, url)) {
    throw Error(ErrorKind::config, "annotator endpoint must look like http://host:port/path: " + config_.endpoint);
  }
  scheme_host_port_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/";
}

AnnotationResponse HttpTransport::send(const AnnotationRequest& request) {
  httplib::Client client(scheme_host_port_);
  const auto secs = config_.timeout.count() / 1000;
  const auto usecs = (config_.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  auto res = client.Post(path_, to_wire(request).dump(), "application/json");
  if (!res) throw TransportError("annotator unreachable: " + httplib::to_string(res.error()), true);
  if (res->status != 200) {
    throw TransportError(fmt::format("annotator returned HTTP {}", res->status), is_retryable_status(res->status),
                         res->status);
  }
  try {
    return response_from_wire(json::parse(res->body));
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed annotator response: ") + e.what(), true, res->status);
  }
}

TokenBucket::TokenBucket(double rate_per_second, double burst, Sleeper sleeper)
    : rate_(rate_per_second), burst_(std::max(1.0, burst)), tokens_(std::max(1.0, burst)),
      last_(Clock::now()), sleeper_(std::move(sleeper)) {}

void TokenBucket::acquire() {
  if (rate_ <= 0.0) return;  // unlimited
  std::lock_guard lock(mutex_);
  const auto now = Clock::now();
  tokens_ = std::min(burst_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
  last_ = now;
  if (tokens_ < 1.0) {
    const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(wait);
    if (sleeper_) {
      sleeper_(ns);
    } else {
      std::this_thread::sleep_for(ns);
    }
    tokens_ = 1.0;
    last_ = std::max(last_ + ns, Clock::now());
  }
  tokens_ -= 1.0;
}

AnnotatorClient::AnnotatorClient(std::shared_ptr<Transport> transport, ClientConfig config, Sleeper sleeper)
    : transport_(std::move(transport)),
      config_(std::move(config)),
      sleeper_(std::move(sleeper)),
      bucket_(config_.rate_limit_rps, config_.rate_limit_rps, sleeper_) {
  validate(config_);
}

AnnotationOutcome AnnotatorClient::annotate(const AnnotationRequest& request) {
  validate(request);
  ++annotate_calls_;
  AnnotationOutcome out;
  out.annotator = transport_->name();
  auto backoff = std::chrono::duration<double, std::milli>(config_.initial_backoff);
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    out.attempts = attempt;
    ++attempts_;
    bucket_.acquire();
    bool retryable = true;
    try {
      auto response = transport_->send(request);
      if (response.request_id != request.request_id) {
        out.error = "response request_id mismatch";
      } else if (response.output.empty()) {
        out.error = "empty output";
      } else {
        out.ok = true;
        out.output = std::move(response.output);
        out.model_version = std::move(response.model_version);
        out.timestamp = transport_->timestamp();
        out.error.clear();
        return out;
      }
    } catch (const TransportError& e) {
      out.error = e.what();
      retryable = e.retryable();
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    if (!retryable || attempt == config_.max_attempts) break;
    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(backoff);
    if (sleeper_) {
      sleeper_(ns);
    } else {
      std::this_thread::sleep_for(ns);
    }
    backoff *= config_.backoff_multiplier;
  }
  out.timestamp = transport_->timestamp();
  return out;
}

}  // namespace isnad::annotate
