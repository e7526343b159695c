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

#include "isnad/enrich.hpp"

#include <algorithm>
#include <thread>

#include "isnad/error.hpp"
#include "isnad/text.hpp"

namespace isnad::enrich {

namespace {

using annotate::AnnotationRequest;
using annotate::Task;

bool is_arabic_script_language(std::string_view lang) {
  return lang == "ar" || lang == "fa" || lang == "ur" || lang == "ps" || lang == "ckb" || lang == "ug" ||
         lang == "sd";
}

bool slot_filled(const EnrichmentBundle& b, const std::string& slot) {
  auto it = b.annotator_provenance.find(slot);
  if (it == b.annotator_provenance.end() || it->second.status != LayerStatus::ok) return false;
  if (slot.starts_with("translate:")) return b.translations.contains(slot.substr(10));
  if (slot == "diacritize_chain") return b.diacritized_chain.has_value();
  if (slot == "diacritize_text") return b.diacritized_text.has_value();
  if (slot == "summary") return b.summary.has_value();
  if (slot == "key_points") return b.key_points.has_value();
  if (slot == "tags") return b.tags.has_value();
  if (slot == "classify") return b.classified_hadith.has_value();
  return false;
}

void clear_slot(EnrichmentBundle& b, const std::string& slot) {
  if (slot.starts_with("translate:")) b.translations.erase(slot.substr(10));
  if (slot == "diacritize_chain") b.diacritized_chain.reset();
  if (slot == "diacritize_text") b.diacritized_text.reset();
  if (slot == "summary") b.summary.reset();
  if (slot == "key_points") b.key_points.reset();
  if (slot == "tags") b.tags.reset();
  if (slot == "classify") b.classified_hadith.reset();
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t nl = s.find('\n', pos);
    if (nl == std::string_view::npos) nl = s.size();
    auto line = text::to_utf8(text::trim(text::to_u32(s.substr(pos, nl - pos))));
    if (!line.empty()) out.push_back(std::move(line));
    pos = nl + 1;
  }
  return out;
}

std::optional<std::vector<std::string>> parse_tags(std::string_view output) {
  try {
    const auto j = json::parse(output);
    if (!j.is_array()) return std::nullopt;
    std::vector<std::string> tags;
    for (const auto& t : j) {
      if (!t.is_string()) return std::nullopt;
      tags.push_back(t.get<std::string>());
    }
    return tags;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

struct SlotPlan {
  std::string key;
  AnnotationRequest request;
  std::string upstream;  // slot that must be filled first, may be empty
};

std::vector<SlotPlan> plan(const Narration& n, const EnrichOptions& o) {
  const auto has = [&](Layer l) { return std::find(o.layers.begin(), o.layers.end(), l) != o.layers.end(); };
  const bool pivot_translated =
      has(Layer::translate) && std::find(o.languages.begin(), o.languages.end(), o.pivot_language) != o.languages.end();
  auto request = [&](const std::string& key, Task task, std::string input) {
    AnnotationRequest r;
    r.request_id = n.narration_id + ":" + key;
    r.task = task;
    r.input_text = std::move(input);
    return r;
  };

  std::vector<SlotPlan> out;
  if (has(Layer::translate)) {
    // The pivot goes first; summaries depend on it.
    std::vector<std::string> langs = o.languages;
    std::stable_partition(langs.begin(), langs.end(), [&](const std::string& l) { return l == o.pivot_language; });
    for (const auto& lang : langs) {
      auto r = request("translate:" + lang, Task::translate, n.joined());
      r.language = lang;
      out.push_back({"translate:" + lang, std::move(r), ""});
    }
  }
  if (has(Layer::diacritize)) {
    if (!n.chain.empty()) out.push_back({"diacritize_chain", request("diacritize_chain", Task::diacritize, n.chain), ""});
    out.push_back({"diacritize_text", request("diacritize_text", Task::diacritize, n.text), ""});
  }
  if (has(Layer::summarize)) {
    out.push_back({"summary", request("summary", Task::summarize, n.text),
                   pivot_translated ? "translate:" + o.pivot_language : ""});
  }
  const std::string after_summary = has(Layer::summarize) ? "summary" : "";
  if (has(Layer::key_points)) {
    out.push_back({"key_points", request("key_points", Task::key_points, n.text), after_summary});
  }
  if (has(Layer::tags)) {
    auto r = request("tags", Task::tag, n.text);
    r.context = annotate::AnnotationContext{};
    r.context->vocabulary = o.tag_vocabulary;
    out.push_back({"tags", std::move(r), after_summary});
  }
  if (has(Layer::classify)) out.push_back({"classify", request("classify", Task::classify_hadith, n.joined()), ""});
  return out;
}

void store_output(EnrichmentBundle& b, const SlotPlan& p, const std::string& output) {
  const auto& key = p.key;
  if (key.starts_with("translate:")) {
    b.translations[p.request.language] = output;
  } else if (key == "diacritize_chain") {
    b.diacritized_chain = output;
  } else if (key == "diacritize_text") {
    b.diacritized_text = output;
  } else if (key == "summary") {
    b.summary = output;
  } else if (key == "key_points") {
    b.key_points = split_lines(output);
  } else if (key == "tags") {
    b.tags = *parse_tags(output);
  } else if (key == "classify") {
    b.classified_hadith = output == "true";
  }
}

void refresh_flags(EnrichmentBundle& b, const Narration& n) {
  b.flags = n.qc_flags;
  for (const auto& [_, prov] : b.annotator_provenance) {
    if (prov.status == LayerStatus::failed || prov.status == LayerStatus::qc_rejected) {
      b.flags.insert(QcFlag::annotator_anomaly);
    }
  }
  if (b.classified_hadith && !*b.classified_hadith) b.flags.insert(QcFlag::non_hadith_suspect);
}

}  // namespace

std::string_view to_string(Layer l) {
  switch (l) {
    case Layer::translate: return "translate";
    case Layer::diacritize: return "diacritize";
    case Layer::summarize: return "summarize";
    case Layer::key_points: return "keypoints";
    case Layer::tags: return "tags";
    case Layer::classify: return "classify";
  }
  return "unknown";
}

std::vector<Layer> default_layers() {
  return {Layer::translate, Layer::diacritize, Layer::summarize, Layer::key_points, Layer::tags, Layer::classify};
}

std::vector<Layer> parse_layers(std::string_view list) {
  std::vector<Layer> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t comma = list.find(',', pos);
    if (comma == std::string_view::npos) comma = list.size();
    const auto name = list.substr(pos, comma - pos);
    pos = comma + 1;
    if (name.empty()) continue;
    std::optional<Layer> layer;
    for (Layer l : default_layers()) {
      if (to_string(l) == name) layer = l;
    }
    if (name == "key_points") layer = Layer::key_points;
    if (name == "tag") layer = Layer::tags;
    if (!layer) throw Error(ErrorKind::config, "unknown enrichment layer: " + std::string(name));
    if (std::find(out.begin(), out.end(), *layer) == out.end()) out.push_back(*layer);
  }
  return out;
}

QcVerdict qc_validate(const AnnotationRequest& request, std::string_view output,
                      const std::vector<std::string>& vocabulary) {
  auto fail = [](std::string reason) { return QcVerdict{false, std::move(reason)}; };
  if (text::find_invalid_utf8(output)) return fail("invalid UTF-8");
  const auto in = text::to_u32(request.input_text);
  const auto out = text::to_u32(output);
  switch (request.task) {
    case Task::diacritize:
      if (text::strip_diacritics(out) != text::strip_diacritics(in)) return fail("skeleton mismatch");
      break;
    case Task::translate: {
      const auto trimmed = text::trim(out);
      if (trimmed.empty()) return fail("empty translation");
      if (trimmed == text::trim(in)) return fail("identical to input");
      if (!is_arabic_script_language(request.language) && text::arabic_letter_ratio(out) >= 0.5) {
        return fail("source script");
      }
      const double ratio = static_cast<double>(out.size()) / static_cast<double>(std::max<std::size_t>(1, in.size()));
      if (ratio < kMinLengthRatio || ratio > kMaxLengthRatio) return fail("length ratio");
      break;
    }
    case Task::tag: {
      const auto tags = parse_tags(output);
      if (!tags) return fail("malformed tags");
      if (tags->empty()) return fail("no tags");
      const auto& vocab = vocabulary.empty() && request.context ? request.context->vocabulary : vocabulary;
      for (const auto& t : *tags) {
        if (std::find(vocab.begin(), vocab.end(), t) == vocab.end()) return fail("tag outside vocabulary: " + t);
      }
      break;
    }
    case Task::summarize:
      if (text::trim(out).empty()) return fail("empty summary");
      if (out.size() >= in.size()) return fail("summary not shorter than input");
      break;
    case Task::key_points:
      if (split_lines(output).empty()) return fail("no key points");
      break;
    case Task::classify_hadith:
      if (output != "true" && output != "false") return fail("malformed classification");
      break;
    case Task::segment_window:
    case Task::embed:
      break;
  }
  return {};
}

std::vector<std::string> slots_for(const Narration& n, const EnrichOptions& options) {
  std::vector<std::string> out;
  for (const auto& p : plan(n, options)) out.push_back(p.key);
  return out;
}

EnrichmentBundle enrich_one(const Narration& n, std::optional<EnrichmentBundle> existing,
                            annotate::AnnotatorClient& client, const EnrichOptions& options, EnrichStats* stats) {
  EnrichmentBundle b = existing ? std::move(*existing) : EnrichmentBundle{};
  b.narration_id = n.narration_id;
  const std::string annotator = client.transport().name();

  for (const auto& p : plan(n, options)) {
    if (slot_filled(b, p.key)) continue;
    clear_slot(b, p.key);
    LayerProvenance prov;
    prov.annotator = annotator;
    if (!p.upstream.empty() && !slot_filled(b, p.upstream)) {
      prov.status = LayerStatus::blocked;
      prov.reason = "blocked_by_upstream: " + p.upstream;
      b.annotator_provenance[p.key] = prov;
      if (stats) ++stats->blocked;
      continue;
    }
    AnnotationRequest req = p.request;
    if (p.key == "summary" && !p.upstream.empty()) {
      if (!req.context) req.context = annotate::AnnotationContext{};
      req.context->pivot_translation = b.translations.at(options.pivot_language);
    }
    if (stats) ++stats->requests;
    const auto outcome = client.annotate(req);
    prov.attempts = outcome.attempts;
    prov.timestamp = outcome.timestamp;
    prov.version = outcome.model_version;
    if (!outcome.ok) {
      prov.status = LayerStatus::failed;
      prov.reason = outcome.error;
      if (stats) ++stats->failed;
    } else if (auto verdict = qc_validate(req, outcome.output, options.tag_vocabulary); !verdict.pass) {
      prov.status = LayerStatus::qc_rejected;
      prov.reason = verdict.reason;
      if (stats) ++stats->rejected;
    } else {
      prov.status = LayerStatus::ok;
      store_output(b, p, outcome.output);
      if (stats) ++stats->filled;
    }
    b.annotator_provenance[p.key] = prov;
  }
  refresh_flags(b, n);
  return b;
}

std::vector<EnrichmentBundle> enrich_all(const std::vector<Narration>& narrations,
                                         const std::map<std::string, EnrichmentBundle>& existing,
                                         annotate::AnnotatorClient& client, const EnrichOptions& options,
                                         EnrichStats* stats) {
  std::vector<EnrichmentBundle> out(narrations.size());
  auto work = [&](std::size_t i) {
    const auto& n = narrations[i];
    std::optional<EnrichmentBundle> prior;
    if (auto it = existing.find(n.narration_id); it != existing.end()) prior = it->second;
    out[i] = enrich_one(n, std::move(prior), client, options, stats);
  };
  const std::size_t workers =
      std::min<std::size_t>(narrations.size(), static_cast<std::size_t>(std::max(1, options.concurrency)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < narrations.size(); ++i) work(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < narrations.size(); i = next++) work(i);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace isnad::enrich
