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

#include "isnad/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <optional>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "isnad/error.hpp"
#include "isnad/ingest.hpp"
#include "isnad/text.hpp"

namespace isnad::pipeline {

namespace {

using Keys = std::set<std::string>;

void reject_unknown(const json& j, const Keys& keys, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::config, where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!keys.contains(k)) throw Error(ErrorKind::config, "unknown setting " + where + "." + k);
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::config, "bad value for " + where + "." + key);
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

json segment_config_json(const segment::SegmentConfig& c) {
  return json{{"max_unit_chars", c.max_unit_chars},
              {"window_units", c.window_units},
              {"overlap_units", c.overlap_units},
              {"reprocess_passes", c.reprocess_passes}};
}

json locate_options_json(const align::LocateOptions& o) {
  return json{{"min_fidelity", o.min_fidelity}, {"slack", o.slack}, {"refine_radius", o.refine_radius}};
}

std::string layers_string(const std::vector<enrich::Layer>& layers) {
  std::string out;
  for (auto l : layers) {
    if (!out.empty()) out += ',';
    out += enrich::to_string(l);
  }
  return out;
}

std::map<std::string, StageMarker> markers_with_prefix(const RecordStore& store, std::string_view prefix) {
  std::map<std::string, StageMarker> out;
  for (auto& m : store.load<StageMarker>().records) {
    if (m.marker_id.starts_with(prefix)) out.emplace(m.marker_id, std::move(m));
  }
  return out;
}

StageReport failed(StageReport r, const std::string& message) {
  r.status = "failed";
  r.error = message;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

PipelineConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  reject_unknown(j,
                 {"manifest", "work_dir", "eval_store", "stages", "segment", "align", "enrich", "annotator", "group",
                  "seed", "concurrency"},
                 "config");
  PipelineConfig c;
  if (j.contains("manifest")) c.manifest = resolve(base_dir, get_or<std::string>(j, "manifest", "", "config"));
  if (j.contains("work_dir")) c.work_dir = resolve(base_dir, get_or<std::string>(j, "work_dir", "", "config"));
  if (j.contains("eval_store")) c.eval_store = resolve(base_dir, get_or<std::string>(j, "eval_store", "", "config"));
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed, "config");
  c.concurrency = get_or<int>(j, "concurrency", c.concurrency, "config");

  if (j.contains("stages")) {
    const json& s = j.at("stages");
    reject_unknown(s, {"ingest", "segment", "align", "enrich", "group"}, "stages");
    c.stages.ingest = get_or<bool>(s, "ingest", true, "stages");
    c.stages.segment = get_or<bool>(s, "segment", true, "stages");
    c.stages.align = get_or<bool>(s, "align", true, "stages");
    c.stages.enrich = get_or<bool>(s, "enrich", true, "stages");
    c.stages.group = get_or<bool>(s, "group", true, "stages");
  }
  if (j.contains("segment")) {
    const json& s = j.at("segment");
    reject_unknown(s, {"backend", "max_unit_chars", "window_units", "overlap_units", "reprocess_passes"}, "segment");
    c.segment_backend = get_or<std::string>(s, "backend", c.segment_backend, "segment");
    c.segment.max_unit_chars = get_or<std::size_t>(s, "max_unit_chars", c.segment.max_unit_chars, "segment");
    c.segment.window_units = get_or<std::size_t>(s, "window_units", c.segment.window_units, "segment");
    c.segment.overlap_units = get_or<std::size_t>(s, "overlap_units", c.segment.overlap_units, "segment");
    c.segment.reprocess_passes = get_or<int>(s, "reprocess_passes", c.segment.reprocess_passes, "segment");
  }
  if (j.contains("align")) {
    const json& a = j.at("align");
    reject_unknown(a, {"min_fidelity", "slack", "refine_radius"}, "align");
    c.align.min_fidelity = get_or<double>(a, "min_fidelity", c.align.min_fidelity, "align");
    c.align.slack = get_or<double>(a, "slack", c.align.slack, "align");
    c.align.refine_radius = get_or<std::size_t>(a, "refine_radius", c.align.refine_radius, "align");
  }
  if (j.contains("enrich")) {
    const json& e = j.at("enrich");
    reject_unknown(e, {"layers", "languages", "client"}, "enrich");
    if (e.contains("layers")) {
      const json& l = e.at("layers");
      if (l.is_string()) {
        c.layers = enrich::parse_layers(l.get<std::string>());
      } else if (l.is_array()) {
        std::string joined;
        for (const auto& x : l) {
          if (!x.is_string()) throw Error(ErrorKind::config, "bad value for enrich.layers");
          if (!joined.empty()) joined += ',';
          joined += x.get<std::string>();
        }
        c.layers = enrich::parse_layers(joined);
      } else {
        throw Error(ErrorKind::config, "bad value for enrich.layers");
      }
    }
    c.languages = get_or<std::vector<std::string>>(e, "languages", c.languages, "enrich");
    c.client = get_or<std::string>(e, "client", c.client, "enrich");
  }
  if (j.contains("annotator")) {
    try {
      c.annotator = annotate::client_config_from_json(j.at("annotator"));
    } catch (const ValidationError& e) {
      throw Error(ErrorKind::config, std::string("annotator: ") + e.what());
    }
  }
  if (j.contains("group")) {
    const json& g = j.at("group");
    reject_unknown(g, {"threshold"}, "group");
    c.group_threshold = get_or<double>(g, "threshold", c.group_threshold, "group");
  }
  validate(c);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::config, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

json to_json(const PipelineConfig& c) {
  json seg = segment_config_json(c.segment);
  seg["backend"] = c.segment_backend;
  return json{{"manifest", c.manifest.string()},
              {"work_dir", c.work_dir.string()},
              {"eval_store", c.evaluation_store().string()},
              {"stages",
               {{"ingest", c.stages.ingest},
                {"segment", c.stages.segment},
                {"align", c.stages.align},
                {"enrich", c.stages.enrich},
                {"group", c.stages.group}}},
              {"segment", seg},
              {"align", locate_options_json(c.align)},
              {"enrich", {{"layers", layers_string(c.layers)}, {"languages", c.languages}, {"client", c.client}}},
              {"annotator", annotate::to_json(c.annotator)},
              {"group", {{"threshold", c.group_threshold}}},
              {"seed", c.seed},
              {"concurrency", c.concurrency}};
}

void validate(const PipelineConfig& c) {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::config, what); };
  if (c.segment_backend != "rule" && c.segment_backend != "remote") bad("segment.backend must be rule or remote");
  if (c.client != "mock" && c.client != "remote") bad("enrich.client must be mock or remote");
  if (c.segment.max_unit_chars < 64) bad("segment.max_unit_chars must be >= 64");
  if (c.segment.overlap_units < 1 || c.segment.window_units <= c.segment.overlap_units) {
    bad("segment.window_units must exceed segment.overlap_units >= 1");
  }
  if (c.segment.reprocess_passes < 0) bad("segment.reprocess_passes must be >= 0");
  if (!(c.align.min_fidelity >= 0.0 && c.align.min_fidelity <= 1.0)) bad("align.min_fidelity must be in [0,1]");
  if (!(c.align.slack >= 0.0 && c.align.slack < 1.0)) bad("align.slack must be in [0,1)");
  if (!(c.group_threshold > 0.0 && c.group_threshold <= 1.0)) bad("group.threshold must be in (0,1]");
  if (c.concurrency < 1) bad("concurrency must be >= 1");
  if (c.work_dir.empty()) bad("work_dir must be set");
}

void apply_env_overrides(PipelineConfig& c) {
  if (const char* v = std::getenv("ISNAD_WORK_DIR"); v && *v) c.work_dir = v;
  if (const char* v = std::getenv("ISNAD_MANIFEST"); v && *v) c.manifest = v;
  if (const char* v = std::getenv("ISNAD_EVAL_STORE"); v && *v) c.eval_store = v;
  if (const char* v = std::getenv("ISNAD_ANNOTATOR_ENDPOINT"); v && *v) c.annotator.endpoint = v;
}

std::unique_ptr<annotate::AnnotatorClient> make_client(const std::string& kind, annotate::ClientConfig config) {
  std::shared_ptr<annotate::Transport> transport;
  if (kind == "mock") {
    config.rate_limit_rps = 0.0;
    transport = std::make_shared<annotate::MockTransport>();
  } else if (kind == "remote") {
    transport = std::make_shared<annotate::HttpTransport>(config);
  } else {
    throw Error(ErrorKind::config, "unknown annotator client: " + kind);
  }
  return std::make_unique<annotate::AnnotatorClient>(std::move(transport), std::move(config));
}

// ---------------------------------------------------------------------------
// Summaries

json to_json(const StageReport& r) {
  json j{{"stage", r.stage}, {"status", r.status}, {"new_work", r.new_work}, {"counts", r.counts}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

json to_json(const RunSummary& s) {
  json stages = json::array();
  for (const auto& r : s.stages) stages.push_back(to_json(r));
  return json{{"complete", s.complete}, {"stages", stages}};
}

std::string render_summary(const RunSummary& s) {
  std::string out;
  for (const auto& r : s.stages) {
    out += fmt::format("{:<8} {:<7} new_work={}", r.stage, r.status, r.new_work);
    for (const auto& [k, v] : r.counts) out += fmt::format(" {}={}", k, v);
    if (!r.error.empty()) out += "  error: " + r.error;
    out += '\n';
  }
  out += s.complete ? "run complete\n" : "run incomplete\n";
  return out;
}

// ---------------------------------------------------------------------------
// Stages

std::vector<Narration> current_narrations(const RecordStore& store, std::string_view marker_prefix) {
  auto all = store.load<Narration>().records;
  const auto markers = markers_with_prefix(store, marker_prefix);
  if (markers.empty()) return all;
  std::set<std::string> live;
  for (const auto& [id, m] : markers) live.insert(m.members.begin(), m.members.end());
  std::erase_if(all, [&](const Narration& n) { return !live.contains(n.narration_id); });
  return all;
}

std::vector<SourceBook> current_books(const RecordStore& store) {
  auto all = store.load<SourceBook>().records;
  const auto markers = markers_with_prefix(store, "ingest:");
  if (markers.empty()) return all;
  std::set<std::string> live;
  for (const auto& [id, m] : markers) live.insert(m.members.begin(), m.members.end());
  std::erase_if(all, [&](const SourceBook& b) { return !live.contains(b.book_id); });
  return all;
}

std::unique_ptr<RecordStore> open_input(const std::filesystem::path& path, const std::string& stage) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::stage, stage + ": input store missing: " + path.string());
  }
  return std::make_unique<RecordStore>(path, RecordStore::Options{false, false});
}

StageReport run_ingest(const CorpusManifest& manifest, RecordStore& books) {
  StageReport r;
  r.stage = "ingest";
  const auto loaded = ingest::load_corpus(manifest);
  StageMarker marker;
  marker.marker_id = "ingest:" + manifest.name;
  std::int64_t hadith = 0, filtered = 0, reclassified = 0;
  for (const auto& b : loaded) {
    if (books.put_if_changed(b)) ++r.new_work;
    marker.members.push_back(b.book_id);
    if (ingest::reaches_segmenter(b)) {
      ++hadith;
    } else {
      ++filtered;
    }
    if (b.reclassified) ++reclassified;
  }
  std::string digest;
  for (const auto& id : marker.members) digest += id + '\n';
  marker.digest = text::sha256_hex(digest);
  books.put_if_changed(marker);
  r.counts = {{"books", static_cast<std::int64_t>(loaded.size())},
              {"hadith_books", hadith},
              {"filtered_books", filtered},
              {"reclassified", reclassified}};
  return r;
}

StageReport run_segment(const RecordStore& books, RecordStore& out, segment::SegmenterBackend& backend,
                        const segment::SegmentConfig& config) {
  StageReport r;
  r.stage = "segment";
  const std::string config_digest = segment_config_json(config).dump() + backend.name();
  std::int64_t narrations = 0, written = 0, unresolved = 0, truncation = 0, non_hadith = 0;
  for (const auto& book : current_books(books)) {
    if (!ingest::reaches_segmenter(book)) continue;
    const std::string marker_id = "segment:" + book.book_id;
    const std::string digest = text::sha256_hex(serialize_record(book) + '\n' + config_digest);
    auto prior = out.get<StageMarker>(marker_id);
    if (prior && prior->digest == digest) {
      for (const auto& id : prior->members) {
        if (auto n = out.get<Narration>(id)) {
          ++narrations;
          if (n->qc_flags.contains(QcFlag::truncation_suspect)) ++truncation;
          if (!n->is_hadith()) ++non_hadith;
        }
      }
      continue;
    }
    ++r.new_work;
    const auto seg = segment::segment_book(book, backend, config);
    StageMarker marker;
    marker.marker_id = marker_id;
    for (const auto& n : seg.narrations) {
      if (out.put_if_changed(n)) ++written;
      marker.members.push_back(n.narration_id);
      if (n.qc_flags.contains(QcFlag::truncation_suspect)) ++truncation;
      if (!n.is_hadith()) ++non_hadith;
    }
    narrations += static_cast<std::int64_t>(seg.narrations.size());
    unresolved += static_cast<std::int64_t>(seg.unresolved.size());
    // Unresolved windows are retried on the next run.
    marker.digest = seg.unresolved.empty() ? digest : "incomplete:" + digest;
    out.put_if_changed(marker);
  }
  r.counts = {{"narrations", narrations},
              {"written", written},
              {"unresolved_windows", unresolved},
              {"truncation_suspect", truncation},
              {"non_hadith_spans", non_hadith}};
  return r;
}

StageReport run_align(const RecordStore& books, const RecordStore& narrations, RecordStore& out,
                      const align::LocateOptions& options) {
  StageReport r;
  r.stage = "align";
  std::map<std::string, std::vector<Narration>> by_book;
  for (auto& n : current_narrations(narrations, "segment:")) by_book[n.book_id].push_back(std::move(n));
  const std::string options_digest = locate_options_json(options).dump();
  std::int64_t total = 0, low = 0, written = 0;
  const auto book_list = current_books(books);
  for (const auto& [book_id, list] : by_book) {
    const bool known = std::any_of(book_list.begin(), book_list.end(),
                                   [&](const SourceBook& b) { return b.book_id == book_id; });
    if (!known) throw Error(ErrorKind::stage, "align: narrations reference unknown book " + book_id);
  }
  for (const auto& book : book_list) {
    auto it = by_book.find(book.book_id);
    if (it == by_book.end()) continue;
    const std::string marker_id = "align:" + book.book_id;
    std::string input = serialize_record(book) + '\n' + options_digest;
    for (const auto& n : it->second) input += '\n' + serialize_record(n);
    const std::string digest = text::sha256_hex(input);
    total += static_cast<std::int64_t>(it->second.size());
    auto prior = out.get<StageMarker>(marker_id);
    if (prior && prior->digest == digest) {
      for (const auto& id : prior->members) {
        if (auto n = out.get<Narration>(id); n && n->qc_flags.contains(QcFlag::low_fidelity)) ++low;
      }
      continue;
    }
    ++r.new_work;
    const PageStream stream = make_page_stream(book);
    StageMarker marker;
    marker.marker_id = marker_id;
    marker.digest = digest;
    for (const auto& n : it->second) {
      Narration a = align::align_narration(n, stream, options);
      if (a.qc_flags.contains(QcFlag::low_fidelity)) ++low;
      if (out.put_if_changed(a)) ++written;
      marker.members.push_back(a.narration_id);
    }
    out.put_if_changed(marker);
  }
  r.counts = {{"narrations", total}, {"written", written}, {"low_fidelity", low}};
  return r;
}

StageReport run_enrich(const RecordStore& narrations, RecordStore& bundles, annotate::AnnotatorClient& client,
                       const enrich::EnrichOptions& options) {
  StageReport r;
  r.stage = "enrich";
  const auto list = current_narrations(narrations, "align:");
  std::map<std::string, EnrichmentBundle> existing;
  for (auto& b : bundles.load<EnrichmentBundle>().records) existing.emplace(b.narration_id, std::move(b));
  enrich::EnrichStats stats;
  const auto out = enrich::enrich_all(list, existing, client, options, &stats);
  std::int64_t written = 0, anomalies = 0, non_hadith = 0;
  for (const auto& b : out) {
    if (bundles.put_if_changed(b)) ++written;
    if (b.flags.contains(QcFlag::annotator_anomaly)) ++anomalies;
    if (b.flags.contains(QcFlag::non_hadith_suspect)) ++non_hadith;
  }
  r.new_work = stats.requests.load();
  r.counts = {{"bundles", static_cast<std::int64_t>(out.size())},
              {"written", written},
              {"requests", static_cast<std::int64_t>(stats.requests.load())},
              {"filled", static_cast<std::int64_t>(stats.filled.load())},
              {"failed", static_cast<std::int64_t>(stats.failed.load())},
              {"qc_rejected", static_cast<std::int64_t>(stats.rejected.load())},
              {"blocked", static_cast<std::int64_t>(stats.blocked.load())},
              {"annotator_anomaly", anomalies},
              {"non_hadith_suspect", non_hadith}};
  return r;
}

StageReport run_group(const RecordStore& narrations, RecordStore& out, double threshold) {
  StageReport r;
  r.stage = "group";
  auto list = current_narrations(narrations, "align:");
  std::vector<similarity::GroupInput> inputs;
  inputs.reserve(list.size());
  for (const auto& n : list) inputs.push_back({n.narration_id, text::strip_diacritics(n.text)});
  similarity::GroupingStats stats;
  const auto groups = similarity::group_identical(inputs, threshold, &stats);
  StageMarker marker;
  marker.marker_id = "group:run";
  std::string digest = fmt::format("{}", threshold);
  for (auto& n : list) {
    n.group_id = groups.at(n.narration_id);
    if (out.put_if_changed(n)) ++r.new_work;
    marker.members.push_back(n.narration_id);
    digest += '\n' + n.narration_id + '>' + *n.group_id;
  }
  marker.digest = text::sha256_hex(digest);
  out.put_if_changed(marker);
  r.counts = {{"narrations", static_cast<std::int64_t>(list.size())},
              {"groups", static_cast<std::int64_t>(stats.groups)},
              {"multi_member_groups", static_cast<std::int64_t>(stats.multi_member_groups)},
              {"candidate_pairs", static_cast<std::int64_t>(stats.candidate_pairs)}};
  return r;
}

// ---------------------------------------------------------------------------
// Driver

RunSummary run_pipeline(const PipelineConfig& config) {
  validate(config);
  RunSummary summary;
  std::filesystem::create_directories(config.work_dir);

  std::unique_ptr<annotate::AnnotatorClient> client;
  auto get_client = [&]() -> annotate::AnnotatorClient& {
    if (!client) client = make_client(config.client, config.annotator);
    return *client;
  };
  std::optional<CorpusManifest> manifest;
  auto get_manifest = [&]() -> const CorpusManifest& {
    if (!manifest) {
      if (config.manifest.empty()) throw Error(ErrorKind::config, "no manifest configured");
      manifest = load_manifest(config.manifest);
    }
    return *manifest;
  };

  struct Step {
    std::string name;
    bool enabled;
    std::function<StageReport()> run;
  };
  const std::vector<Step> steps = {
      {"ingest", config.stages.ingest,
       [&] {
         RecordStore books(config.books_store());
         return run_ingest(get_manifest(), books);
       }},
      {"segment", config.stages.segment,
       [&] {
         auto books = open_input(config.books_store(), "segment");
         RecordStore out(config.segments_store());
         segment::SegmentConfig sc = config.segment;
         sc.concurrency = config.concurrency;
         if (config.segment_backend == "remote") {
           segment::RemoteSegmenter backend(get_client());
           return run_segment(*books, out, backend, sc);
         }
         segment::RuleSegmenter backend;
         return run_segment(*books, out, backend, sc);
       }},
      {"align", config.stages.align,
       [&] {
         auto books = open_input(config.books_store(), "align");
         auto segments = open_input(config.segments_store(), "align");
         RecordStore out(config.aligned_store());
         return run_align(*books, *segments, out, config.align);
       }},
      {"enrich", config.stages.enrich,
       [&] {
         auto aligned = open_input(config.aligned_store(), "enrich");
         RecordStore out(config.bundles_store());
         enrich::EnrichOptions eo;
         eo.layers = config.layers;
         eo.concurrency = config.concurrency;
         if (!config.manifest.empty()) {
           const auto& m = get_manifest();
           eo.languages = m.languages;
           eo.pivot_language = m.pivot_language;
           eo.tag_vocabulary = m.tag_vocabulary;
         }
         if (!config.languages.empty()) eo.languages = config.languages;
         return run_enrich(*aligned, out, get_client(), eo);
       }},
      {"group", config.stages.group,
       [&] {
         auto aligned = open_input(config.aligned_store(), "group");
         RecordStore out(config.corpus_store());
         return run_group(*aligned, out, config.group_threshold);
       }},
  };

  bool halted = false;
  for (const auto& step : steps) {
    if (!step.enabled) continue;
    if (halted) {
      StageReport skipped;
      skipped.stage = step.name;
      skipped.status = "skipped";
      summary.stages.push_back(skipped);
      continue;
    }
    try {
      summary.stages.push_back(step.run());
    } catch (const std::exception& e) {
      StageReport r;
      r.stage = step.name;
      summary.stages.push_back(failed(r, e.what()));
      summary.complete = false;
      halted = true;
    }
  }
  return summary;
}

}  // namespace isnad::pipeline
