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

// Store-to-store stages and the whole-pipeline driver.
//
//   manifest --ingest--> books --segment--> segments --align--> aligned
//   aligned --enrich--> bundles
//   aligned --group---> corpus
//
// Each stage writes StageMarker records next to its output. A marker holds
// the digest of the stage's input and configuration for one unit of work
// (a book, or the whole run) and the ids that unit produced; a rerun skips
// units whose digest is unchanged and downstream stages read only the ids
// listed by current markers, so stale records left by an earlier
// configuration are ignored.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "isnad/align.hpp"
#include "isnad/annotator.hpp"
#include "isnad/corpus.hpp"
#include "isnad/enrich.hpp"
#include "isnad/segment.hpp"
#include "isnad/similarity.hpp"
#include "isnad/store.hpp"

namespace isnad::pipeline {

struct StageToggles {
  bool ingest = true;
  bool segment = true;
  bool align = true;
  bool enrich = true;
  bool group = true;
};

struct PipelineConfig {
  std::filesystem::path manifest;
  std::filesystem::path work_dir = "work";
  std::filesystem::path eval_store;  // default <work_dir>/evaluations.jsonl
  StageToggles stages;
  std::string segment_backend = "rule";  // rule | remote
  segment::SegmentConfig segment;
  align::LocateOptions align;
  std::vector<enrich::Layer> layers = enrich::default_layers();
  std::vector<std::string> languages;  // empty: the manifest's list
  std::string client = "mock";         // mock | remote
  annotate::ClientConfig annotator;
  double group_threshold = similarity::kDefaultGroupThreshold;
  std::uint64_t seed = 0;
  int concurrency = 4;

  std::filesystem::path books_store() const { return work_dir / "books.jsonl"; }
  std::filesystem::path segments_store() const { return work_dir / "segments.jsonl"; }
  std::filesystem::path aligned_store() const { return work_dir / "aligned.jsonl"; }
  std::filesystem::path bundles_store() const { return work_dir / "bundles.jsonl"; }
  std::filesystem::path corpus_store() const { return work_dir / "corpus.jsonl"; }
  std::filesystem::path evaluation_store() const {
    return eval_store.empty() ? work_dir / "evaluations.jsonl" : eval_store;
  }
};

/// Unknown keys and out-of-range values throw Error(config). Relative paths
/// resolve against base_dir.
PipelineConfig config_from_json(const json& j, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
json to_json(const PipelineConfig& c);
void validate(const PipelineConfig& c);

/// ISNAD_WORK_DIR, ISNAD_MANIFEST, ISNAD_EVAL_STORE, ISNAD_ANNOTATOR_ENDPOINT.
void apply_env_overrides(PipelineConfig& c);

/// Builds the annotator client the configuration asks for. The mock client
/// runs without rate limiting.
std::unique_ptr<annotate::AnnotatorClient> make_client(const std::string& kind, annotate::ClientConfig config);

struct StageReport {
  std::string stage;
  std::string status = "ok";  // ok | failed | skipped
  std::uint64_t new_work = 0;
  std::map<std::string, std::int64_t> counts;
  std::string error;
};

struct RunSummary {
  std::vector<StageReport> stages;
  bool complete = true;
};

json to_json(const StageReport& r);
json to_json(const RunSummary& s);
std::string render_summary(const RunSummary& s);

/// Records of `store` listed by the markers whose id starts with
/// `marker_prefix`; every record of the type when no such marker exists.
std::vector<Narration> current_narrations(const RecordStore& store, std::string_view marker_prefix);
std::vector<SourceBook> current_books(const RecordStore& store);

/// Individual stages. Each is idempotent: a second call with unchanged
/// input reports new_work 0 and writes nothing.
StageReport run_ingest(const CorpusManifest& manifest, RecordStore& books);
StageReport run_segment(const RecordStore& books, RecordStore& out, segment::SegmenterBackend& backend,
                        const segment::SegmentConfig& config);
StageReport run_align(const RecordStore& books, const RecordStore& narrations, RecordStore& out,
                      const align::LocateOptions& options);
StageReport run_enrich(const RecordStore& narrations, RecordStore& bundles, annotate::AnnotatorClient& client,
                       const enrich::EnrichOptions& options);
StageReport run_group(const RecordStore& narrations, RecordStore& out, double threshold);

/// Opens an input store, throwing Error(stage) naming the stage when the
/// file is missing.
std::unique_ptr<RecordStore> open_input(const std::filesystem::path& path, const std::string& stage);

/// ingest -> segment -> align -> enrich -> group over the work directory.
/// A failing stage stops the run; later enabled stages report "skipped" and
/// the summary is marked incomplete.
RunSummary run_pipeline(const PipelineConfig& config);

}  // namespace isnad::pipeline
