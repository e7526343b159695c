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


#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "isnad/error.hpp"
#include "isnad/pipeline.hpp"
#include "oracles.hpp"

namespace isnad::pipeline {
namespace {

PipelineConfig sample_config(const std::filesystem::path& work) {
  PipelineConfig c;
  c.manifest = testing::sample_manifest();
  c.work_dir = work;
  c.segment.window_units = 12;
  c.segment.overlap_units = 3;
  return c;
}

const StageReport& stage(const RunSummary& s, const std::string& name) {
  for (const auto& r : s.stages) {
    if (r.stage == name) return r;
  }
  throw std::runtime_error("no stage " + name);
}

json expected() {
  std::ifstream in(testing::source_dir() / "data" / "sample_corpus" / "expected.json");
  return json::parse(in);
}

TEST(Pipeline, SampleCorpusGoldenSummary) {
  testing::TempDir dir;
  const auto summary = run_pipeline(sample_config(dir.path()));
  ASSERT_TRUE(summary.complete) << render_summary(summary);
  const auto e = expected();
  const auto& ingest = stage(summary, "ingest").counts;
  EXPECT_EQ(ingest.at("books"), e["books"]);
  EXPECT_EQ(ingest.at("hadith_books"), e["hadith_books"]);
  EXPECT_EQ(ingest.at("filtered_books"), e["filtered_books"]);
  EXPECT_EQ(ingest.at("reclassified"), e["reclassified"]);
  const auto& seg = stage(summary, "segment").counts;
  EXPECT_EQ(seg.at("narrations"), e["segment_narrations"]);
  EXPECT_EQ(seg.at("non_hadith_spans"), e["non_hadith_spans"]);
  EXPECT_EQ(seg.at("truncation_suspect"), 0);
  EXPECT_EQ(seg.at("unresolved_windows"), 0);
  EXPECT_EQ(stage(summary, "align").counts.at("low_fidelity"), 0);
  EXPECT_EQ(stage(summary, "enrich").counts.at("bundles"), e["segment_narrations"]);
  EXPECT_EQ(stage(summary, "group").counts.at("groups"), e["groups"]);
}

TEST(Pipeline, RerunDoesNoNewWork) {
  testing::TempDir dir;
  const auto cfg = sample_config(dir.path());
  ASSERT_TRUE(run_pipeline(cfg).complete);
  auto sizes = [&] {
    std::vector<std::uintmax_t> out;
    for (const auto& p : {cfg.books_store(), cfg.segments_store(), cfg.aligned_store(), cfg.bundles_store(),
                          cfg.corpus_store()}) {
      out.push_back(std::filesystem::file_size(p));
    }
    return out;
  };
  const auto before = sizes();
  const auto again = run_pipeline(cfg);
  ASSERT_TRUE(again.complete);
  for (const auto& r : again.stages) EXPECT_EQ(r.new_work, 0u) << r.stage;
  EXPECT_EQ(sizes(), before);
  EXPECT_EQ(stage(again, "segment").counts.at("narrations"), expected()["segment_narrations"]);
}

TEST(Pipeline, ConfigChangeRedoesOnlyAffectedStages) {
  testing::TempDir dir;
  auto cfg = sample_config(dir.path());
  ASSERT_TRUE(run_pipeline(cfg).complete);
  cfg.group_threshold = 0.5;
  const auto again = run_pipeline(cfg);
  EXPECT_EQ(stage(again, "ingest").new_work, 0u);
  EXPECT_EQ(stage(again, "segment").new_work, 0u);
  EXPECT_EQ(stage(again, "enrich").new_work, 0u);
  EXPECT_LE(stage(again, "group").counts.at("groups"), expected()["groups"].get<std::int64_t>());
}

TEST(Pipeline, MissingAlignInputNamesTheStage) {
  testing::TempDir dir;
  auto cfg = sample_config(dir.path());
  cfg.stages = {false, false, true, true, true};
  const auto summary = run_pipeline(cfg);
  EXPECT_FALSE(summary.complete);
  ASSERT_EQ(summary.stages.size(), 3u);
  EXPECT_EQ(summary.stages[0].stage, "align");
  EXPECT_EQ(summary.stages[0].status, "failed");
  EXPECT_NE(summary.stages[0].error.find("align: input store missing"), std::string::npos)
      << summary.stages[0].error;
  EXPECT_EQ(summary.stages[1].status, "skipped");
  EXPECT_EQ(summary.stages[2].status, "skipped");
  try {
    open_input(dir / "nothing.jsonl", "align");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::stage);
    EXPECT_TRUE(std::string(e.what()).starts_with("align:"));
  }
}

TEST(Pipeline, AlignRejectsNarrationsOfUnknownBooks) {
  testing::TempDir dir;
  RecordStore books(dir / "books.jsonl");
  RecordStore segs(dir / "segs.jsonl");
  RecordStore out(dir / "out.jsonl");
  Narration n;
  n.book_id = "ghost";
  n.chain = "حدثنا";
  n.text = "نص";
  n.char_end = 5;
  n.narration_id = make_narration_id(n.book_id, 1, 0, n.chain, n.text);
  segs.put(n);
  try {
    run_align(books, segs, out, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::stage);
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(config_from_json(json{{"manifest", "m.json"}, {"bogus", 1}}), Error);
  EXPECT_THROW(config_from_json(json{{"segment", {{"window", 4}}}}), Error);
  EXPECT_THROW(config_from_json(json{{"segment", {{"window_units", "many"}}}}), Error);
  EXPECT_THROW(config_from_json(json{{"enrich", {{"layers", "translate,poetry"}}}}), Error);
  try {
    config_from_json(json{{"align", {{"min_fidelty", 0.5}}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
    EXPECT_NE(std::string(e.what()).find("align.min_fidelty"), std::string::npos);
  }
  PipelineConfig bad;
  bad.segment.window_units = 3;
  bad.segment.overlap_units = 3;
  EXPECT_THROW(validate(bad), Error);
}

TEST(Config, ResolvesPathsAndRoundTrips) {
  const auto c = config_from_json(json{{"manifest", "m.json"},
                                       {"work_dir", "w"},
                                       {"segment", {{"backend", "rule"}, {"window_units", 10}, {"overlap_units", 4}}},
                                       {"enrich", {{"layers", json::array({"translate", "tags"})}, {"languages", {"en"}}}},
                                       {"group", {{"threshold", 0.8}}}},
                                  "/base");
  EXPECT_EQ(c.manifest, std::filesystem::path("/base/m.json"));
  EXPECT_EQ(c.work_dir, std::filesystem::path("/base/w"));
  EXPECT_EQ(c.segment.window_units, 10u);
  EXPECT_EQ(c.layers, (std::vector<enrich::Layer>{enrich::Layer::translate, enrich::Layer::tags}));
  EXPECT_DOUBLE_EQ(c.group_threshold, 0.8);
  const auto back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  const auto shipped = load_config(testing::source_dir() / "config" / "sample.json");
  EXPECT_EQ(shipped.manifest.filename(), "manifest.json");
}

TEST(Config, EnvironmentOverrides) {
  PipelineConfig c;
  ::setenv("ISNAD_WORK_DIR", "/tmp/isnad-env-work", 1);
  ::setenv("ISNAD_EVAL_STORE", "/tmp/isnad-env-eval.jsonl", 1);
  apply_env_overrides(c);
  ::unsetenv("ISNAD_WORK_DIR");
  ::unsetenv("ISNAD_EVAL_STORE");
  EXPECT_EQ(c.work_dir, std::filesystem::path("/tmp/isnad-env-work"));
  EXPECT_EQ(c.evaluation_store(), std::filesystem::path("/tmp/isnad-env-eval.jsonl"));
}

}  // namespace
}  // namespace isnad::pipeline
