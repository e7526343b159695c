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

#include <fstream>
#include <thread>

#include "isnad/error.hpp"
#include "isnad/store.hpp"
#include "oracles.hpp"

namespace isnad {
namespace {

Narration make_narration(const std::string& book, std::size_t start, const std::string& text) {
  Narration n;
  n.book_id = book;
  n.char_start = start;
  n.char_end = start + 10;
  n.chain = "حدثنا زرارة قال";
  n.text = text;
  n.narration_id = make_narration_id(n.book_id, n.page_start, n.char_start, n.chain, n.text);
  return n;
}

TEST(NarrationId, PureAndSensitiveToEveryField) {
  const auto a = make_narration_id("b", 1, 0, "c", "t");
  EXPECT_EQ(a, make_narration_id("b", 1, 0, "c", "t"));
  EXPECT_EQ(a.size(), 16u);
  EXPECT_NE(a, make_narration_id("b", 2, 0, "c", "t"));
  EXPECT_NE(a, make_narration_id("b", 1, 1, "c", "t"));
  EXPECT_NE(a, make_narration_id("b", 1, 0, "ct", ""));
  EXPECT_NE(a, make_narration_id("bc", 1, 0, "", "t"));
}

TEST(Records, SerializeRoundTrip) {
  Narration n = make_narration("usul", 5, "نص");
  n.qc_flags = {QcFlag::low_fidelity};
  n.group_id = n.narration_id;
  n.missing_word_count = 2;
  n.edit_ops = EditCounts{1, 2, 3};
  const Record parsed = parse_record(serialize_record(n));
  EXPECT_EQ(std::get<Narration>(parsed), n);

  EvaluationRecord e;
  e.narration_id = "n1";
  e.evaluator_id = "ev";
  e.aspect_scores = {{Aspect::summarization, 8.5}};
  e.error_counts = {{ErrorDimension::translation, {2, 40}}, {ErrorDimension::key_phrases, {1, 5}}};
  e.root_cause_links = {{ErrorDimension::key_phrases, ErrorDimension::translation}};
  EXPECT_EQ(std::get<EvaluationRecord>(parse_record(serialize_record(e))), e);
}

TEST(Records, ValidationNamesInvariant) {
  Narration n = make_narration("usul", 5, "نص");
  n.char_end = n.char_start;
  try {
    validate(n);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.invariant(), "char_start < char_end");
  }
  EvaluationRecord e;
  e.narration_id = "n";
  e.evaluator_id = "v";
  e.aspect_scores = {{Aspect::grouping, 11.0}};
  try {
    validate(e);
    FAIL();
  } catch (const ValidationError& err) {
    EXPECT_EQ(err.invariant(), "score in [0,10]");
  }
  e.aspect_scores.clear();
  e.root_cause_links = {{ErrorDimension::tagging, ErrorDimension::translation},
                        {ErrorDimension::translation, ErrorDimension::tagging}};
  EXPECT_THROW(validate(e), ValidationError);
  EXPECT_THROW(parse_record(R"({"kind":"narration","schema_version":99})"), ValidationError);
}

TEST(Store, LastWriteWins) {
  testing::TempDir dir;
  Narration a = make_narration("b", 0, "اول");
  {
    RecordStore s(dir / "s.jsonl");
    s.put(a);
    a.fidelity = 0.5;
    s.put(a);
    EXPECT_EQ(s.size(), 1u);
    EXPECT_DOUBLE_EQ(s.get<Narration>(a.narration_id)->fidelity, 0.5);
  }
  RecordStore reopened(dir / "s.jsonl");
  EXPECT_DOUBLE_EQ(reopened.get<Narration>(a.narration_id)->fidelity, 0.5);
  const auto all = reopened.load<Narration>();
  ASSERT_EQ(all.records.size(), 1u);
  EXPECT_DOUBLE_EQ(all.records[0].fidelity, 0.5);
}

TEST(Store, PutIfChangedSkipsIdenticalRecords) {
  testing::TempDir dir;
  RecordStore s(dir / "s.jsonl");
  const Narration a = make_narration("b", 0, "اول");
  EXPECT_TRUE(s.put_if_changed(a));
  EXPECT_FALSE(s.put_if_changed(a));
  Narration b = a;
  b.fidelity = 0.9;
  EXPECT_TRUE(s.put_if_changed(b));
  std::ifstream in(dir / "s.jsonl");
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, 2);
}

TEST(Store, IndexRebuiltWhenMissingOrStale) {
  testing::TempDir dir;
  const auto path = dir / "s.jsonl";
  Narration a = make_narration("b", 0, "اول");
  Narration b = make_narration("b", 20, "ثان");
  {
    RecordStore s(path);
    s.put(a);
    s.put(b);
  }
  std::filesystem::remove(path.string() + ".idx");
  {
    RecordStore s(path);
    EXPECT_EQ(s.get<Narration>(b.narration_id), b);
    b.fidelity = 0.25;
    s.put(b);
  }
  // Append behind the index's back; the next open must see it.
  Narration c = make_narration("b", 40, "ثالث");
  {
    std::ofstream out(path, std::ios::app);
    out << serialize_record(c) << '\n';
  }
  RecordStore s(path);
  EXPECT_EQ(s.get<Narration>(c.narration_id), c);
  EXPECT_DOUBLE_EQ(s.get<Narration>(b.narration_id)->fidelity, 0.25);
  EXPECT_EQ(s.size(), 3u);
}

TEST(Store, MalformedLineReportedWithNumber) {
  testing::TempDir dir;
  const auto path = dir / "s.jsonl";
  const Narration a = make_narration("b", 0, "اول");
  {
    std::ofstream out(path);
    out << serialize_record(a) << "\n{not json\n";
  }
  RecordStore s(path);
  const auto loaded = s.load<Narration>();
  EXPECT_EQ(loaded.records.size(), 1u);
  ASSERT_EQ(loaded.errors.size(), 1u);
  EXPECT_EQ(loaded.errors[0].line_no, 2u);
}

TEST(Store, RejectsInvalidRecord) {
  testing::TempDir dir;
  RecordStore s(dir / "s.jsonl");
  Narration bad = make_narration("b", 0, "اول");
  bad.fidelity = 2.0;
  EXPECT_THROW(s.put(bad), ValidationError);
  EXPECT_EQ(s.size(), 0u);
}

TEST(Store, ConcurrentAppendsAllLand) {
  testing::TempDir dir;
  RecordStore s(dir / "s.jsonl");
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&s, t] {
      for (int i = 0; i < 50; ++i) s.put(make_narration("b", static_cast<std::size_t>(t * 1000 + i), "نص"));
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(s.size(), 400u);
  RecordStore reopened(dir / "s.jsonl");
  EXPECT_EQ(reopened.load<Narration>().records.size(), 400u);
  EXPECT_TRUE(reopened.load<Narration>().errors.empty());
}

TEST(Store, MissingFileWithoutCreateThrows) {
  testing::TempDir dir;
  EXPECT_THROW(RecordStore(dir / "absent.jsonl", RecordStore::Options{false, false}), Error);
}

}  // namespace
}  // namespace isnad
