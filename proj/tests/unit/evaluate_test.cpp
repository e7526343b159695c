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
#include <numeric>
#include <random>
#include <set>

#include <fmt/format.h>

#include "isnad/error.hpp"
#include "isnad/evaluate.hpp"
#include "oracles.hpp"

namespace isnad::evaluate {
namespace {

using D = ErrorDimension;

EvaluationRecord rec(std::string id, std::map<D, ErrorCount> errors = {}, double score = -1,
                     std::string evaluator = "e1") {
  EvaluationRecord r;
  r.narration_id = std::move(id);
  r.evaluator_id = std::move(evaluator);
  r.error_counts = std::move(errors);
  if (score >= 0) {
    for (Aspect a : kAllAspects) r.aspect_scores[a] = score;
  }
  return r;
}

TEST(Rates, MicroIsMeanOfRatesMacroIsPooled) {
  const std::vector<EvaluationRecord> rs = {rec("a", {{D::translation, {1, 10}}}),
                                            rec("b", {{D::translation, {9, 30}}}), rec("c")};
  EXPECT_DOUBLE_EQ(*micro_error_rate(rs, D::translation), 20.0);
  EXPECT_DOUBLE_EQ(*macro_error_rate(rs, D::translation), 25.0);
  EXPECT_FALSE(micro_error_rate(rs, D::typos).has_value());
  EXPECT_FALSE(macro_error_rate(rs, D::typos).has_value());
}

TEST(Rates, EqualTotalsMakeMicroEqualMacro) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<EvaluationRecord> rs;
    const std::int64_t total = 1 + static_cast<std::int64_t>(rng() % 50);
    for (int i = 0; i < 1 + static_cast<int>(rng() % 20); ++i) {
      rs.push_back(rec("n" + std::to_string(i),
                       {{D::typos, {static_cast<std::int64_t>(rng() % (total + 1)), total}}}));
    }
    EXPECT_NEAR(*micro_error_rate(rs, D::typos), *macro_error_rate(rs, D::typos), 1e-9);
  }
}

TEST(Rates, SplitInvariance) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<EvaluationRecord> all, left, right;
    const int n = 2 + static_cast<int>(rng() % 19);
    for (int i = 0; i < n; ++i) {
      const std::int64_t total = 1 + static_cast<std::int64_t>(rng() % 80);
      auto r = rec("n" + std::to_string(i), {{D::tagging, {static_cast<std::int64_t>(rng() % (total + 1)), total}}});
      all.push_back(r);
      (i % 2 ? left : right).push_back(r);
    }
    std::int64_t e = 0, t = 0;
    for (const auto& r : all) {
      e += r.error_counts.at(D::tagging).error_units;
      t += r.error_counts.at(D::tagging).total_units;
    }
    EXPECT_NEAR(*macro_error_rate(all, D::tagging), 100.0 * static_cast<double>(e) / static_cast<double>(t), 1e-9);
    const double pooled_micro = (*micro_error_rate(left, D::tagging) * static_cast<double>(left.size()) +
                                 *micro_error_rate(right, D::tagging) * static_cast<double>(right.size())) /
                                static_cast<double>(all.size());
    EXPECT_NEAR(*micro_error_rate(all, D::tagging), pooled_micro, 1e-9);
  }
}

TEST(Cascades, NoLinksLeavesRecordUnchanged) {
  const auto r = rec("a", {{D::translation, {3, 10}}, {D::tagging, {2, 5}}});
  EXPECT_EQ(suppress_cascades(r), r);
}

TEST(Cascades, ChainOfThreeKeepsOnlyTheRoot) {
  auto r = rec("a", {{D::translation, {3, 10}}, {D::key_phrases, {2, 4}}, {D::tagging, {1, 5}}});
  r.root_cause_links = {{D::tagging, D::key_phrases}, {D::key_phrases, D::translation}};
  const auto s = suppress_cascades(r);
  EXPECT_EQ(s.error_counts.at(D::translation), (ErrorCount{3, 10}));
  EXPECT_EQ(s.error_counts.at(D::key_phrases), (ErrorCount{0, 4}));
  EXPECT_EQ(s.error_counts.at(D::tagging), (ErrorCount{0, 5}));
}

TEST(Critical, StrictlyAboveSixtyPercent) {
  EXPECT_FALSE(is_critical(rec("a", {{D::diacritization_char, {60, 100}}})));
  EXPECT_TRUE(is_critical(rec("a", {{D::diacritization_char, {61, 100}}})));
  EXPECT_TRUE(is_critical(rec("a", {{D::missing_words, {7, 10}}})));
  // Only core dimensions count.
  EXPECT_FALSE(is_critical(rec("a", {{D::typos, {9, 10}}})));
  auto nh = rec("b", {{D::translation, {9, 10}}});
  nh.is_non_hadith = true;
  const auto p = apply_critical_filter({nh, rec("c", {{D::translation, {9, 10}}}), rec("d")});
  EXPECT_EQ(p.non_hadith.size(), 1u);
  EXPECT_EQ(p.critical.size(), 1u);
  EXPECT_EQ(p.kept.size(), 1u);
  EXPECT_EQ(p.kept[0].narration_id, "d");
}

TEST(Consolidate, AveragesScoresAndSumsUnits) {
  auto a = rec("n", {{D::translation, {1, 10}}}, 8, "x");
  auto b = rec("n", {{D::translation, {3, 10}}}, 6, "y");
  a.is_non_hadith = true;
  const auto out = consolidate({b, a, rec("m", {}, 5)});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].narration_id, "n");
  EXPECT_EQ(out[0].evaluator_id, "x+y");
  EXPECT_DOUBLE_EQ(out[0].aspect_scores.at(Aspect::grouping), 7.0);
  EXPECT_EQ(out[0].error_counts.at(D::translation), (ErrorCount{4, 20}));
  EXPECT_TRUE(out[0].is_non_hadith);  // tie counts as non-hadith
}

TEST(Means, UnscoredAspectsCountZeroOverall) {
  EvaluationRecord r = rec("a");
  r.aspect_scores = {{Aspect::chain_text_separation, 9.0}, {Aspect::grouping, 9.0}};
  EXPECT_DOUBLE_EQ(*overall_mean({r}), 2.0);
  const auto m = aspect_means({r, rec("b", {}, 6)});
  EXPECT_DOUBLE_EQ(m.at(Aspect::grouping), 7.5);
  EXPECT_DOUBLE_EQ(m.at(Aspect::summarization), 6.0);
  EXPECT_FALSE(overall_mean({}).has_value());
}

// Ten records worked through by hand:
//   n1 non-hadith, n2 critical (translation 70%), n3..n10 kept
//   kept scores 8 9 7 10 6 8 9 7 -> 8.00
//   translation 0 1 2 3 4 0 0 2 of 20 -> micro = macro = 7.50
//   typos 1/10 and 1/40 -> micro 6.25, macro 4.00
TEST(Report, HandComputedFixture) {
  std::vector<EvaluationRecord> rs;
  auto n1 = rec("n1", {}, 5);
  n1.is_non_hadith = true;
  rs.push_back(n1);
  rs.push_back(rec("n2", {{D::translation, {70, 100}}}, 2));
  const double scores[] = {8, 9, 7, 10, 6, 8, 9, 7};
  const std::int64_t errs[] = {0, 1, 2, 3, 4, 0, 0, 2};
  for (int i = 0; i < 8; ++i) rs.push_back(rec("n" + std::to_string(i + 3), {{D::translation, {errs[i], 20}}}, scores[i]));
  rs[2].error_counts[D::typos] = {1, 10};
  rs[3].error_counts[D::typos] = {1, 40};

  const auto r = build_report(rs);
  EXPECT_EQ(r.sample_size, 10u);
  EXPECT_EQ(r.non_hadith_count, 1u);
  EXPECT_EQ(r.critical_count, 1u);
  EXPECT_EQ(r.kept_count, 8u);
  EXPECT_DOUBLE_EQ(r.non_hadith_rate, 10.0);
  EXPECT_DOUBLE_EQ(r.critical_failure_rate, 10.0);
  EXPECT_DOUBLE_EQ(*r.overall_mean, 8.0);
  EXPECT_DOUBLE_EQ(r.aspect_means.at(Aspect::summarization), 8.0);
  EXPECT_DOUBLE_EQ(*r.error_rates.at(D::translation).micro, 7.5);
  EXPECT_DOUBLE_EQ(*r.error_rates.at(D::translation).macro, 7.5);
  EXPECT_DOUBLE_EQ(*r.error_rates.at(D::typos).micro, 6.25);
  EXPECT_DOUBLE_EQ(*r.error_rates.at(D::typos).macro, 4.0);
  EXPECT_DOUBLE_EQ(*r.critical_rates.at(D::translation).macro, 70.0);

  const auto text = render_text(r);
  EXPECT_NE(text.find("8.00"), std::string::npos);
  const auto csv = render_csv(r);
  EXPECT_NE(csv.find("summary,overall_mean,8.00"), std::string::npos) << csv;
  const auto j = to_json(r);
  EXPECT_EQ(j.at("sample_size"), 10);
}

TEST(Sample, DeterministicWithoutReplacement) {
  std::vector<std::string> ids;
  for (int i = 0; i < 500; ++i) ids.push_back("id" + std::to_string(i));
  const auto a = draw_sample(ids, 100, 42);
  EXPECT_EQ(a, draw_sample(ids, 100, 42));
  EXPECT_NE(a, draw_sample(ids, 100, 43));
  EXPECT_EQ(std::set<std::string>(a.begin(), a.end()).size(), 100u);
  EXPECT_EQ(draw_sample(ids, 500, 1).size(), 500u);
  EXPECT_THROW(draw_sample(ids, 501, 1), ValidationError);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(uniform_below(rng, 7), 7u);
}

TEST(ReadRecords, StoreLinesBareLinesAndErrors) {
  testing::TempDir dir;
  auto r = rec("a", {{D::translation, {1, 10}}}, 7);
  {
    std::ofstream out(dir / "e.jsonl");
    out << serialize_record(r) << '\n';
    r.aspect_scores[Aspect::grouping] = 3;
    out << json(r).dump() << '\n';
  }
  const auto loaded = read_records(dir / "e.jsonl");
  ASSERT_EQ(loaded.size(), 1u);
  EXPECT_DOUBLE_EQ(loaded[0].aspect_scores.at(Aspect::grouping), 3.0);
  {
    std::ofstream out(dir / "bad.jsonl");
    out << json(r).dump() << "\n{\"narration_id\":\"x\"}\n";
  }
  try {
    read_records(dir / "bad.jsonl");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(read_records(dir / "absent.jsonl"), Error);
}

TEST(Fixtures, HeadlineSampleReproduces) {
  const auto r = build_report(read_records(testing::fixture("rezwan_sample.jsonl")));
  EXPECT_EQ(r.sample_size, 1213u);
  EXPECT_EQ(fmt::format("{:.2f}", r.non_hadith_rate), "15.25");
  EXPECT_EQ(fmt::format("{:.2f}", r.critical_failure_rate), "5.85");
  EXPECT_EQ(fmt::format("{:.2f}", *r.overall_mean), "8.46");
}

}  // namespace
}  // namespace isnad::evaluate
