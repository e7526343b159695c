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

#include <random>

#include "isnad/align.hpp"
#include "isnad/text.hpp"
#include "oracles.hpp"

namespace isnad::align {
namespace {

SourceBook book_of(std::vector<std::string> pages) {
  SourceBook b;
  b.book_id = "t";
  b.category = Category::hadith;
  int no = 1;
  for (auto& p : pages) b.pages.push_back({no++, p, p});
  return b;
}

TEST(Levenshtein, MatchesDpOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    const auto a = testing::random_arabic(rng, 0, 40);
    auto b = (i % 2) ? testing::random_arabic(rng, 0, 40) : a;
    if (i % 2 == 0 && !b.empty()) b[rng() % b.size()] = U'ز';
    ASSERT_EQ(levenshtein(a, b), testing::dp_edit_distance(a, b));
    ASSERT_EQ(similarity(a, b), testing::dp_similarity(a, b));
    ASSERT_EQ(static_cast<std::size_t>(edit_ops(a, b).total()), levenshtein(a, b));
  }
}

TEST(Levenshtein, EdgeCases) {
  EXPECT_EQ(levenshtein(U"", U""), 0u);
  EXPECT_EQ(levenshtein(U"abc", U""), 3u);
  EXPECT_DOUBLE_EQ(similarity(std::u32string_view(U""), std::u32string_view(U"")), 1.0);
  EXPECT_DOUBLE_EQ(similarity(std::u32string_view(U"ab"), std::u32string_view(U"")), 0.0);
  const auto ops = edit_ops(U"kitten", U"sitting");
  EXPECT_EQ(ops.total(), 3);
  EXPECT_EQ(ops.substitutions, 2);
  EXPECT_EQ(ops.insertions, 1);
  EXPECT_EQ(ops.deletions, 0);
}

TEST(Locate, ExactSubstringAtTrueOffsets) {
  const auto b = book_of({"حدثنا زرارة قال: الماء يطهر. حدثنا محمد قال: الصلاة عمود", "الدين. وهذا اخر الكلام"});
  const auto stream = make_page_stream(b);
  const std::u32string target = U"الصلاة عمود الدين.";
  const auto pos = stream.text.find(target);
  ASSERT_NE(pos, std::u32string::npos);
  const auto r = locate(text::to_utf8(target), b);
  ASSERT_TRUE(r.has_value());
  EXPECT_DOUBLE_EQ(r->fidelity, 1.0);
  EXPECT_EQ(r->char_start, pos);
  EXPECT_EQ(r->char_end, pos + target.size());
  EXPECT_EQ(r->page_start, 1);
  EXPECT_EQ(r->page_end, 2);
  EXPECT_EQ(r->missing_word_count, 0);
}

TEST(Locate, DiacriticsIgnoredForMatching) {
  const auto b = book_of({"مقدمة. حدثنا زرارة قال: الماء يطهر."});
  const auto r = locate("حَدَّثَنا زُرارة", b);
  ASSERT_TRUE(r.has_value());
  EXPECT_DOUBLE_EQ(r->fidelity, 1.0);
  EXPECT_EQ(r->char_start, 7u);
}

TEST(Locate, BelowThresholdIsNullopt) {
  const auto b = book_of({"حدثنا زرارة قال: الماء يطهر."});
  EXPECT_FALSE(locate("xxxxxxxxxxxxxxxxxxxx", b).has_value());
  LocateOptions anything;
  anything.min_fidelity = 0.0;
  EXPECT_TRUE(locate("xxxxxxxxxxxxxxxxxxxx", b, anything).has_value());
}

TEST(Locate, SubstitutedQueryStillFound) {
  std::mt19937_64 rng(77);
  std::string page;
  for (int i = 0; i < 30; ++i) page += testing::random_sentence(rng, 6, 12) + ". ";
  const auto b = book_of({page});
  const auto stream = make_page_stream(b);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t len = 60;
    const std::size_t start = rng() % (stream.text.size() - len);
    std::u32string q = stream.text.substr(start, len);
    for (int k = 0; k < 4; ++k) q[rng() % q.size()] = U'غ';
    const auto r = locate(text::to_utf8(q), stream);
    ASSERT_TRUE(r.has_value());
    EXPECT_GE(r->fidelity, 0.85);
    EXPECT_LE(r->char_start > start ? r->char_start - start : start - r->char_start, 4u);
  }
}

TEST(AlignNarration, KeepsIdAndFlagsLowFidelity) {
  const auto b = book_of({"حدثنا زرارة قال: الماء يطهر. كلام اخر لا علاقة له بشيء."});
  const auto stream = make_page_stream(b);
  Narration n;
  n.book_id = "t";
  n.chain = "حدثنا زرارة قال";
  n.text = "الماء يطهر.";
  n.char_start = 0;
  n.char_end = text::to_u32(n.joined()).size();
  n.narration_id = make_narration_id(n.book_id, 1, n.char_start, n.chain, n.text);
  const auto good = align_narration(n, stream);
  EXPECT_EQ(good.narration_id, n.narration_id);
  EXPECT_DOUBLE_EQ(good.fidelity, 1.0);
  EXPECT_FALSE(good.qc_flags.contains(QcFlag::low_fidelity));
  ASSERT_TRUE(good.missing_word_count.has_value());
  EXPECT_EQ(*good.missing_word_count, 0);

  Narration bad = n;
  bad.text = "نص مختلف تماما عن المصدر ولا يشبهه";
  const auto flagged = align_narration(bad, stream);
  EXPECT_EQ(flagged.narration_id, bad.narration_id);
  EXPECT_EQ(flagged.char_start, bad.char_start);
  EXPECT_LT(flagged.fidelity, 0.8);
  EXPECT_TRUE(flagged.qc_flags.contains(QcFlag::low_fidelity));
}

TEST(MissingWords, CountsSourceDeletions) {
  EXPECT_EQ(missing_words("قال الماء يطهر", "قال الماء يطهر"), 0);
  EXPECT_EQ(missing_words("قال يطهر", "قال الماء يطهر"), 1);
  EXPECT_EQ(missing_words("قال", "قال الماء يطهر كل شيء"), 4);
  EXPECT_EQ(missing_words("قال الماء يطهر كل شيء", "قال"), 0);
  const auto tally = missing_word_rate({{"قال يطهر", "قال الماء يطهر"}, {"ا ب", "ا ب"}});
  EXPECT_EQ(tally.missing, 1);
  EXPECT_EQ(tally.source_words, 5);
  EXPECT_DOUBLE_EQ(tally.rate_percent(), 20.0);
}

}  // namespace
}  // namespace isnad::align
