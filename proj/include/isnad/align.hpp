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

// Fuzzy validation of extracted narrations against their source pages.
// Everything here is a pure function.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isnad/corpus.hpp"

namespace isnad::align {

/// Levenshtein distance over code points (unit costs).
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// Minimal edit script counts for a -> b.
EditCounts edit_ops(std::u32string_view a, std::u32string_view b);

/// 1 - levenshtein / max(|a|, |b|); 1 when both are empty.
double similarity(std::u32string_view a, std::u32string_view b);
double similarity(std::string_view a, std::string_view b);

struct AlignmentResult {
  double fidelity = 0.0;
  int page_start = 1;
  int page_end = 1;
  std::size_t char_start = 0;  // stream offsets
  std::size_t char_end = 0;
  int missing_word_count = 0;
  EditCounts edit_ops_summary;
};

struct LocateOptions {
  double min_fidelity = 0.80;
  double slack = 0.15;  // allowed length deviation as a share of the query
  std::size_t refine_radius = 4;  // ends probed around each candidate
};

/// Best-fidelity span of the book's page stream for the query. Matching runs
/// on diacritic-stripped text; offsets map back to the stream. Candidate
/// regions come from a semi-global edit-distance pass over the whole stream,
/// then starts and lengths within the slack are refined exactly. Returns
/// nullopt when the best fidelity is below min_fidelity. Ties go to the
/// earliest start.
std::optional<AlignmentResult> locate(std::string_view query, const PageStream& stream,
                                      const LocateOptions& options = {});
std::optional<AlignmentResult> locate(std::string_view query, const SourceBook& book,
                                      const LocateOptions& options = {});

/// Validates a segmented narration against its book. The fidelity is first
/// taken against the narration's own span; when that falls below
/// min_fidelity the whole stream is searched and the best score kept.
/// Offsets (and therefore the id) never change. Below min_fidelity the
/// narration is flagged low_fidelity, never dropped.
Narration align_narration(const Narration& n, const PageStream& stream, const LocateOptions& options = {});

/// Source-side words deleted in a minimal word-level edit alignment of the
/// source onto the narration.
int missing_words(std::string_view narration_text, std::string_view source_span);
int missing_words(const std::vector<std::u32string>& narration_words,
                  const std::vector<std::u32string>& source_words);

struct MissingWordTally {
  std::int64_t missing = 0;
  std::int64_t source_words = 0;
  double rate_percent() const {
    return source_words == 0 ? 0.0 : 100.0 * static_cast<double>(missing) / static_cast<double>(source_words);
  }
};

/// Corpus-level pooled missing-word rate over (narration, source span) pairs.
MissingWordTally missing_word_rate(const std::vector<std::pair<std::string, std::string>>& pairs);

}  // namespace isnad::align
