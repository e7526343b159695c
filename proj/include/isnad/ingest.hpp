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

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "isnad/corpus.hpp"

namespace isnad::ingest {

/// NFC first, then the profile's rules, repeated to a fixed point so that
/// normalize(normalize(x)) == normalize(x) for every input.
///
/// Rules, in order: page artifacts (page-number lines, everything from a
/// "_____" footnote separator to the end of the page, inline "(12)"
/// footnote references), diacritics, tatweel, alef variants (آ أ إ ٱ -> ا),
/// alef maqsura (ى -> ي), whitespace runs -> one space with both ends
/// trimmed.
std::u32string normalize(std::u32string_view text, const NormalizationProfile& profile);
std::string normalize(std::string_view text, const NormalizationProfile& profile);

/// book_id -> category. Two columns separated by a tab or comma; blank lines
/// and lines starting with '#' are ignored.
using ReclassificationTable = std::map<std::string, Category>;
ReclassificationTable load_reclassification_table(const std::filesystem::path& path);
ReclassificationTable parse_reclassification_table(std::string_view content);

/// A page starts at a line of the form `[[page N]]`. A file without any
/// marker is a single page 1.
inline constexpr std::string_view kPageMarkerSyntax = "[[page N]]";

/// Splits marked-up file content into pages sorted by page number.
/// Throws ValidationError on duplicate page numbers or text before the
/// first marker.
std::vector<SourcePage> split_pages(std::string_view content);

struct BookSource {
  std::filesystem::path path;  // UTF-8 file, or a directory of per-page files
  std::string book_id;
  std::string title;
  Category declared_category = Category::other;
};

/// Loads, orders and normalizes one book. Undecodable bytes throw with the
/// byte offset; a book without pages throws.
SourceBook load_book(const BookSource& source, const NormalizationProfile& profile,
                     const ReclassificationTable& reclassification = {});

/// Loads every book listed in the manifest, in manifest order.
std::vector<SourceBook> load_corpus(const CorpusManifest& manifest);

/// Only books whose final category is hadith go on to segmentation.
inline bool reaches_segmenter(const SourceBook& book) { return book.category == Category::hadith; }

}  // namespace isnad::ingest
