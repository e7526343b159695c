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

// Shared record types. Every pipeline stage reads and writes these through
// the record store (store.hpp); the JSON field names below are the on-disk
// schema, version kSchemaVersion.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace isnad {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Sources

enum class Category { hadith, fiqh, tafsir, other };

std::string_view to_string(Category c);
/// Throws ValidationError for unknown names.
Category parse_category(std::string_view name);

struct SourcePage {
  int page_no = 0;
  std::string raw_text;
  std::string normalized_text;

  bool operator==(const SourcePage&) const = default;
};

struct SourceBook {
  std::string book_id;
  std::string title;
  Category category = Category::other;
  bool reclassified = false;
  std::vector<SourcePage> pages;

  bool operator==(const SourceBook&) const = default;
};

/// Separator placed between consecutive pages when a book is read as one
/// stream. Narration offsets are code-point offsets into that stream.
inline constexpr char32_t kPageJoiner = U' ';

/// The book's normalized pages joined by kPageJoiner, plus where each page
/// starts in it.
struct PageStream {
  std::u32string text;
  std::vector<std::size_t> page_begin;  // parallel to book.pages
  std::vector<int> page_no;

  /// Page number containing stream offset `pos` (pos < text.size()).
  int page_at(std::size_t pos) const;
};

PageStream make_page_stream(const SourceBook& book);

// ---------------------------------------------------------------------------
// Narrations

enum class QcFlag { non_hadith_suspect, truncation_suspect, low_fidelity, annotator_anomaly };

std::string_view to_string(QcFlag f);
QcFlag parse_qc_flag(std::string_view name);

struct EditCounts {
  int insertions = 0;
  int deletions = 0;
  int substitutions = 0;

  int total() const { return insertions + deletions + substitutions; }
  bool operator==(const EditCounts&) const = default;
};

/// chain ++ kChainTextSeparator ++ text reproduces the source span for
/// narrations whose chain ends in a quotative formula ("قال:").
inline constexpr std::string_view kChainTextSeparator = ": ";

struct Narration {
  std::string narration_id;
  std::string book_id;
  int page_start = 1;
  int page_end = 1;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::string chain;  // isnad; empty for spans rejected as non-hadith
  std::string text;   // matn
  double fidelity = 1.0;
  std::set<QcFlag> qc_flags;
  std::optional<std::string> group_id;
  double segment_confidence = 1.0;
  std::optional<int> missing_word_count;  // set by alignment
  std::optional<EditCounts> edit_ops;     // set by alignment

  /// The form compared against the source span.
  std::string joined() const;
  bool is_hadith() const { return !qc_flags.contains(QcFlag::non_hadith_suspect); }

  bool operator==(const Narration&) const = default;
};

/// 16 hex chars of SHA-256 over the length-prefixed fields. Pure function;
/// identical input yields the identical id on every platform.
std::string make_narration_id(std::string_view book_id, int page_start,
                              std::size_t char_start, std::string_view chain,
                              std::string_view text);

// ---------------------------------------------------------------------------
// Enrichment

enum class LayerStatus { ok, failed, qc_rejected, blocked };

std::string_view to_string(LayerStatus s);

struct LayerProvenance {
  std::string annotator;
  std::string version;
  std::string timestamp;
  int attempts = 0;
  LayerStatus status = LayerStatus::ok;
  std::string reason;  // failure / QC reason, empty on success

  bool operator==(const LayerProvenance&) const = default;
};

/// Provenance keys: "translate:<lang>", "diacritize_chain", "diacritize_text",
/// "summary", "key_points", "tags", "classify".
struct EnrichmentBundle {
  std::string narration_id;
  std::map<std::string, std::string> translations;
  std::optional<std::string> diacritized_chain;
  std::optional<std::string> diacritized_text;
  std::optional<std::string> summary;
  std::optional<std::vector<std::string>> key_points;
  std::optional<std::vector<std::string>> tags;
  std::optional<bool> classified_hadith;
  std::map<std::string, LayerProvenance> annotator_provenance;
  std::set<QcFlag> flags;  // propagated narration flags plus enrichment flags

  bool operator==(const EnrichmentBundle&) const = default;
};

// ---------------------------------------------------------------------------
// Evaluation

enum class Aspect {
  chain_text_separation,
  summarization,
  grouping,
  analytical_commentary,
  thematic_tagging,
  key_points,
  thematic_similarity,
  lexical_similarity,
  semantic_similarity,
};

inline constexpr std::array<Aspect, 9> kAllAspects = {
    Aspect::chain_text_separation, Aspect::summarization,
    Aspect::grouping,              Aspect::analytical_commentary,
    Aspect::thematic_tagging,      Aspect::key_points,
    Aspect::thematic_similarity,   Aspect::lexical_similarity,
    Aspect::semantic_similarity,
};

std::string_view to_string(Aspect a);
std::string_view display_name(Aspect a);
Aspect parse_aspect(std::string_view name);

enum class ErrorDimension { typos, translation, missing_words, tagging, key_phrases, diacritization_char };

inline constexpr std::array<ErrorDimension, 6> kAllDimensions = {
    ErrorDimension::typos,   ErrorDimension::translation, ErrorDimension::missing_words,
    ErrorDimension::tagging, ErrorDimension::key_phrases, ErrorDimension::diacritization_char,
};

std::string_view to_string(ErrorDimension d);
std::string_view display_name(ErrorDimension d);
ErrorDimension parse_dimension(std::string_view name);

struct ErrorCount {
  std::int64_t error_units = 0;
  std::int64_t total_units = 0;

  bool operator==(const ErrorCount&) const = default;
};

struct EvaluationRecord {
  std::string narration_id;
  std::string evaluator_id;
  std::map<Aspect, double> aspect_scores;
  std::map<ErrorDimension, ErrorCount> error_counts;
  bool is_non_hadith = false;
  /// dimension -> upstream dimension that caused its errors.
  std::map<ErrorDimension, ErrorDimension> root_cause_links;
  std::string free_notes;

  /// Store key; one record per (narration, evaluator), last write wins.
  std::string record_id() const { return narration_id + "@" + evaluator_id; }

  bool operator==(const EvaluationRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Manifest

struct NormalizationProfile {
  bool strip_diacritics_for_matching = true;
  bool unify_alef_variants = true;
  bool unify_ya_and_alef_maqsura = true;
  bool remove_tatweel = true;
  bool collapse_whitespace = true;
  bool strip_page_artifacts = true;

  bool operator==(const NormalizationProfile&) const = default;
};

struct BookEntry {
  std::string path;  // file or page directory, relative to the manifest
  std::string book_id;
  std::string title;
  Category declared_category = Category::other;
};

std::vector<std::string> default_languages();
std::vector<std::string> default_tag_vocabulary();

struct CorpusManifest {
  std::string name;
  std::string source;
  std::vector<std::string> languages = default_languages();
  std::vector<std::string> tag_vocabulary = default_tag_vocabulary();
  std::string pivot_language = "fa";
  NormalizationProfile normalization;
  std::vector<BookEntry> books;
  std::string reclassification_table;  // relative path, may be empty
  json pipeline = json::object();      // configuration snapshot
  std::filesystem::path root;          // directory holding the manifest file
};

/// Reads and validates a manifest file (JSON). Relative paths resolve
/// against the manifest's directory.
CorpusManifest load_manifest(const std::filesystem::path& path);
json manifest_to_json(const CorpusManifest& m);
CorpusManifest manifest_from_json(const json& j);

// ---------------------------------------------------------------------------
// Stage bookkeeping

/// Written by a stage after it finished a unit of work (a book, a run);
/// lets reruns skip work whose input digest has not changed.
struct StageMarker {
  std::string marker_id;  // "<stage>:<unit>"
  std::string digest;
  std::vector<std::string> members;  // ids the unit of work produced

  bool operator==(const StageMarker&) const = default;
};

// ---------------------------------------------------------------------------
// Validation. Each throws ValidationError naming the failed invariant.

void validate(const SourceBook& b);
void validate(const Narration& n);
void validate(const EnrichmentBundle& b);
void validate(const EvaluationRecord& r);
void validate(const CorpusManifest& m);
void validate(const StageMarker& m);

/// Invariants that need the narration and manifest: skeleton law, tag
/// vocabulary, language list.
void validate_against(const EnrichmentBundle& b, const Narration& n, const CorpusManifest& m);

// ---------------------------------------------------------------------------
// Serialization

void to_json(json& j, const SourceBook& b);
void from_json(const json& j, SourceBook& b);
void to_json(json& j, const Narration& n);
void from_json(const json& j, Narration& n);
void to_json(json& j, const EnrichmentBundle& b);
void from_json(const json& j, EnrichmentBundle& b);
void to_json(json& j, const EvaluationRecord& r);
void from_json(const json& j, EvaluationRecord& r);
void to_json(json& j, const StageMarker& m);
void from_json(const json& j, StageMarker& m);
void to_json(json& j, const NormalizationProfile& p);
void from_json(const json& j, NormalizationProfile& p);

using Record = std::variant<SourceBook, Narration, EnrichmentBundle, EvaluationRecord, StageMarker>;

template <typename T> struct RecordTraits;
template <> struct RecordTraits<SourceBook> {
  static constexpr std::string_view kind = "book";
  static const std::string& id(const SourceBook& b) { return b.book_id; }
};
template <> struct RecordTraits<Narration> {
  static constexpr std::string_view kind = "narration";
  static const std::string& id(const Narration& n) { return n.narration_id; }
};
template <> struct RecordTraits<EnrichmentBundle> {
  static constexpr std::string_view kind = "bundle";
  static const std::string& id(const EnrichmentBundle& b) { return b.narration_id; }
};
template <> struct RecordTraits<EvaluationRecord> {
  static constexpr std::string_view kind = "evaluation";
  static std::string id(const EvaluationRecord& r) { return r.record_id(); }
};
template <> struct RecordTraits<StageMarker> {
  static constexpr std::string_view kind = "marker";
  static const std::string& id(const StageMarker& m) { return m.marker_id; }
};

std::string_view record_kind(const Record& r);
std::string record_id(const Record& r);
void validate(const Record& r);

/// One self-describing store line (no trailing newline).
std::string serialize_record(const Record& r);
/// Inverse of serialize_record. Throws on malformed input or unknown kind.
Record parse_record(std::string_view line);

}  // namespace isnad
