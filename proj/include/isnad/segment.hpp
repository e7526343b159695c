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

// Narration boundary detection over a book's page stream.
//
// The stream is cut into semantic units (sentence-delimited spans, never
// crossing a page boundary), units are grouped into overlapping windows, a
// SegmenterBackend labels chain/text spans inside each window, and stitch()
// reduces the per-window verdicts to one narration per source span.
//
// A narration is recovered intact when some window holds it away from both
// window edges, which is guaranteed whenever it is at most overlap_units
// units long.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isnad/corpus.hpp"

namespace isnad::annotate {
class AnnotatorClient;
}

namespace isnad::segment {

struct SemanticUnit {
  std::size_t unit_index = 0;
  int page_no = 1;
  std::size_t char_start = 0;  // stream offsets, half-open
  std::size_t char_end = 0;
  std::u32string text;
  bool starts_sentence = true;  // the previous unit ended at a sentence delimiter
};

/// Tiles the stream: units are contiguous, gap-free, and each ends at a
/// sentence delimiter (plus trailing spaces), a page boundary, or after at
/// most max_unit_chars code points. Throws ValidationError when
/// max_unit_chars < 64.
std::vector<SemanticUnit> unitize(const PageStream& stream, std::size_t max_unit_chars);
std::vector<SemanticUnit> unitize(const SourceBook& book, std::size_t max_unit_chars);

struct Window {
  std::size_t index = 0;
  std::size_t first_unit = 0;
  std::size_t last_unit = 0;  // inclusive
  std::size_t overlap_units = 0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  bool starts_sentence = true;
};

/// Consecutive windows share exactly overlap_units units; the last window
/// may be shorter. Requires window_units > overlap_units >= 1 (throws
/// ValidationError otherwise).
std::vector<Window> make_windows(const std::vector<SemanticUnit>& units, std::size_t window_units,
                                 std::size_t overlap_units);

/// Half-open code-point range relative to the window text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool empty() const { return begin == end; }
  bool operator==(const Span&) const = default;
};

struct VerdictSpan {
  Span chain;  // empty (at text.begin) for non-hadith spans
  Span text;
  bool is_hadith = true;
  double confidence = 1.0;
  bool operator==(const VerdictSpan&) const = default;
};

struct SegmenterVerdict {
  std::vector<VerdictSpan> spans;
};

/// Chain precedes text, spans ordered and non-overlapping, all inside the
/// window, confidences in [0,1].
void validate(const SegmenterVerdict& v, std::size_t window_length);

json verdict_to_json(const SegmenterVerdict& v);
SegmenterVerdict verdict_from_json(const json& j);

class SegmenterBackend {
 public:
  virtual ~SegmenterBackend() = default;
  virtual SegmenterVerdict segment(std::u32string_view window_text) = 0;
  virtual std::string name() const = 0;
};

/// Transmission-formula openers (حدثنا, حدثني, أخبرنا, ...), in any
/// alef spelling.
bool is_transmission_opener(std::u32string_view word);
/// Chapter heading words (باب, كتاب, فصل, أبواب).
bool is_heading_word(std::u32string_view word);

/// Deterministic marker grammar.
///
/// A narration starts at a sentence whose first word is a transmission
/// opener and runs until the next opener sentence or heading. Its chain ends
/// at a quotative (قال / قالت / يقول) directly followed by ':' inside the
/// first sentence; when several qualify the longest chain wins and the span
/// is marked low-confidence. Headings and sentences outside any narration
/// become is_hadith=false spans.
class RuleSegmenter : public SegmenterBackend {
 public:
  static constexpr double kConfident = 0.95;
  static constexpr double kAmbiguous = 0.5;
  static constexpr double kNoSeparator = 0.3;

  SegmenterVerdict segment(std::u32string_view window_text) override;
  std::string name() const override { return "rule"; }
};

/// Sends each window through the annotator client (task segment_window) and
/// parses the JSON verdict from the response.
class RemoteSegmenter : public SegmenterBackend {
 public:
  explicit RemoteSegmenter(annotate::AnnotatorClient& client) : client_(client) {}
  SegmenterVerdict segment(std::u32string_view window_text) override;
  std::string name() const override { return "remote"; }

 private:
  annotate::AnnotatorClient& client_;
};

struct WindowOutcome {
  Window window;
  std::optional<SegmenterVerdict> verdict;
  std::string unresolved_reason;  // set when !verdict

  bool resolved() const { return verdict.has_value(); }
};

/// Never throws for backend trouble: failures, malformed verdicts and empty
/// verdicts on non-blank text leave the window unresolved.
WindowOutcome segment_window(const Window& window, std::u32string_view window_text,
                             SegmenterBackend& backend);

/// Reduces window verdicts to narrations: identical spans are merged, a
/// span touching a window edge yields to a fuller view from another window,
/// and among conflicting views the more interior one wins. Conflicts that
/// cannot be settled keep both spans flagged truncation_suspect.
std::vector<Narration> stitch(const SourceBook& book, const PageStream& stream,
                              const std::vector<WindowOutcome>& outcomes);

struct SegmentConfig {
  std::size_t max_unit_chars = 400;
  std::size_t window_units = 12;
  std::size_t overlap_units = 3;
  int reprocess_passes = 2;  // extra attempts for unresolved windows
  int concurrency = 4;
};

struct BookSegmentation {
  std::vector<Narration> narrations;
  std::vector<WindowOutcome> unresolved;
  std::size_t windows = 0;
  std::size_t units = 0;
};

BookSegmentation segment_book(const SourceBook& book, SegmenterBackend& backend, const SegmentConfig& config);

}  // namespace isnad::segment
