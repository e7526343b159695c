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

// Per-narration enrichment layers.
//
// Each narration gets one bundle holding a slot per layer instance
// ("translate:en", "diacritize_text", "summary", ...). A slot is filled by one
// annotator request whose output passed qc_validate(); otherwise the slot
// stays empty and its provenance records why. Slots depend on each other:
//
//   translate:<pivot> -> summary -> key_points
//                                -> tags
//
// A slot whose upstream is not filled is recorded as blocked_by_upstream and
// no request is sent for it. Re-running only touches slots that are not
// filled, so a second run over a complete bundle sends nothing.

#pragma once

#include <atomic>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isnad/annotator.hpp"
#include "isnad/corpus.hpp"

namespace isnad::enrich {

enum class Layer { translate, diacritize, summarize, key_points, tags, classify };

std::string_view to_string(Layer l);
/// Comma-separated names: translate, diacritize, summarize, keypoints (or
/// key_points), tags, classify. Throws Error(config) on unknown names.
std::vector<Layer> parse_layers(std::string_view list);
std::vector<Layer> default_layers();

struct QcVerdict {
  bool pass = true;
  std::string reason;  // "skeleton mismatch", "length ratio", ...
};

/// Task-specific acceptance checks on one annotator output.
///  - diacritize: output minus combining marks equals the input
///  - translate: non-empty, differs from the input, mostly non-Arabic
///    letters for non-Arabic-script targets, length ratio in [0.3, 3.0]
///  - tag: a JSON array of labels, all in the vocabulary
///  - summarize: shorter than the input
///  - key_points: at least one non-blank line
///  - classify_hadith: "true" or "false"
QcVerdict qc_validate(const annotate::AnnotationRequest& request, std::string_view output,
                      const std::vector<std::string>& vocabulary = {});

inline constexpr double kMinLengthRatio = 0.3;
inline constexpr double kMaxLengthRatio = 3.0;

struct EnrichOptions {
  std::vector<Layer> layers = default_layers();
  std::vector<std::string> languages = default_languages();
  std::string pivot_language = "fa";
  std::vector<std::string> tag_vocabulary = default_tag_vocabulary();
  int concurrency = 4;
};

struct EnrichStats {
  std::atomic<std::uint64_t> requests{0};  // annotate() calls
  std::atomic<std::uint64_t> filled{0};
  std::atomic<std::uint64_t> failed{0};
  std::atomic<std::uint64_t> rejected{0};
  std::atomic<std::uint64_t> blocked{0};
};

/// Slot keys the options produce for a narration, in processing order.
std::vector<std::string> slots_for(const Narration& n, const EnrichOptions& options);

/// Fills the missing slots of `existing` (or of a fresh bundle). Never
/// throws for annotator trouble.
EnrichmentBundle enrich_one(const Narration& n, std::optional<EnrichmentBundle> existing,
                            annotate::AnnotatorClient& client, const EnrichOptions& options,
                            EnrichStats* stats = nullptr);

/// One bundle per narration, in input order. `existing` is keyed by
/// narration_id. Narrations are processed concurrently (options.concurrency),
/// each bundle by a single worker.
std::vector<EnrichmentBundle> enrich_all(const std::vector<Narration>& narrations,
                                         const std::map<std::string, EnrichmentBundle>& existing,
                                         annotate::AnnotatorClient& client, const EnrichOptions& options,
                                         EnrichStats* stats = nullptr);

}  // namespace isnad::enrich
