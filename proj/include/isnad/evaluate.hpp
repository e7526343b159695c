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

// Expert evaluation statistics.
//
// Naming warning: "micro" here is the mean of per-narration error
// percentages (every narration weighs the same) and "macro" is the pooled
// percentage sum(errors) / sum(units) (long narrations weigh more). This is
// the reverse of the usual machine-learning convention and matches the
// terminology of the evaluation protocol this code reports on.
//
// Report pipeline, all pure functions over a record snapshot:
//   consolidate     one record per narration (evaluators averaged)
//   suppress        errors caused by an upstream dimension are zeroed
//   partition       non-hadith | critical (a core dimension > 60%) | kept
//   aggregate       aspect means and error rates over the kept set

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "isnad/corpus.hpp"

namespace isnad::evaluate {

/// Evaluation records from a JSON Lines file: either store lines or bare
/// records. The last line for a record_id wins. Throws Error(io) when the
/// file cannot be read and ValidationError naming the line otherwise.
std::vector<EvaluationRecord> read_records(const std::filesystem::path& path);

/// n ids drawn uniformly without replacement, order included. The same
/// (ids, n, seed) gives the same sample on every platform. Throws
/// ValidationError when n exceeds the number of ids.
std::vector<std::string> draw_sample(const std::vector<std::string>& ids, std::size_t n, std::uint64_t seed);

/// Uniform integer in [0, bound) by rejection; independent of the standard
/// library's distribution implementation.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Error units of every dimension that names an upstream cause are zeroed;
/// the cause keeps its own count. Totals are unchanged.
EvaluationRecord suppress_cascades(const EvaluationRecord& r);

/// One record per narration_id, in first-appearance order. Aspect scores
/// are averaged over the evaluators who gave them; error units and totals
/// are summed (after cascade suppression); non-hadith by majority with ties
/// counting as non-hadith. evaluator_id lists the evaluators joined by '+'.
std::vector<EvaluationRecord> consolidate(const std::vector<EvaluationRecord>& records);

/// Mean over records carrying the dimension of error_units / total_units,
/// as a percentage. nullopt when no record carries it.
std::optional<double> micro_error_rate(const std::vector<EvaluationRecord>& records, ErrorDimension d);
/// sum(error_units) / sum(total_units), as a percentage.
std::optional<double> macro_error_rate(const std::vector<EvaluationRecord>& records, ErrorDimension d);

inline constexpr std::array<ErrorDimension, 3> kCoreDimensions = {
    ErrorDimension::translation, ErrorDimension::diacritization_char, ErrorDimension::missing_words};
inline constexpr double kCriticalThreshold = 60.0;  // percent

/// Any core dimension strictly above threshold percent.
bool is_critical(const EvaluationRecord& r, double threshold = kCriticalThreshold);

struct Partition {
  std::vector<EvaluationRecord> kept;
  std::vector<EvaluationRecord> critical;
  std::vector<EvaluationRecord> non_hadith;
};

/// Non-hadith records first, then critical ones among the rest.
Partition apply_critical_filter(const std::vector<EvaluationRecord>& records,
                                double threshold = kCriticalThreshold);

struct DimensionRates {
  std::optional<double> micro;
  std::optional<double> macro;
  std::int64_t error_units = 0;
  std::int64_t total_units = 0;
  std::size_t records = 0;
};

std::map<ErrorDimension, DimensionRates> error_rates(const std::vector<EvaluationRecord>& records);

/// Mean over records of sum(scores) / 9, an unscored aspect counting 0.
/// A corpus lacking a layer therefore scores lower overall even though
/// that layer's own row is absent rather than 0.
std::optional<double> overall_mean(const std::vector<EvaluationRecord>& records);

/// Mean of each aspect over the records that scored it; aspects nobody
/// scored are left out.
std::map<Aspect, double> aspect_means(const std::vector<EvaluationRecord>& records);

struct AggregateReport {
  std::size_t sample_size = 0;  // distinct narrations
  std::size_t non_hadith_count = 0;
  std::size_t critical_count = 0;
  std::size_t kept_count = 0;
  double non_hadith_rate = 0.0;        // percent of sample
  double critical_failure_rate = 0.0;  // percent of sample
  std::optional<double> overall_mean;  // kept records
  std::map<Aspect, double> aspect_means;
  std::map<ErrorDimension, DimensionRates> error_rates;     // kept records
  std::map<ErrorDimension, DimensionRates> critical_rates;  // critical records, reported apart
};

/// Consolidates, suppresses cascades, partitions and aggregates.
AggregateReport build_report(const std::vector<EvaluationRecord>& records, double threshold = kCriticalThreshold);

json to_json(const AggregateReport& r);

struct ReportLabels {
  std::string primary = "corpus";
  std::string comparison = "comparison";
};

/// Human-readable report, values with two decimals, absent values as "-".
/// With a comparison report the aspect and error tables are side by side.
std::string render_text(const AggregateReport& primary, const AggregateReport* comparison = nullptr,
                        const ReportLabels& labels = {});
/// section,name,<primary>[,<comparison>] rows.
std::string render_csv(const AggregateReport& primary, const AggregateReport* comparison = nullptr,
                       const ReportLabels& labels = {});

}  // namespace isnad::evaluate
