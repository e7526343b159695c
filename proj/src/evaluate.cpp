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

#include "isnad/evaluate.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "isnad/error.hpp"

namespace isnad::evaluate {

namespace {

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

std::string fixed2(std::optional<double> v) { return v ? fmt::format("{:.2f}", *v) : "-"; }

std::optional<double> find_aspect(const AggregateReport& r, Aspect a) {
  auto it = r.aspect_means.find(a);
  if (it == r.aspect_means.end()) return std::nullopt;
  return it->second;
}

std::optional<double> find_macro(const AggregateReport& r, ErrorDimension d) {
  auto it = r.error_rates.find(d);
  return it == r.error_rates.end() ? std::nullopt : it->second.macro;
}

std::optional<double> find_micro(const AggregateReport& r, ErrorDimension d) {
  auto it = r.error_rates.find(d);
  return it == r.error_rates.end() ? std::nullopt : it->second.micro;
}

}  // namespace

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw ValidationError("bound > 0");
  // Largest multiple of bound representable; draws above it are rejected.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

std::vector<EvaluationRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read evaluation records " + path.string());
  std::vector<EvaluationRecord> out;
  std::map<std::string, std::size_t> slot;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    EvaluationRecord r;
    try {
      const json j = json::parse(line);
      if (j.contains("kind")) {
        r = std::get<EvaluationRecord>(parse_record(line));
      } else {
        r = j.get<EvaluationRecord>();
      }
      validate(r);
    } catch (const ValidationError& e) {
      throw ValidationError(e.invariant(), path.string() + ":" + std::to_string(line_no));
    } catch (const std::exception& e) {
      throw ValidationError("well-formed evaluation record", path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    auto [it, fresh] = slot.emplace(r.record_id(), out.size());
    if (fresh) {
      out.push_back(std::move(r));
    } else {
      out[it->second] = std::move(r);
    }
  }
  return out;
}

std::vector<std::string> draw_sample(const std::vector<std::string>& ids, std::size_t n, std::uint64_t seed) {
  if (n > ids.size()) {
    throw ValidationError("sample size <= corpus size", std::to_string(n) + " > " + std::to_string(ids.size()));
  }
  std::vector<std::string> pool = ids;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return pool;
}

EvaluationRecord suppress_cascades(const EvaluationRecord& r) {
  EvaluationRecord out = r;
  for (const auto& [dim, cause] : r.root_cause_links) {
    if (auto it = out.error_counts.find(dim); it != out.error_counts.end()) it->second.error_units = 0;
  }
  return out;
}

std::vector<EvaluationRecord> consolidate(const std::vector<EvaluationRecord>& records) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<const EvaluationRecord*>> by_id;
  for (const auto& r : records) {
    auto& v = by_id[r.narration_id];
    if (v.empty()) order.push_back(r.narration_id);
    v.push_back(&r);
  }
  std::vector<EvaluationRecord> out;
  out.reserve(order.size());
  for (const auto& id : order) {
    const auto& group = by_id[id];
    if (group.size() == 1) {
      out.push_back(suppress_cascades(*group.front()));
      continue;
    }
    EvaluationRecord merged;
    merged.narration_id = id;
    std::map<Aspect, std::pair<double, int>> sums;
    std::size_t non_hadith_votes = 0;
    std::vector<std::string> evaluators;
    for (const auto* r : group) {
      const auto s = suppress_cascades(*r);
      evaluators.push_back(s.evaluator_id);
      for (const auto& [a, score] : s.aspect_scores) {
        sums[a].first += score;
        sums[a].second += 1;
      }
      for (const auto& [d, c] : s.error_counts) {
        merged.error_counts[d].error_units += c.error_units;
        merged.error_counts[d].total_units += c.total_units;
      }
      if (s.is_non_hadith) ++non_hadith_votes;
      if (!s.free_notes.empty()) {
        if (!merged.free_notes.empty()) merged.free_notes += "\n";
        merged.free_notes += s.free_notes;
      }
    }
    for (const auto& [a, sc] : sums) merged.aspect_scores[a] = sc.first / sc.second;
    merged.is_non_hadith = 2 * non_hadith_votes >= group.size();
    std::sort(evaluators.begin(), evaluators.end());
    merged.evaluator_id = fmt::format("{}", fmt::join(evaluators, "+"));
    out.push_back(std::move(merged));
  }
  return out;
}

std::optional<double> micro_error_rate(const std::vector<EvaluationRecord>& records, ErrorDimension d) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    auto it = r.error_counts.find(d);
    if (it == r.error_counts.end()) continue;
    sum += static_cast<double>(it->second.error_units) / static_cast<double>(it->second.total_units);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return 100.0 * sum / static_cast<double>(n);
}

std::optional<double> macro_error_rate(const std::vector<EvaluationRecord>& records, ErrorDimension d) {
  std::int64_t errors = 0, total = 0;
  for (const auto& r : records) {
    auto it = r.error_counts.find(d);
    if (it == r.error_counts.end()) continue;
    errors += it->second.error_units;
    total += it->second.total_units;
  }
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(errors) / static_cast<double>(total);
}

bool is_critical(const EvaluationRecord& r, double threshold) {
  for (ErrorDimension d : kCoreDimensions) {
    auto it = r.error_counts.find(d);
    if (it == r.error_counts.end()) continue;
    const double rate = 100.0 * static_cast<double>(it->second.error_units) / static_cast<double>(it->second.total_units);
    if (rate > threshold) return true;
  }
  return false;
}

Partition apply_critical_filter(const std::vector<EvaluationRecord>& records, double threshold) {
  Partition p;
  for (const auto& r : records) {
    if (r.is_non_hadith) {
      p.non_hadith.push_back(r);
    } else if (is_critical(r, threshold)) {
      p.critical.push_back(r);
    } else {
      p.kept.push_back(r);
    }
  }
  return p;
}

std::map<ErrorDimension, DimensionRates> error_rates(const std::vector<EvaluationRecord>& records) {
  std::map<ErrorDimension, DimensionRates> out;
  for (ErrorDimension d : kAllDimensions) {
    DimensionRates dr;
    for (const auto& r : records) {
      auto it = r.error_counts.find(d);
      if (it == r.error_counts.end()) continue;
      dr.error_units += it->second.error_units;
      dr.total_units += it->second.total_units;
      ++dr.records;
    }
    if (dr.records == 0) continue;
    dr.micro = micro_error_rate(records, d);
    dr.macro = macro_error_rate(records, d);
    out[d] = dr;
  }
  return out;
}

std::optional<double> overall_mean(const std::vector<EvaluationRecord>& records) {
  if (records.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& r : records) {
    double s = 0.0;
    for (const auto& [_, score] : r.aspect_scores) s += score;
    sum += s / static_cast<double>(kAllAspects.size());
  }
  return sum / static_cast<double>(records.size());
}

std::map<Aspect, double> aspect_means(const std::vector<EvaluationRecord>& records) {
  std::map<Aspect, std::pair<double, std::size_t>> sums;
  for (const auto& r : records) {
    for (const auto& [a, score] : r.aspect_scores) {
      sums[a].first += score;
      sums[a].second += 1;
    }
  }
  std::map<Aspect, double> out;
  for (const auto& [a, s] : sums) out[a] = s.first / static_cast<double>(s.second);
  return out;
}

AggregateReport build_report(const std::vector<EvaluationRecord>& records, double threshold) {
  const auto consolidated = consolidate(records);
  const auto p = apply_critical_filter(consolidated, threshold);
  AggregateReport r;
  r.sample_size = consolidated.size();
  r.non_hadith_count = p.non_hadith.size();
  r.critical_count = p.critical.size();
  r.kept_count = p.kept.size();
  r.non_hadith_rate = percent(r.non_hadith_count, r.sample_size);
  r.critical_failure_rate = percent(r.critical_count, r.sample_size);
  r.overall_mean = overall_mean(p.kept);
  r.aspect_means = aspect_means(p.kept);
  r.error_rates = error_rates(p.kept);
  r.critical_rates = error_rates(p.critical);
  return r;
}

json to_json(const AggregateReport& r) {
  auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
  auto rates = [&](const std::map<ErrorDimension, DimensionRates>& m) {
    json j = json::object();
    for (const auto& [d, dr] : m) {
      j[std::string(to_string(d))] = {{"micro", opt(dr.micro)},
                                      {"macro", opt(dr.macro)},
                                      {"error_units", dr.error_units},
                                      {"total_units", dr.total_units},
                                      {"records", dr.records}};
    }
    return j;
  };
  json aspects = json::object();
  for (const auto& [a, m] : r.aspect_means) aspects[std::string(to_string(a))] = m;
  return json{{"sample_size", r.sample_size},
              {"non_hadith_count", r.non_hadith_count},
              {"critical_count", r.critical_count},
              {"kept_count", r.kept_count},
              {"non_hadith_rate", r.non_hadith_rate},
              {"critical_failure_rate", r.critical_failure_rate},
              {"overall_mean", opt(r.overall_mean)},
              {"aspect_means", aspects},
              {"error_rates", rates(r.error_rates)},
              {"critical_error_rates", rates(r.critical_rates)}};
}

std::string render_text(const AggregateReport& primary, const AggregateReport* comparison, const ReportLabels& labels) {
  std::string out;
  auto line = [&](std::string_view name, const std::string& a, const std::string& b) {
    if (comparison) {
      out += fmt::format("  {:<34} {:>10} {:>12}\n", name, a, b);
    } else {
      out += fmt::format("  {:<34} {:>10}\n", name, a);
    }
  };
  auto cmp = [&](auto getter) { return comparison ? getter(*comparison) : std::string(); };

  out += fmt::format("sample size: {}\n", primary.sample_size);
  out += fmt::format("non-hadith texts: {} ({:.2f}%)\n", primary.non_hadith_count, primary.non_hadith_rate);
  out += fmt::format("critical failures (>{:.0f}% error): {} ({:.2f}%)\n", kCriticalThreshold,
                     primary.critical_count, primary.critical_failure_rate);
  out += fmt::format("kept for scoring: {}\n", primary.kept_count);
  out += fmt::format("overall mean: {} / 10\n", fixed2(primary.overall_mean));
  if (comparison) {
    out += fmt::format("{} overall mean: {} / 10 (sample size {})\n", labels.comparison,
                       fixed2(comparison->overall_mean), comparison->sample_size);
  }

  out += "\nmean scores (0-10)\n";
  line("aspect", labels.primary, labels.comparison);
  line("Overall mean", fixed2(primary.overall_mean), cmp([](const auto& r) { return fixed2(r.overall_mean); }));
  for (Aspect a : kAllAspects) {
    line(display_name(a), fixed2(find_aspect(primary, a)),
         cmp([a](const auto& r) { return fixed2(find_aspect(r, a)); }));
  }

  out += "\nerror rates (%), macro = pooled over units\n";
  line("dimension", labels.primary, labels.comparison);
  for (ErrorDimension d : kAllDimensions) {
    line(display_name(d), fixed2(find_macro(primary, d)), cmp([d](const auto& r) { return fixed2(find_macro(r, d)); }));
  }
  out += "\nerror rates (%), micro = mean of per-narration rates\n";
  line("dimension", labels.primary, labels.comparison);
  for (ErrorDimension d : kAllDimensions) {
    line(display_name(d), fixed2(find_micro(primary, d)), cmp([d](const auto& r) { return fixed2(find_micro(r, d)); }));
  }

  if (!primary.critical_rates.empty()) {
    out += "\ncritical set error rates (%), macro\n";
    for (ErrorDimension d : kAllDimensions) {
      auto it = primary.critical_rates.find(d);
      out += fmt::format("  {:<34} {:>10}\n", display_name(d),
                         fixed2(it == primary.critical_rates.end() ? std::nullopt : it->second.macro));
    }
  }
  return out;
}

std::string render_csv(const AggregateReport& primary, const AggregateReport* comparison, const ReportLabels& labels) {
  std::string out = "section,name," + labels.primary + (comparison ? "," + labels.comparison : "") + "\n";
  auto row = [&](std::string_view section, std::string_view name, const std::string& a, const std::string& b) {
    out += fmt::format("{},{},{}", section, name, a);
    if (comparison) out += "," + b;
    out += "\n";
  };
  auto cmp = [&](auto getter) { return comparison ? getter(*comparison) : std::string(); };
  auto count = [](std::size_t n) { return std::to_string(n); };
  auto pct = [](double v) { return fmt::format("{:.2f}", v); };

  row("summary", "sample_size", count(primary.sample_size), cmp([&](const auto& r) { return count(r.sample_size); }));
  row("summary", "non_hadith_rate", pct(primary.non_hadith_rate), cmp([&](const auto& r) { return pct(r.non_hadith_rate); }));
  row("summary", "critical_failure_rate", pct(primary.critical_failure_rate),
      cmp([&](const auto& r) { return pct(r.critical_failure_rate); }));
  row("summary", "overall_mean", fixed2(primary.overall_mean), cmp([](const auto& r) { return fixed2(r.overall_mean); }));
  for (Aspect a : kAllAspects) {
    row("aspect", to_string(a), fixed2(find_aspect(primary, a)),
        cmp([a](const auto& r) { return fixed2(find_aspect(r, a)); }));
  }
  for (ErrorDimension d : kAllDimensions) {
    row("error_macro", to_string(d), fixed2(find_macro(primary, d)),
        cmp([d](const auto& r) { return fixed2(find_macro(r, d)); }));
  }
  for (ErrorDimension d : kAllDimensions) {
    row("error_micro", to_string(d), fixed2(find_micro(primary, d)),
        cmp([d](const auto& r) { return fixed2(find_micro(r, d)); }));
  }
  return out;
}

}  // namespace isnad::evaluate
