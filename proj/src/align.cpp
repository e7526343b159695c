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

#include "isnad/align.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "isnad/text.hpp"

namespace isnad::align {

namespace {

template <typename Seq>
std::size_t edit_distance(const Seq& a, const Seq& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

// Full matrix plus traceback; deletions are elements of a missing from b.
// Substitutions are preferred over an insertion/deletion pair.
template <typename Seq>
EditCounts edit_script(const Seq& a, const Seq& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::uint32_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<std::uint32_t>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      at(i, j) = std::min({at(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0u : 1u), at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }
  EditCounts c;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0u : 1u)) {
      if (a[i - 1] != b[j - 1]) ++c.substitutions;
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++c.deletions;
      --i;
    } else {
      ++c.insertions;
      --j;
    }
  }
  return c;
}

struct Stripped {
  std::u32string text;
  std::vector<std::size_t> origin;  // stripped index -> stream offset
};

Stripped strip_with_map(std::u32string_view s) {
  Stripped out;
  out.text.reserve(s.size());
  out.origin.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (text::is_diacritic(s[i])) continue;
    out.text.push_back(s[i]);
    out.origin.push_back(i);
  }
  return out;
}

// Last row of the semi-global DP: row[j] = min distance of q to any
// substring of t ending at j.
std::vector<std::uint32_t> semi_global_last_row(std::u32string_view q, std::u32string_view t) {
  std::vector<std::uint32_t> prev(t.size() + 1, 0), cur(t.size() + 1);
  for (std::size_t i = 1; i <= q.size(); ++i) {
    cur[0] = static_cast<std::uint32_t>(i);
    const char32_t qc = q[i - 1];
    for (std::size_t j = 1; j <= t.size(); ++j) {
      cur[j] = std::min({prev[j - 1] + (qc == t[j - 1] ? 0u : 1u), prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev;
}

// dist[k] = levenshtein(q, t[end-k, end)) for k in [0, max_len].
std::vector<std::uint32_t> distances_by_start(std::u32string_view q, std::u32string_view t, std::size_t end,
                                              std::size_t max_len) {
  max_len = std::min(max_len, end);
  const std::size_t m = q.size();
  std::vector<std::uint32_t> prev(max_len + 1), cur(max_len + 1);
  std::iota(prev.begin(), prev.end(), 0u);
  for (std::size_t i = 1; i <= m; ++i) {
    cur[0] = static_cast<std::uint32_t>(i);
    const char32_t qc = q[m - i];
    for (std::size_t k = 1; k <= max_len; ++k) {
      cur[k] = std::min({prev[k - 1] + (qc == t[end - k] ? 0u : 1u), prev[k] + 1, cur[k - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev;
}

}  // namespace

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) { return edit_distance(a, b); }

EditCounts edit_ops(std::u32string_view a, std::u32string_view b) { return edit_script(a, b); }

double similarity(std::u32string_view a, std::u32string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

double similarity(std::string_view a, std::string_view b) { return similarity(text::to_u32(a), text::to_u32(b)); }

std::optional<AlignmentResult> locate(std::string_view query, const PageStream& stream, const LocateOptions& options) {
  const std::u32string q = text::strip_diacritics(text::to_u32(query));
  const Stripped t = strip_with_map(stream.text);
  const std::size_t m = q.size();
  if (m == 0 || t.text.empty()) return std::nullopt;

  const auto row = semi_global_last_row(q, t.text);
  std::vector<std::size_t> ends(t.text.size());
  std::iota(ends.begin(), ends.end(), std::size_t{1});
  const std::size_t keep = std::min<std::size_t>(4, ends.size());
  std::partial_sort(ends.begin(), ends.begin() + keep, ends.end(), [&](std::size_t a, std::size_t b) {
    return row[a] != row[b] ? row[a] < row[b] : a < b;
  });
  std::set<std::size_t> probe;
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t e = ends[i];
    const std::size_t lo = e > options.refine_radius ? e - options.refine_radius : 1;
    const std::size_t hi = std::min(t.text.size(), e + options.refine_radius);
    for (std::size_t x = lo; x <= hi; ++x) probe.insert(x);
  }

  const auto min_len = static_cast<std::size_t>(std::floor(static_cast<double>(m) * (1.0 - options.slack)));
  const auto max_len = static_cast<std::size_t>(std::ceil(static_cast<double>(m) * (1.0 + options.slack)));
  double best = -1.0;
  std::size_t best_start = 0, best_end = 0;
  auto score_end = [&](std::size_t e) {
    const auto dist = distances_by_start(q, t.text, e, max_len);
    for (std::size_t k = std::max<std::size_t>(1, min_len); k < dist.size(); ++k) {
      const double f = 1.0 - static_cast<double>(dist[k]) / static_cast<double>(std::max(m, k));
      const std::size_t s = e - k;
      if (f > best || (f == best && (s < best_start || (s == best_start && e < best_end)))) {
        best = f;
        best_start = s;
        best_end = e;
      }
    }
  };
  for (std::size_t e : probe) score_end(e);
  // Nothing long enough near the candidates (short streams, all-tied rows).
  if (best < 0.0) {
    for (std::size_t e = std::max<std::size_t>(1, min_len); e <= t.text.size(); ++e) score_end(e);
  }
  if (best < 0.0) return std::nullopt;
  if (best < options.min_fidelity) return std::nullopt;

  AlignmentResult r;
  r.fidelity = best;
  r.char_start = t.origin[best_start];
  r.char_end = t.origin[best_end - 1] + 1;
  r.page_start = stream.page_at(r.char_start);
  r.page_end = stream.page_at(r.char_end - 1);
  const std::u32string_view span = std::u32string_view(t.text).substr(best_start, best_end - best_start);
  r.edit_ops_summary = edit_ops(span, q);
  r.missing_word_count = missing_words(text::words(q), text::words(span));
  return r;
}

std::optional<AlignmentResult> locate(std::string_view query, const SourceBook& book, const LocateOptions& options) {
  return locate(query, make_page_stream(book), options);
}

Narration align_narration(const Narration& n, const PageStream& stream, const LocateOptions& options) {
  Narration out = n;
  const std::u32string query = text::strip_diacritics(text::to_u32(n.joined()));
  std::u32string own;
  if (n.char_end <= stream.text.size() && n.char_start < n.char_end) {
    own = text::strip_diacritics(std::u32string_view(stream.text).substr(n.char_start, n.char_end - n.char_start));
  }
  double fidelity = similarity(query, own);
  EditCounts ops = edit_ops(own, query);
  int missing = missing_words(text::words(query), text::words(own));
  if (fidelity < options.min_fidelity) {
    LocateOptions relaxed = options;
    relaxed.min_fidelity = 0.0;
    if (auto found = locate(n.joined(), stream, relaxed); found && found->fidelity > fidelity) {
      fidelity = found->fidelity;
      ops = found->edit_ops_summary;
      missing = found->missing_word_count;
    }
  }
  out.fidelity = fidelity;
  out.edit_ops = ops;
  out.missing_word_count = missing;
  if (fidelity < options.min_fidelity) {
    out.qc_flags.insert(QcFlag::low_fidelity);
  } else {
    out.qc_flags.erase(QcFlag::low_fidelity);
  }
  return out;
}

int missing_words(const std::vector<std::u32string>& narration_words, const std::vector<std::u32string>& source_words) {
  return edit_script(source_words, narration_words).deletions;
}

int missing_words(std::string_view narration_text, std::string_view source_span) {
  return missing_words(text::words(text::to_u32(narration_text)), text::words(text::to_u32(source_span)));
}

MissingWordTally missing_word_rate(const std::vector<std::pair<std::string, std::string>>& pairs) {
  MissingWordTally t;
  for (const auto& [narration, source] : pairs) {
    t.missing += missing_words(narration, source);
    t.source_words += static_cast<std::int64_t>(text::words(text::to_u32(source)).size());
  }
  return t;
}

}  // namespace isnad::align
