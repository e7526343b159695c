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

#include "isnad/segment.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <tuple>
#include <thread>

#include "isnad/annotator.hpp"
#include "isnad/error.hpp"
#include "isnad/text.hpp"

namespace isnad::segment {

namespace {

std::u32string fold(std::u32string_view word) {
  std::u32string out;
  for (char32_t c : word) {
    if (text::is_diacritic(c) || c == text::kTatweel) continue;
    if (c == U'أ' || c == U'إ' || c == U'آ' || c == U'ٱ') c = U'ا';
    out.push_back(c);
  }
  return out;
}

bool in_list(std::u32string_view word, std::initializer_list<std::u32string_view> list) {
  const auto f = fold(word);
  return std::find(list.begin(), list.end(), std::u32string_view(f)) != list.end();
}

std::size_t skip_spaces(std::u32string_view s, std::size_t i, std::size_t end) {
  while (i < end && text::is_space(s[i])) ++i;
  return i;
}

std::size_t skip_delimiters_and_spaces(std::u32string_view s, std::size_t i, std::size_t end) {
  while (i < end && (text::is_space(s[i]) || text::is_sentence_delimiter(s[i]))) ++i;
  return i;
}

bool ends_sentence(std::u32string_view unit) {
  const auto t = text::trim(unit);
  return !t.empty() && text::is_sentence_delimiter(t.back());
}

// First whitespace-delimited token with surrounding punctuation removed.
std::u32string first_word(std::u32string_view s) {
  std::size_t i = skip_spaces(s, 0, s.size());
  std::size_t j = i;
  while (j < s.size() && !text::is_space(s[j])) ++j;
  auto w = s.substr(i, j - i);
  while (!w.empty() && text::is_punctuation(w.front())) w.remove_prefix(1);
  while (!w.empty() && text::is_punctuation(w.back())) w.remove_suffix(1);
  return std::u32string(w);
}

struct Sentence {
  std::size_t begin = 0;  // trimmed
  std::size_t end = 0;
};

std::vector<Sentence> sentences(std::u32string_view s) {
  std::vector<Sentence> out;
  std::size_t i = skip_spaces(s, 0, s.size());
  while (i < s.size()) {
    std::size_t j = i;
    while (j < s.size() && !text::is_sentence_delimiter(s[j])) ++j;
    while (j < s.size() && text::is_sentence_delimiter(s[j])) ++j;
    std::size_t end = j;
    while (end > i && text::is_space(s[end - 1])) --end;
    out.push_back({i, end});
    i = skip_spaces(s, j, s.size());
  }
  return out;
}

bool is_quotative(std::u32string_view word) { return in_list(word, {U"قال", U"قالت", U"يقول", U"فقال", U"وقال"}); }

// Positions of ':' that directly follow a quotative word inside [begin, end).
std::vector<std::size_t> separator_candidates(std::u32string_view s, std::size_t begin, std::size_t end) {
  std::vector<std::size_t> out;
  for (std::size_t i = begin; i < end; ++i) {
    if (s[i] != U':') continue;
    std::size_t k = i;
    while (k > begin && text::is_space(s[k - 1])) --k;
    std::size_t w = k;
    while (w > begin && !text::is_space(s[w - 1])) --w;
    if (w < k && is_quotative(s.substr(w, k - w))) out.push_back(i);
  }
  return out;
}

VerdictSpan non_hadith(std::size_t begin, std::size_t end) {
  return VerdictSpan{Span{begin, begin}, Span{begin, end}, false, RuleSegmenter::kConfident};
}

void check(bool ok, const char* invariant, std::size_t span_index) {
  if (!ok) throw ValidationError(invariant, "span " + std::to_string(span_index));
}

struct Candidate {
  std::size_t start = 0;
  std::size_t end = 0;
  Span chain;  // stream offsets
  Span text;
  bool is_hadith = true;
  double confidence = 1.0;
  std::size_t window = 0;
  int edges = 0;
  std::size_t interiority = 0;
  bool truncated = false;

  bool same_as(const Candidate& o) const {
    return start == o.start && end == o.end && chain == o.chain && text == o.text && is_hadith == o.is_hadith;
  }
  bool overlaps(const Candidate& o) const { return start < o.end && o.start < end; }
};

std::u32string_view window_text(const PageStream& stream, const Window& w) {
  return std::u32string_view(stream.text).substr(w.char_start, w.char_end - w.char_start);
}

void run_parallel(std::size_t n, int concurrency, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, concurrency)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<SemanticUnit> unitize(const PageStream& stream, std::size_t max_unit_chars) {
  if (max_unit_chars < 64) throw ValidationError("max_unit_chars >= 64");
  const std::u32string_view s = stream.text;
  std::vector<SemanticUnit> units;
  auto emit = [&](std::size_t b, std::size_t e, int page_no) {
    SemanticUnit u;
    u.unit_index = units.size();
    u.page_no = page_no;
    u.char_start = b;
    u.char_end = e;
    u.text = std::u32string(s.substr(b, e - b));
    u.starts_sentence = units.empty() || ends_sentence(units.back().text);
    units.push_back(std::move(u));
  };
  for (std::size_t p = 0; p < stream.page_begin.size(); ++p) {
    const std::size_t page_end = p + 1 < stream.page_begin.size() ? stream.page_begin[p + 1] : s.size();
    const int page_no = stream.page_no[p];
    std::size_t start = stream.page_begin[p];
    std::size_t i = start;
    while (i < page_end) {
      if (text::is_sentence_delimiter(s[i])) {
        const std::size_t e = skip_delimiters_and_spaces(s, i, page_end);
        emit(start, e, page_no);
        start = i = e;
        continue;
      }
      if (i - start + 1 > max_unit_chars) {
        std::size_t cut = start + max_unit_chars;
        for (std::size_t k = start + max_unit_chars; k > start + max_unit_chars / 2; --k) {
          if (text::is_space(s[k - 1])) {
            cut = k;
            break;
          }
        }
        emit(start, cut, page_no);
        start = i = cut;
        continue;
      }
      ++i;
    }
    if (start < page_end) emit(start, page_end, page_no);
  }
  return units;
}

std::vector<SemanticUnit> unitize(const SourceBook& book, std::size_t max_unit_chars) {
  return unitize(make_page_stream(book), max_unit_chars);
}

std::vector<Window> make_windows(const std::vector<SemanticUnit>& units, std::size_t window_units,
                                 std::size_t overlap_units) {
  if (overlap_units < 1 || window_units <= overlap_units) {
    throw ValidationError("window_units > overlap_units >= 1");
  }
  std::vector<Window> windows;
  const std::size_t step = window_units - overlap_units;
  for (std::size_t first = 0; first < units.size(); first += step) {
    Window w;
    w.index = windows.size();
    w.first_unit = first;
    w.last_unit = std::min(first + window_units, units.size()) - 1;
    w.overlap_units = overlap_units;
    w.char_start = units[w.first_unit].char_start;
    w.char_end = units[w.last_unit].char_end;
    w.starts_sentence = units[first].starts_sentence;
    windows.push_back(w);
    if (w.last_unit + 1 == units.size()) break;
  }
  return windows;
}

void validate(const SegmenterVerdict& v, std::size_t window_length) {
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < v.spans.size(); ++i) {
    const auto& sp = v.spans[i];
    check(sp.chain.begin <= sp.chain.end && sp.text.begin <= sp.text.end, "span begin <= end", i);
    check(sp.chain.end <= sp.text.begin, "chain precedes text", i);
    check(!sp.text.empty(), "text span is non-empty", i);
    check(sp.text.end <= window_length, "span inside window", i);
    check(sp.is_hadith || sp.chain.empty(), "non-hadith spans carry no chain", i);
    check(sp.confidence >= 0.0 && sp.confidence <= 1.0, "confidence in [0,1]", i);
    const std::size_t start = sp.chain.empty() ? sp.text.begin : sp.chain.begin;
    check(start >= prev_end, "spans ordered and non-overlapping", i);
    prev_end = sp.text.end;
  }
}

json verdict_to_json(const SegmenterVerdict& v) {
  json spans = json::array();
  for (const auto& sp : v.spans) {
    spans.push_back({{"chain", {sp.chain.begin, sp.chain.end}},
                     {"text", {sp.text.begin, sp.text.end}},
                     {"is_hadith", sp.is_hadith},
                     {"confidence", sp.confidence}});
  }
  return json{{"spans", spans}};
}

SegmenterVerdict verdict_from_json(const json& j) {
  SegmenterVerdict v;
  for (const auto& sp : j.at("spans")) {
    VerdictSpan s;
    const auto& c = sp.at("chain");
    const auto& t = sp.at("text");
    s.chain = Span{c.at(0).get<std::size_t>(), c.at(1).get<std::size_t>()};
    s.text = Span{t.at(0).get<std::size_t>(), t.at(1).get<std::size_t>()};
    s.is_hadith = sp.at("is_hadith").get<bool>();
    s.confidence = sp.value("confidence", 1.0);
    v.spans.push_back(s);
  }
  return v;
}

bool is_transmission_opener(std::u32string_view word) {
  return in_list(word, {U"حدثنا", U"حدثني", U"اخبرنا", U"اخبرني", U"وحدثنا", U"وحدثني", U"واخبرنا", U"واخبرني"});
}

bool is_heading_word(std::u32string_view word) { return in_list(word, {U"باب", U"كتاب", U"فصل", U"ابواب"}); }

SegmenterVerdict RuleSegmenter::segment(std::u32string_view s) {
  SegmenterVerdict v;
  const auto sents = sentences(s);
  std::optional<std::size_t> open;  // index of the narration's first sentence
  std::optional<std::size_t> orphan;
  std::size_t last_end = 0;

  auto close_orphan = [&] {
    if (orphan) v.spans.push_back(non_hadith(sents[*orphan].begin, last_end));
    orphan.reset();
  };
  auto close_narration = [&] {
    if (!open) return;
    const Sentence& first = sents[*open];
    const auto seps = separator_candidates(s, first.begin, first.end);
    VerdictSpan sp;
    sp.is_hadith = true;
    if (seps.empty()) {
      sp.chain = Span{first.begin, first.begin};
      sp.text = Span{first.begin, last_end};
      sp.confidence = kNoSeparator;
    } else {
      const std::size_t colon = seps.back();
      std::size_t chain_end = colon;
      while (chain_end > first.begin && text::is_space(s[chain_end - 1])) --chain_end;
      std::size_t text_begin = skip_spaces(s, colon + 1, last_end);
      if (text_begin == last_end) {
        // Nothing after the separator: keep the whole span as text.
        sp.chain = Span{first.begin, first.begin};
        sp.text = Span{first.begin, last_end};
        sp.confidence = kNoSeparator;
      } else {
        sp.chain = Span{first.begin, chain_end};
        sp.text = Span{text_begin, last_end};
        sp.confidence = seps.size() == 1 ? kConfident : kAmbiguous;
      }
    }
    v.spans.push_back(sp);
    open.reset();
  };

  for (std::size_t i = 0; i < sents.size(); ++i) {
    const auto word = first_word(s.substr(sents[i].begin, sents[i].end - sents[i].begin));
    if (is_heading_word(word)) {
      close_narration();
      close_orphan();
      v.spans.push_back(non_hadith(sents[i].begin, sents[i].end));
    } else if (is_transmission_opener(word)) {
      close_narration();
      close_orphan();
      open = i;
    } else if (!open && !orphan) {
      orphan = i;
    }
    last_end = sents[i].end;
  }
  close_narration();
  close_orphan();
  return v;
}

SegmenterVerdict RemoteSegmenter::segment(std::u32string_view window_text) {
  annotate::AnnotationRequest req;
  const std::string utf8 = text::to_utf8(window_text);
  req.request_id = "segment:" + text::sha256_hex(utf8).substr(0, 16);
  req.task = annotate::Task::segment_window;
  req.input_text = utf8;
  const auto outcome = client_.annotate(req);
  if (!outcome.ok) throw Error(ErrorKind::stage, "segment_window failed: " + outcome.error);
  return verdict_from_json(json::parse(outcome.output));
}

WindowOutcome segment_window(const Window& window, std::u32string_view window_text, SegmenterBackend& backend) {
  WindowOutcome out;
  out.window = window;
  try {
    auto verdict = backend.segment(window_text);
    validate(verdict, window_text.size());
    if (verdict.spans.empty() && !text::trim(window_text).empty()) {
      out.unresolved_reason = "empty verdict for non-blank window";
      return out;
    }
    out.verdict = std::move(verdict);
  } catch (const std::exception& e) {
    out.unresolved_reason = e.what();
  }
  return out;
}

std::vector<Narration> stitch(const SourceBook& book, const PageStream& stream,
                              const std::vector<WindowOutcome>& outcomes) {
  std::size_t last_window = 0;
  for (const auto& o : outcomes) last_window = std::max(last_window, o.window.index);

  std::vector<Candidate> cands;
  for (const auto& o : outcomes) {
    if (!o.resolved()) continue;
    const Window& w = o.window;
    const auto wt = window_text(stream, w);
    const auto trimmed = text::trim(wt);
    const std::size_t lead = trimmed.empty() ? 0 : static_cast<std::size_t>(trimmed.data() - wt.data());
    const std::size_t trail = lead + trimmed.size();
    for (const auto& sp : o.verdict->spans) {
      Candidate c;
      const std::size_t rel_start = sp.chain.empty() ? sp.text.begin : sp.chain.begin;
      c.start = w.char_start + rel_start;
      c.end = w.char_start + sp.text.end;
      c.chain = Span{w.char_start + sp.chain.begin, w.char_start + sp.chain.end};
      c.text = Span{w.char_start + sp.text.begin, w.char_start + sp.text.end};
      c.is_hadith = sp.is_hadith;
      c.confidence = sp.confidence;
      c.window = w.index;
      const bool leading = w.index != 0 && rel_start <= lead && (!sp.is_hadith || !w.starts_sentence);
      const bool trailing = w.index != last_window && sp.text.end >= trail;
      c.edges = int(leading) + int(trailing);
      c.interiority = std::min(rel_start - std::min(rel_start, lead), trail - std::min(trail, sp.text.end));
      cands.push_back(c);
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.edges != b.edges) return a.edges < b.edges;
    if (a.interiority != b.interiority) return a.interiority > b.interiority;
    if (a.window != b.window) return a.window < b.window;
    return a.start < b.start;
  });

  std::vector<Candidate> accepted;
  for (auto& c : cands) {
    bool duplicate = false;
    std::vector<std::size_t> conflicts;
    for (std::size_t i = 0; i < accepted.size(); ++i) {
      if (accepted[i].same_as(c)) {
        duplicate = true;
        break;
      }
      if (accepted[i].overlaps(c)) conflicts.push_back(i);
    }
    if (duplicate) continue;
    if (!conflicts.empty()) {
      if (c.edges > 0) continue;
      for (auto i : conflicts) accepted[i].truncated = true;
      c.truncated = true;
    } else if (c.edges > 0) {
      c.truncated = true;
    }
    accepted.push_back(c);
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const Candidate& a, const Candidate& b) { return std::tie(a.start, a.end) < std::tie(b.start, b.end); });

  std::vector<Narration> out;
  out.reserve(accepted.size());
  const std::u32string_view s = stream.text;
  for (const auto& c : accepted) {
    Narration n;
    n.book_id = book.book_id;
    n.char_start = c.start;
    n.char_end = c.end;
    n.page_start = stream.page_at(c.start);
    n.page_end = stream.page_at(c.end - 1);
    n.chain = text::to_utf8(s.substr(c.chain.begin, c.chain.end - c.chain.begin));
    n.text = text::to_utf8(s.substr(c.text.begin, c.text.end - c.text.begin));
    n.segment_confidence = c.confidence;
    if (!c.is_hadith) n.qc_flags.insert(QcFlag::non_hadith_suspect);
    if (c.truncated) n.qc_flags.insert(QcFlag::truncation_suspect);
    n.narration_id = make_narration_id(n.book_id, n.page_start, n.char_start, n.chain, n.text);
    out.push_back(std::move(n));
  }
  return out;
}

BookSegmentation segment_book(const SourceBook& book, SegmenterBackend& backend, const SegmentConfig& config) {
  const PageStream stream = make_page_stream(book);
  const auto units = unitize(stream, config.max_unit_chars);
  const auto windows = make_windows(units, config.window_units, config.overlap_units);

  std::vector<WindowOutcome> outcomes(windows.size());
  run_parallel(windows.size(), config.concurrency, [&](std::size_t i) {
    outcomes[i] = segment_window(windows[i], window_text(stream, windows[i]), backend);
  });
  for (int pass = 0; pass < config.reprocess_passes; ++pass) {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (!outcomes[i].resolved()) pending.push_back(i);
    }
    if (pending.empty()) break;
    run_parallel(pending.size(), config.concurrency, [&](std::size_t k) {
      const auto i = pending[k];
      outcomes[i] = segment_window(windows[i], window_text(stream, windows[i]), backend);
    });
  }

  BookSegmentation result;
  result.windows = windows.size();
  result.units = units.size();
  result.narrations = stitch(book, stream, outcomes);
  for (const auto& o : outcomes) {
    if (!o.resolved()) result.unresolved.push_back(o);
  }
  return result;
}

}  // namespace isnad::segment
