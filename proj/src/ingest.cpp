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

#include "isnad/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <regex>
#include <set>
#include <sstream>

#include "isnad/error.hpp"
#include "isnad/text.hpp"

namespace isnad::ingest {

namespace {

bool is_alef_variant(char32_t c) {
  return c == U'آ' || c == U'أ' || c == U'إ' || c == U'ٱ' || c == 0x0672 || c == 0x0673;
}

bool is_page_number_line(std::u32string_view line) {
  std::u32string core;
  for (char32_t c : line) {
    if (text::is_space(c) || c == U'-' || c == U'–' || c == U'—' || c == U'(' || c == U')' ||
        c == U'[' || c == U']') {
      continue;
    }
    core.push_back(c);
  }
  std::u32string_view v = core;
  if (!v.empty() && v.front() == U'ص') v.remove_prefix(1);
  return !v.empty() && std::all_of(v.begin(), v.end(), text::is_digit);
}

bool is_footnote_separator(std::u32string_view line) {
  const auto t = text::trim(line);
  return t.size() >= 5 && std::all_of(t.begin(), t.end(), [](char32_t c) { return c == U'_'; });
}

// "(12)" / "(١٢)" footnote references.
std::u32string remove_footnote_refs(std::u32string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == U'(') {
      std::size_t j = i + 1;
      while (j < s.size() && j - i <= 3 && text::is_digit(s[j])) ++j;
      if (j > i + 1 && j < s.size() && s[j] == U')') {
        i = j + 1;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::u32string strip_artifacts(std::u32string_view s) {
  std::u32string out;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= s.size()) {
    std::size_t nl = s.find(U'\n', pos);
    if (nl == std::u32string_view::npos) nl = s.size();
    const auto line = s.substr(pos, nl - pos);
    if (is_footnote_separator(line)) break;
    if (!is_page_number_line(line)) {
      if (!first) out.push_back(U'\n');
      out += remove_footnote_refs(line);
      first = false;
    }
    pos = nl + 1;
  }
  return out;
}

std::u32string apply_rules(std::u32string_view input, const NormalizationProfile& p) {
  std::u32string s = text::nfc(input);
  if (p.strip_page_artifacts) s = strip_artifacts(s);
  std::u32string out;
  out.reserve(s.size());
  for (char32_t c : s) {
    if (p.strip_diacritics_for_matching && text::is_diacritic(c)) continue;
    if (p.remove_tatweel && c == text::kTatweel) continue;
    if (p.unify_alef_variants && is_alef_variant(c)) c = U'ا';
    if (p.unify_ya_and_alef_maqsura && c == U'ى') c = U'ي';
    out.push_back(c);
  }
  if (p.collapse_whitespace) {
    std::u32string collapsed;
    collapsed.reserve(out.size());
    bool pending_space = false;
    for (char32_t c : out) {
      if (text::is_space(c)) {
        pending_space = !collapsed.empty();
        continue;
      }
      if (pending_space) collapsed.push_back(U' ');
      pending_space = false;
      collapsed.push_back(c);
    }
    out = std::move(collapsed);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_utf8(const std::string& bytes, const std::filesystem::path& path) {
  if (auto bad = text::find_invalid_utf8(bytes)) {
    throw ValidationError("input is valid UTF-8",
                          path.string() + ": undecodable byte at offset " + std::to_string(*bad));
  }
}

std::string_view trim_ascii(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::u32string normalize(std::u32string_view text, const NormalizationProfile& profile) {
  std::u32string cur = apply_rules(text, profile);
  // NFC after a deletion can compose a new letter that the rules map again;
  // two or three rounds reach the fixed point in practice.
  for (int round = 0; round < 16; ++round) {
    std::u32string next = apply_rules(cur, profile);
    if (next == cur) return cur;
    cur = std::move(next);
  }
  return cur;
}

std::string normalize(std::string_view text, const NormalizationProfile& profile) {
  return text::to_utf8(normalize(text::to_u32(text), profile));
}

ReclassificationTable parse_reclassification_table(std::string_view content) {
  ReclassificationTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    const auto line = trim_ascii(content.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto sep = line.find_first_of("\t,");
    if (sep == std::string_view::npos) {
      throw ValidationError("reclassification rows have two columns", "line " + std::to_string(line_no));
    }
    const auto id = trim_ascii(line.substr(0, sep));
    const auto cat = trim_ascii(line.substr(sep + 1));
    table[std::string(id)] = parse_category(cat);
  }
  return table;
}

ReclassificationTable load_reclassification_table(const std::filesystem::path& path) {
  const auto content = read_file(path);
  check_utf8(content, path);
  return parse_reclassification_table(content);
}

std::vector<SourcePage> split_pages(std::string_view content) {
  static const std::regex marker(R"(^\s*\[\[page\s+([0-9]+)\]\]\s*$)");
  std::vector<SourcePage> pages;
  std::string preamble;
  bool any_marker = false;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string line(content.substr(pos, nl - pos));
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (std::regex_match(line, m, marker)) {
      any_marker = true;
      pages.push_back(SourcePage{std::stoi(m[1].str()), {}, {}});
      continue;
    }
    std::string& target = any_marker ? pages.back().raw_text : preamble;
    if (!target.empty()) target.push_back('\n');
    target += line;
  }
  if (!any_marker) {
    if (trim_ascii(preamble).empty()) return {};
    return {SourcePage{1, preamble, {}}};
  }
  if (!trim_ascii(preamble).empty()) {
    throw ValidationError("text starts with a page marker", "found text before the first [[page N]] line");
  }
  std::stable_sort(pages.begin(), pages.end(),
                   [](const SourcePage& a, const SourcePage& b) { return a.page_no < b.page_no; });
  for (std::size_t i = 0; i < pages.size(); ++i) {
    if (pages[i].page_no < 1) throw ValidationError("page numbers >= 1");
    if (i > 0 && pages[i].page_no == pages[i - 1].page_no) {
      throw ValidationError("page numbers unique", "page " + std::to_string(pages[i].page_no));
    }
  }
  return pages;
}

SourceBook load_book(const BookSource& source, const NormalizationProfile& profile,
                     const ReclassificationTable& reclassification) {
  SourceBook book;
  book.book_id = source.book_id.empty() ? source.path.stem().string() : source.book_id;
  book.title = source.title.empty() ? book.book_id : source.title;
  book.category = source.declared_category;
  if (auto it = reclassification.find(book.book_id); it != reclassification.end()) {
    book.reclassified = it->second != source.declared_category;
    book.category = it->second;
  }

  if (std::filesystem::is_directory(source.path)) {
    static const std::regex number(R"(([0-9]+)[^0-9]*$)");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(source.path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::set<int> seen;
    for (const auto& f : files) {
      std::smatch m;
      const std::string stem = f.stem().string();
      if (!std::regex_search(stem, m, number)) {
        throw ValidationError("page files are numbered", f.string());
      }
      const int page_no = std::stoi(m[1].str());
      if (!seen.insert(page_no).second) {
        throw ValidationError("page numbers unique", f.string());
      }
      auto content = read_file(f);
      check_utf8(content, f);
      book.pages.push_back(SourcePage{page_no, std::move(content), {}});
    }
    std::sort(book.pages.begin(), book.pages.end(),
              [](const SourcePage& a, const SourcePage& b) { return a.page_no < b.page_no; });
  } else {
    const auto content = read_file(source.path);
    check_utf8(content, source.path);
    book.pages = split_pages(content);
  }
  if (book.pages.empty()) {
    throw ValidationError("book has at least one page", source.path.string() + ": zero pages");
  }
  for (auto& page : book.pages) page.normalized_text = normalize(page.raw_text, profile);
  validate(book);
  return book;
}

std::vector<SourceBook> load_corpus(const CorpusManifest& manifest) {
  ReclassificationTable reclass;
  if (!manifest.reclassification_table.empty()) {
    reclass = load_reclassification_table(manifest.root / manifest.reclassification_table);
  }
  std::vector<std::future<SourceBook>> jobs;
  for (const auto& entry : manifest.books) {
    BookSource src{manifest.root / entry.path, entry.book_id, entry.title, entry.declared_category};
    jobs.push_back(std::async(std::launch::async, [src, &manifest, &reclass] {
      return load_book(src, manifest.normalization, reclass);
    }));
  }
  std::vector<SourceBook> books;
  books.reserve(jobs.size());
  for (auto& j : jobs) books.push_back(j.get());
  return books;
}

}  // namespace isnad::ingest
