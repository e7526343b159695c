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

#include "isnad/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "isnad/error.hpp"
#include "isnad/text.hpp"

namespace isnad {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view name, const std::array<std::pair<Enum, std::string_view>, N>& table,
                const char* what) {
  for (const auto& [value, label] : table) {
    if (label == name) return value;
  }
  throw ValidationError(std::string("known ") + what, "got '" + std::string(name) + "'");
}

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum e, const std::array<std::pair<Enum, std::string_view>, N>& table) {
  for (const auto& [value, label] : table) {
    if (value == e) return label;
  }
  return "?";
}

constexpr std::array<std::pair<Category, std::string_view>, 4> kCategories = {{
    {Category::hadith, "hadith"},
    {Category::fiqh, "fiqh"},
    {Category::tafsir, "tafsir"},
    {Category::other, "other"},
}};

constexpr std::array<std::pair<QcFlag, std::string_view>, 4> kQcFlags = {{
    {QcFlag::non_hadith_suspect, "non_hadith_suspect"},
    {QcFlag::truncation_suspect, "truncation_suspect"},
    {QcFlag::low_fidelity, "low_fidelity"},
    {QcFlag::annotator_anomaly, "annotator_anomaly"},
}};

constexpr std::array<std::pair<LayerStatus, std::string_view>, 4> kLayerStatus = {{
    {LayerStatus::ok, "ok"},
    {LayerStatus::failed, "failed"},
    {LayerStatus::qc_rejected, "qc_rejected"},
    {LayerStatus::blocked, "blocked_by_upstream"},
}};

constexpr std::array<std::pair<Aspect, std::string_view>, 9> kAspects = {{
    {Aspect::chain_text_separation, "chain_text_separation"},
    {Aspect::summarization, "summarization"},
    {Aspect::grouping, "grouping"},
    {Aspect::analytical_commentary, "analytical_commentary"},
    {Aspect::thematic_tagging, "thematic_tagging"},
    {Aspect::key_points, "key_points"},
    {Aspect::thematic_similarity, "thematic_similarity"},
    {Aspect::lexical_similarity, "lexical_similarity"},
    {Aspect::semantic_similarity, "semantic_similarity"},
}};

constexpr std::array<std::pair<Aspect, std::string_view>, 9> kAspectDisplay = {{
    {Aspect::chain_text_separation, "Chain-Text separation"},
    {Aspect::summarization, "Summarization"},
    {Aspect::grouping, "Grouping of identical narrations"},
    {Aspect::analytical_commentary, "Analytical commentary"},
    {Aspect::thematic_tagging, "Thematic tagging"},
    {Aspect::key_points, "Extraction of key points"},
    {Aspect::thematic_similarity, "Thematic similarity"},
    {Aspect::lexical_similarity, "Lexical similarity"},
    {Aspect::semantic_similarity, "Semantic similarity"},
}};

constexpr std::array<std::pair<ErrorDimension, std::string_view>, 6> kDimensions = {{
    {ErrorDimension::typos, "typos"},
    {ErrorDimension::translation, "translation"},
    {ErrorDimension::missing_words, "missing_words"},
    {ErrorDimension::tagging, "tagging"},
    {ErrorDimension::key_phrases, "key_phrases"},
    {ErrorDimension::diacritization_char, "diacritization_char"},
}};

constexpr std::array<std::pair<ErrorDimension, std::string_view>, 6> kDimensionDisplay = {{
    {ErrorDimension::typos, "Typographical errors"},
    {ErrorDimension::translation, "Translation errors"},
    {ErrorDimension::missing_words, "Missing Arabic words"},
    {ErrorDimension::tagging, "Tagging errors"},
    {ErrorDimension::key_phrases, "Key phrases"},
    {ErrorDimension::diacritization_char, "Diacritization (char)"},
}};

void require(bool ok, const char* invariant, const std::string& detail = {}) {
  if (!ok) throw ValidationError(invariant, detail);
}

bool in_unit_interval(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

void append_field(std::string& out, std::string_view field) {
  out += std::to_string(field.size());
  out.push_back(':');
  out.append(field);
}

std::set<QcFlag> flags_from_json(const json& j) {
  std::set<QcFlag> out;
  for (const auto& f : j) out.insert(parse_qc_flag(f.get<std::string>()));
  return out;
}

json flags_to_json(const std::set<QcFlag>& flags) {
  json arr = json::array();
  for (QcFlag f : flags) arr.push_back(std::string(to_string(f)));
  return arr;
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> known, const char* what) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError(std::string("known ") + what + " keys", "unknown key '" + key + "'");
    }
  }
}

}  // namespace

std::string_view to_string(Category c) { return enum_name(c, kCategories); }
Category parse_category(std::string_view name) { return parse_enum(name, kCategories, "category"); }
std::string_view to_string(QcFlag f) { return enum_name(f, kQcFlags); }
QcFlag parse_qc_flag(std::string_view name) { return parse_enum(name, kQcFlags, "qc flag"); }
std::string_view to_string(LayerStatus s) { return enum_name(s, kLayerStatus); }
std::string_view to_string(Aspect a) { return enum_name(a, kAspects); }
std::string_view display_name(Aspect a) { return enum_name(a, kAspectDisplay); }
Aspect parse_aspect(std::string_view name) { return parse_enum(name, kAspects, "aspect"); }
std::string_view to_string(ErrorDimension d) { return enum_name(d, kDimensions); }
std::string_view display_name(ErrorDimension d) { return enum_name(d, kDimensionDisplay); }
ErrorDimension parse_dimension(std::string_view name) { return parse_enum(name, kDimensions, "error dimension"); }

// ---------------------------------------------------------------------------

int PageStream::page_at(std::size_t pos) const {
  auto it = std::upper_bound(page_begin.begin(), page_begin.end(), pos);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - page_begin.begin()) - 1));
  return page_no.at(idx);
}

PageStream make_page_stream(const SourceBook& book) {
  PageStream s;
  for (const auto& page : book.pages) {
    if (!s.page_begin.empty()) s.text.push_back(kPageJoiner);
    s.page_begin.push_back(s.text.size());
    s.page_no.push_back(page.page_no);
    s.text += text::to_u32(page.normalized_text);
  }
  return s;
}

std::string Narration::joined() const {
  if (chain.empty()) return text;
  std::string out = chain;
  out += kChainTextSeparator;
  out += text;
  return out;
}

std::string make_narration_id(std::string_view book_id, int page_start, std::size_t char_start,
                              std::string_view chain, std::string_view text) {
  std::string buf;
  append_field(buf, book_id);
  append_field(buf, std::to_string(page_start));
  append_field(buf, std::to_string(char_start));
  append_field(buf, chain);
  append_field(buf, text);
  return text::sha256_hex(buf).substr(0, 16);
}

std::vector<std::string> default_languages() {
  return {"en", "fa", "tr", "ur", "fr", "es", "de", "ru", "zh", "id", "ms", "bn"};
}

std::vector<std::string> default_tag_vocabulary() {
  return {"prayer",  "fasting",      "charity",     "pilgrimage", "ethics",  "knowledge",
          "family",  "jurisprudence", "eschatology", "supplication", "trade", "purity"};
}

// ---------------------------------------------------------------------------
// Validation

void validate(const SourceBook& b) {
  require(!b.book_id.empty(), "book_id non-empty");
  require(!b.pages.empty(), "book has at least one page");
  int prev = 0;
  for (const auto& p : b.pages) {
    require(p.page_no >= 1, "page numbers >= 1", "page " + std::to_string(p.page_no));
    require(p.page_no > prev, "page numbers strictly increasing", "page " + std::to_string(p.page_no));
    prev = p.page_no;
  }
}

void validate(const Narration& n) {
  require(!n.narration_id.empty(), "narration_id non-empty");
  require(!n.book_id.empty(), "book_id non-empty");
  require(n.page_start >= 1, "page_start >= 1");
  require(n.page_start <= n.page_end, "page_start <= page_end");
  require(n.char_start < n.char_end, "char_start < char_end");
  require(in_unit_interval(n.fidelity), "fidelity in [0,1]");
  require(in_unit_interval(n.segment_confidence), "segment_confidence in [0,1]");
  require(!n.text.empty() || !n.chain.empty(), "narration has content");
  require(!n.group_id || !n.group_id->empty(), "group_id non-empty when set");
  require(!n.missing_word_count || *n.missing_word_count >= 0, "missing_word_count >= 0");
}

void validate(const EnrichmentBundle& b) {
  require(!b.narration_id.empty(), "narration_id non-empty");
  auto has_ok = [&](const std::string& key) {
    auto it = b.annotator_provenance.find(key);
    return it != b.annotator_provenance.end() && it->second.status == LayerStatus::ok;
  };
  for (const auto& [lang, _] : b.translations) {
    require(has_ok("translate:" + lang), "every stored annotation carries provenance", "translate:" + lang);
  }
  require(!b.diacritized_chain || has_ok("diacritize_chain"), "every stored annotation carries provenance", "diacritize_chain");
  require(!b.diacritized_text || has_ok("diacritize_text"), "every stored annotation carries provenance", "diacritize_text");
  require(!b.summary || has_ok("summary"), "every stored annotation carries provenance", "summary");
  require(!b.key_points || has_ok("key_points"), "every stored annotation carries provenance", "key_points");
  require(!b.tags || has_ok("tags"), "every stored annotation carries provenance", "tags");
  require(!b.classified_hadith || has_ok("classify"), "every stored annotation carries provenance", "classify");
  for (const auto& [key, prov] : b.annotator_provenance) {
    require(!prov.annotator.empty(), "provenance names its annotator", key);
    require(prov.attempts >= 0, "attempt count >= 0", key);
    require(prov.status != LayerStatus::ok || prov.attempts >= 1, "successful layer has >= 1 attempt", key);
  }
}

void validate(const EvaluationRecord& r) {
  require(!r.narration_id.empty(), "narration_id non-empty");
  require(!r.evaluator_id.empty(), "evaluator_id non-empty");
  for (const auto& [aspect, score] : r.aspect_scores) {
    require(std::isfinite(score) && score >= 0.0 && score <= 10.0, "score in [0,10]",
            std::string(to_string(aspect)) + "=" + std::to_string(score));
  }
  for (const auto& [dim, c] : r.error_counts) {
    require(c.total_units > 0, "total_units > 0", std::string(to_string(dim)));
    require(c.error_units >= 0 && c.error_units <= c.total_units, "0 <= error_units <= total_units",
            std::string(to_string(dim)));
  }
  for (const auto& [from, _] : r.root_cause_links) {
    std::set<ErrorDimension> seen{from};
    auto cur = from;
    for (auto it = r.root_cause_links.find(cur); it != r.root_cause_links.end();
         it = r.root_cause_links.find(cur)) {
      cur = it->second;
      require(seen.insert(cur).second, "root-cause links acyclic", std::string(to_string(from)));
    }
  }
}

void validate(const CorpusManifest& m) {
  require(!m.languages.empty(), "language list non-empty");
  std::unordered_set<std::string> langs;
  for (const auto& l : m.languages) {
    require(!l.empty(), "language codes non-empty");
    require(langs.insert(l).second, "no duplicate language codes", l);
  }
  std::unordered_set<std::string> tags;
  for (const auto& t : m.tag_vocabulary) require(tags.insert(t).second, "no duplicate tags", t);
  std::unordered_set<std::string> ids;
  for (const auto& b : m.books) {
    require(!b.book_id.empty(), "book_id non-empty", b.path);
    require(ids.insert(b.book_id).second, "book_id unique within a corpus manifest", b.book_id);
  }
}

void validate(const StageMarker& m) { require(!m.marker_id.empty(), "marker_id non-empty"); }

void validate_against(const EnrichmentBundle& b, const Narration& n, const CorpusManifest& m) {
  validate(b);
  require(b.narration_id == n.narration_id, "bundle matches narration");
  if (b.diacritized_text) {
    require(text::strip_diacritics(*b.diacritized_text) == text::strip_diacritics(n.text),
            "stripped diacritized_text equals the matn skeleton");
  }
  if (b.diacritized_chain) {
    require(text::strip_diacritics(*b.diacritized_chain) == text::strip_diacritics(n.chain),
            "stripped diacritized_chain equals the chain skeleton");
  }
  if (b.tags) {
    for (const auto& t : *b.tags) {
      require(std::find(m.tag_vocabulary.begin(), m.tag_vocabulary.end(), t) != m.tag_vocabulary.end(),
              "every tag drawn from the configured tag vocabulary", t);
    }
  }
  for (const auto& [lang, _] : b.translations) {
    require(std::find(m.languages.begin(), m.languages.end(), lang) != m.languages.end(),
            "translation languages within the configured list", lang);
  }
}

// ---------------------------------------------------------------------------
// JSON

void to_json(json& j, const SourceBook& b) {
  json pages = json::array();
  for (const auto& p : b.pages) {
    pages.push_back({{"page_no", p.page_no}, {"raw_text", p.raw_text}, {"normalized_text", p.normalized_text}});
  }
  j = json{{"book_id", b.book_id},
           {"title", b.title},
           {"category", std::string(to_string(b.category))},
           {"reclassified", b.reclassified},
           {"pages", std::move(pages)}};
}

void from_json(const json& j, SourceBook& b) {
  b.book_id = j.at("book_id").get<std::string>();
  b.title = j.at("title").get<std::string>();
  b.category = parse_category(j.at("category").get<std::string>());
  b.reclassified = j.at("reclassified").get<bool>();
  b.pages.clear();
  for (const auto& p : j.at("pages")) {
    b.pages.push_back({p.at("page_no").get<int>(), p.at("raw_text").get<std::string>(),
                       p.at("normalized_text").get<std::string>()});
  }
}

void to_json(json& j, const Narration& n) {
  j = json{{"narration_id", n.narration_id},
           {"book_id", n.book_id},
           {"page_start", n.page_start},
           {"page_end", n.page_end},
           {"char_start", n.char_start},
           {"char_end", n.char_end},
           {"chain", n.chain},
           {"text", n.text},
           {"fidelity", n.fidelity},
           {"qc_flags", flags_to_json(n.qc_flags)},
           {"group_id", n.group_id ? json(*n.group_id) : json(nullptr)},
           {"segment_confidence", n.segment_confidence}};
  if (n.missing_word_count) j["missing_word_count"] = *n.missing_word_count;
  if (n.edit_ops) {
    j["edit_ops"] = {{"insert", n.edit_ops->insertions},
                     {"delete", n.edit_ops->deletions},
                     {"substitute", n.edit_ops->substitutions}};
  }
}

void from_json(const json& j, Narration& n) {
  n.narration_id = j.at("narration_id").get<std::string>();
  n.book_id = j.at("book_id").get<std::string>();
  n.page_start = j.at("page_start").get<int>();
  n.page_end = j.at("page_end").get<int>();
  n.char_start = j.at("char_start").get<std::size_t>();
  n.char_end = j.at("char_end").get<std::size_t>();
  n.chain = j.at("chain").get<std::string>();
  n.text = j.at("text").get<std::string>();
  n.fidelity = j.at("fidelity").get<double>();
  n.qc_flags = flags_from_json(j.at("qc_flags"));
  const auto& g = j.at("group_id");
  n.group_id = g.is_null() ? std::nullopt : std::optional<std::string>(g.get<std::string>());
  n.segment_confidence = j.value("segment_confidence", 1.0);
  n.missing_word_count.reset();
  if (j.contains("missing_word_count")) n.missing_word_count = j.at("missing_word_count").get<int>();
  n.edit_ops.reset();
  if (j.contains("edit_ops")) {
    const auto& e = j.at("edit_ops");
    n.edit_ops = EditCounts{e.at("insert").get<int>(), e.at("delete").get<int>(), e.at("substitute").get<int>()};
  }
}

void to_json(json& j, const EnrichmentBundle& b) {
  json prov = json::object();
  for (const auto& [key, p] : b.annotator_provenance) {
    prov[key] = {{"annotator", p.annotator},
                 {"version", p.version},
                 {"timestamp", p.timestamp},
                 {"attempts", p.attempts},
                 {"status", std::string(to_string(p.status))},
                 {"reason", p.reason}};
  }
  auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
  j = json{{"narration_id", b.narration_id},
           {"translations", b.translations},
           {"diacritized_chain", opt(b.diacritized_chain)},
           {"diacritized_text", opt(b.diacritized_text)},
           {"summary", opt(b.summary)},
           {"key_points", opt(b.key_points)},
           {"tags", opt(b.tags)},
           {"classified_hadith", opt(b.classified_hadith)},
           {"annotator_provenance", std::move(prov)},
           {"flags", flags_to_json(b.flags)}};
}

void from_json(const json& j, EnrichmentBundle& b) {
  auto opt_str = [&](const char* key) {
    const auto& v = j.at(key);
    return v.is_null() ? std::nullopt : std::optional<std::string>(v.get<std::string>());
  };
  auto opt_list = [&](const char* key) {
    const auto& v = j.at(key);
    return v.is_null() ? std::nullopt : std::optional<std::vector<std::string>>(v.get<std::vector<std::string>>());
  };
  b.narration_id = j.at("narration_id").get<std::string>();
  b.translations = j.at("translations").get<std::map<std::string, std::string>>();
  b.diacritized_chain = opt_str("diacritized_chain");
  b.diacritized_text = opt_str("diacritized_text");
  b.summary = opt_str("summary");
  b.key_points = opt_list("key_points");
  b.tags = opt_list("tags");
  const auto& c = j.at("classified_hadith");
  b.classified_hadith = c.is_null() ? std::nullopt : std::optional<bool>(c.get<bool>());
  b.annotator_provenance.clear();
  for (const auto& [key, p] : j.at("annotator_provenance").items()) {
    LayerProvenance lp;
    lp.annotator = p.at("annotator").get<std::string>();
    lp.version = p.at("version").get<std::string>();
    lp.timestamp = p.at("timestamp").get<std::string>();
    lp.attempts = p.at("attempts").get<int>();
    lp.status = parse_enum(p.at("status").get<std::string>(), kLayerStatus, "layer status");
    lp.reason = p.at("reason").get<std::string>();
    b.annotator_provenance.emplace(key, std::move(lp));
  }
  b.flags = flags_from_json(j.at("flags"));
}

void to_json(json& j, const EvaluationRecord& r) {
  json scores = json::object();
  for (const auto& [a, s] : r.aspect_scores) scores[std::string(to_string(a))] = s;
  json errors = json::object();
  for (const auto& [d, c] : r.error_counts) {
    errors[std::string(to_string(d))] = {{"error_units", c.error_units}, {"total_units", c.total_units}};
  }
  json links = json::object();
  for (const auto& [from, to] : r.root_cause_links) links[std::string(to_string(from))] = std::string(to_string(to));
  j = json{{"narration_id", r.narration_id},
           {"evaluator_id", r.evaluator_id},
           {"aspect_scores", std::move(scores)},
           {"error_counts", std::move(errors)},
           {"is_non_hadith", r.is_non_hadith},
           {"root_cause_links", std::move(links)},
           {"free_notes", r.free_notes}};
}

void from_json(const json& j, EvaluationRecord& r) {
  r.narration_id = j.at("narration_id").get<std::string>();
  r.evaluator_id = j.at("evaluator_id").get<std::string>();
  r.aspect_scores.clear();
  for (const auto& [key, v] : j.at("aspect_scores").items()) {
    if (v.is_null()) continue;  // not applicable
    r.aspect_scores[parse_aspect(key)] = v.get<double>();
  }
  r.error_counts.clear();
  const json counts = j.value("error_counts", json::object());
  for (const auto& [key, v] : counts.items()) {
    r.error_counts[parse_dimension(key)] = {v.at("error_units").get<std::int64_t>(),
                                            v.at("total_units").get<std::int64_t>()};
  }
  r.is_non_hadith = j.value("is_non_hadith", false);
  r.root_cause_links.clear();
  const json links = j.value("root_cause_links", json::object());
  for (const auto& [key, v] : links.items()) {
    if (v.is_null()) continue;
    r.root_cause_links[parse_dimension(key)] = parse_dimension(v.get<std::string>());
  }
  r.free_notes = j.value("free_notes", std::string());
}

void to_json(json& j, const StageMarker& m) {
  j = json{{"marker_id", m.marker_id}, {"digest", m.digest}, {"members", m.members}};
}

void from_json(const json& j, StageMarker& m) {
  m.marker_id = j.at("marker_id").get<std::string>();
  m.digest = j.at("digest").get<std::string>();
  m.members = j.value("members", std::vector<std::string>{});
}

void to_json(json& j, const NormalizationProfile& p) {
  j = json{{"strip_diacritics_for_matching", p.strip_diacritics_for_matching},
           {"unify_alef_variants", p.unify_alef_variants},
           {"unify_ya_and_alef_maqsura", p.unify_ya_and_alef_maqsura},
           {"remove_tatweel", p.remove_tatweel},
           {"collapse_whitespace", p.collapse_whitespace},
           {"strip_page_artifacts", p.strip_page_artifacts}};
}

void from_json(const json& j, NormalizationProfile& p) {
  reject_unknown_keys(j,
                      {"strip_diacritics_for_matching", "unify_alef_variants", "unify_ya_and_alef_maqsura",
                       "remove_tatweel", "collapse_whitespace", "strip_page_artifacts"},
                      "normalization profile");
  p.strip_diacritics_for_matching = j.value("strip_diacritics_for_matching", p.strip_diacritics_for_matching);
  p.unify_alef_variants = j.value("unify_alef_variants", p.unify_alef_variants);
  p.unify_ya_and_alef_maqsura = j.value("unify_ya_and_alef_maqsura", p.unify_ya_and_alef_maqsura);
  p.remove_tatweel = j.value("remove_tatweel", p.remove_tatweel);
  p.collapse_whitespace = j.value("collapse_whitespace", p.collapse_whitespace);
  p.strip_page_artifacts = j.value("strip_page_artifacts", p.strip_page_artifacts);
}

// ---------------------------------------------------------------------------
// Manifest

json manifest_to_json(const CorpusManifest& m) {
  json books = json::array();
  for (const auto& b : m.books) {
    books.push_back({{"path", b.path},
                     {"book_id", b.book_id},
                     {"title", b.title},
                     {"category", std::string(to_string(b.declared_category))}});
  }
  return json{{"name", m.name},
              {"source", m.source},
              {"languages", m.languages},
              {"tag_vocabulary", m.tag_vocabulary},
              {"pivot_language", m.pivot_language},
              {"normalization", m.normalization},
              {"books", std::move(books)},
              {"reclassification_table", m.reclassification_table},
              {"pipeline", m.pipeline}};
}

CorpusManifest manifest_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"name", "source", "languages", "tag_vocabulary", "pivot_language", "normalization",
                       "books", "reclassification_table", "pipeline"},
                      "manifest");
  CorpusManifest m;
  m.name = j.value("name", std::string());
  m.source = j.value("source", std::string());
  if (j.contains("languages")) m.languages = j.at("languages").get<std::vector<std::string>>();
  if (j.contains("tag_vocabulary")) m.tag_vocabulary = j.at("tag_vocabulary").get<std::vector<std::string>>();
  m.pivot_language = j.value("pivot_language", m.pivot_language);
  if (j.contains("normalization")) m.normalization = j.at("normalization").get<NormalizationProfile>();
  for (const auto& b : j.value("books", json::array())) {
    reject_unknown_keys(b, {"path", "book_id", "title", "category"}, "book entry");
    BookEntry e;
    e.path = b.at("path").get<std::string>();
    e.book_id = b.value("book_id", std::filesystem::path(e.path).stem().string());
    e.title = b.value("title", e.book_id);
    e.declared_category = parse_category(b.value("category", std::string("other")));
    m.books.push_back(std::move(e));
  }
  m.reclassification_table = j.value("reclassification_table", std::string());
  m.pipeline = j.value("pipeline", json::object());
  validate(m);
  return m;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, "manifest " + path.string() + ": " + e.what());
  }
  CorpusManifest m = manifest_from_json(j);
  m.root = path.parent_path();
  return m;
}

// ---------------------------------------------------------------------------
// Records

std::string_view record_kind(const Record& r) {
  return std::visit([](const auto& v) { return RecordTraits<std::decay_t<decltype(v)>>::kind; }, r);
}

std::string record_id(const Record& r) {
  return std::visit([](const auto& v) { return std::string(RecordTraits<std::decay_t<decltype(v)>>::id(v)); }, r);
}

void validate(const Record& r) {
  std::visit([](const auto& v) { validate(v); }, r);
}

std::string serialize_record(const Record& r) {
  json j = std::visit([](const auto& v) { return json(v); }, r);
  j["schema_version"] = kSchemaVersion;
  j["kind"] = std::string(record_kind(r));
  return j.dump(-1, ' ', false, json::error_handler_t::strict);
}

Record parse_record(std::string_view line) {
  const json j = json::parse(line);
  if (!j.is_object()) throw ValidationError("record is a JSON object");
  const int version = j.at("schema_version").get<int>();
  if (version != kSchemaVersion) {
    throw ValidationError("supported schema_version", "got " + std::to_string(version));
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind == RecordTraits<Narration>::kind) return j.get<Narration>();
  if (kind == RecordTraits<EnrichmentBundle>::kind) return j.get<EnrichmentBundle>();
  if (kind == RecordTraits<EvaluationRecord>::kind) return j.get<EvaluationRecord>();
  if (kind == RecordTraits<SourceBook>::kind) return j.get<SourceBook>();
  if (kind == RecordTraits<StageMarker>::kind) return j.get<StageMarker>();
  throw ValidationError("known record kind", "got '" + kind + "'");
}

}  // namespace isnad
