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

#include "isnad/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "isnad/annotator.hpp"
#include "isnad/error.hpp"
#include "isnad/text.hpp"

namespace isnad::similarity {

namespace {

template <typename Set>
double jaccard(const Set& a, const Set& b) {
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::set<std::u32string> grams(const std::vector<std::u32string>& ws, std::size_t n) {
  std::set<std::u32string> out;
  if (ws.size() < n) return out;
  for (std::size_t i = 0; i + n <= ws.size(); ++i) {
    std::u32string g = ws[i];
    for (std::size_t k = 1; k < n; ++k) {
      g.push_back(U' ');
      g += ws[i + k];
    }
    out.insert(std::move(g));
  }
  return out;
}

double lexical_words(const std::vector<std::u32string>& a, const std::vector<std::u32string>& b) {
  const std::size_t n = a.size() < 2 || b.size() < 2 ? 1 : 2;
  return jaccard(grams(a, n), grams(b, n));
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::set<std::u32string> ngrams(std::u32string_view s, std::size_t n) { return grams(text::words(s), n); }

double lexical(std::u32string_view a, std::u32string_view b) { return lexical_words(text::words(a), text::words(b)); }

double lexical(std::string_view a, std::string_view b) { return lexical(text::to_u32(a), text::to_u32(b)); }

double semantic(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw ValidationError("embedding dimensions match", std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

double thematic(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 0.0;
  return jaccard(sa, sb);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<double> HashingEmbedder::embed(std::string_view s) {
  std::vector<double> v(dim_, 0.0);
  const auto ws = text::words(text::to_u32(s));
  auto add = [&](const std::string& feature, double weight) {
    const std::uint64_t h = fnv1a(feature);
    v[h % dim_] += (h >> 63) ? -weight : weight;
  };
  for (std::size_t i = 0; i < ws.size(); ++i) {
    add("u:" + text::to_utf8(ws[i]), 1.0);
    if (i + 1 < ws.size()) add("b:" + text::to_utf8(ws[i]) + " " + text::to_utf8(ws[i + 1]), 0.5);
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  if (norm > 0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

std::vector<double> AnnotatorEmbedder::embed(std::string_view s) {
  annotate::AnnotationRequest req;
  req.request_id = "embed:" + text::sha256_hex(s).substr(0, 16);
  req.task = annotate::Task::embed;
  req.input_text = std::string(s);
  const auto outcome = client_.annotate(req);
  if (!outcome.ok) throw Error(ErrorKind::stage, "embed failed: " + outcome.error);
  return json::parse(outcome.output).get<std::vector<double>>();
}

std::map<std::string, std::string> group_identical(const std::vector<GroupInput>& inputs, double threshold,
                                                   GroupingStats* stats) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ValidationError("threshold in (0,1]");
  const std::size_t n = inputs.size();
  std::vector<std::vector<std::u32string>> ws(n);
  std::vector<std::set<std::u32string>> bigrams(n);
  for (std::size_t i = 0; i < n; ++i) {
    ws[i] = text::words(text::to_u32(inputs[i].text));
    bigrams[i] = grams(ws[i], 2);
  }

  std::unordered_map<std::u32string, std::size_t> df;
  for (const auto& b : bigrams) {
    for (const auto& g : b) ++df[g];
  }

  UnionFind uf(n);
  std::size_t scored = 0;
  std::vector<std::size_t> seen(n, SIZE_MAX);
  auto score = [&](std::size_t i, std::size_t j) {
    if (seen[j] == i) return;
    seen[j] = i;
    ++scored;
    if (lexical_words(ws[i], ws[j]) >= threshold) uf.unite(i, j);
  };

  // Long texts: prefix filtering over rarity-ordered bigram sets.
  std::unordered_map<std::u32string, std::vector<std::size_t>> prefix_index;
  std::unordered_map<std::u32string, std::vector<std::size_t>> unigram_index;
  std::vector<std::size_t> empties, shorts;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& w : std::set<std::u32string>(ws[i].begin(), ws[i].end())) unigram_index[w].push_back(i);
    if (ws[i].empty()) {
      empties.push_back(i);
      continue;
    }
    if (ws[i].size() < 2) {
      shorts.push_back(i);
      continue;
    }
    std::vector<std::u32string> ordered(bigrams[i].begin(), bigrams[i].end());
    std::sort(ordered.begin(), ordered.end(), [&](const std::u32string& a, const std::u32string& b) {
      const auto da = df[a], db = df[b];
      return da != db ? da < db : a < b;
    });
    const auto size = static_cast<double>(ordered.size());
    const auto required = static_cast<std::size_t>(std::ceil(threshold * size - 1e-9));
    const std::size_t prefix = std::clamp<std::size_t>(ordered.size() - required + 1, 1, ordered.size());
    for (std::size_t k = 0; k < prefix; ++k) {
      auto& list = prefix_index[ordered[k]];
      for (std::size_t j : list) score(i, j);
      list.push_back(i);
    }
  }
  // Short texts fall back to unigrams; a qualifying partner must share the word.
  for (std::size_t i : shorts) {
    for (std::size_t j : unigram_index[ws[i].front()]) {
      if (j != i) score(i, j);
    }
  }
  for (std::size_t k = 1; k < empties.size(); ++k) {
    ++scored;
    uf.unite(empties[0], empties[k]);
  }

  std::vector<std::string> group_min(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& g = group_min[uf.find(i)];
    if (g.empty() || inputs[i].narration_id < g) g = inputs[i].narration_id;
  }
  std::map<std::string, std::string> out;
  std::map<std::size_t, std::size_t> sizes;
  for (std::size_t i = 0; i < n; ++i) {
    out[inputs[i].narration_id] = group_min[uf.find(i)];
    ++sizes[uf.find(i)];
  }
  if (stats) {
    stats->inputs = n;
    stats->groups = sizes.size();
    stats->multi_member_groups = static_cast<std::size_t>(
        std::count_if(sizes.begin(), sizes.end(), [](const auto& kv) { return kv.second > 1; }));
    stats->candidate_pairs = scored;
  }
  return out;
}

std::vector<SimilarHit> most_similar(const SimilarCandidate& query, const std::vector<SimilarCandidate>& candidates,
                                     Embedder& embedder, std::size_t k) {
  const auto qv = embedder.embed(query.text);
  std::vector<SimilarHit> hits;
  for (const auto& c : candidates) {
    if (c.narration_id == query.narration_id) continue;
    hits.push_back(SimilarHit{c.narration_id, lexical(query.text, c.text), semantic(qv, embedder.embed(c.text)),
                              thematic(query.tags, c.tags)});
  }
  std::sort(hits.begin(), hits.end(), [](const SimilarHit& a, const SimilarHit& b) {
    if (a.lexical != b.lexical) return a.lexical > b.lexical;
    if (a.semantic != b.semantic) return a.semantic > b.semantic;
    return a.narration_id < b.narration_id;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

}  // namespace isnad::similarity
