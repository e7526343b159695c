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

// Pairwise narration similarity and near-duplicate grouping.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "isnad/corpus.hpp"

namespace isnad::annotate {
class AnnotatorClient;
}

namespace isnad::similarity {

/// Word n-gram set of a normalized text; n-grams joined by U+0020.
std::set<std::u32string> ngrams(std::u32string_view text, std::size_t n);

/// Jaccard over word bigram sets; unigrams when either text has fewer than
/// two words. Two empty texts score 1.
double lexical(std::string_view a, std::string_view b);
double lexical(std::u32string_view a, std::u32string_view b);

/// Cosine of two embeddings clamped to [0,1]. Throws ValidationError on
/// a dimension mismatch; zero vectors score 0.
double semantic(const std::vector<double>& a, const std::vector<double>& b);

/// Jaccard over tag sets. Two empty sets score 0.
double thematic(const std::vector<std::string>& a, const std::vector<std::string>& b);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(std::string_view text) = 0;
  virtual std::string name() const = 0;
};

/// Local feature-hashing embedder over word unigrams and bigrams,
/// L2-normalized. Deterministic across platforms.
class HashingEmbedder : public Embedder {
 public:
  static constexpr std::size_t kDefaultDim = 256;
  explicit HashingEmbedder(std::size_t dim = kDefaultDim) : dim_(dim) {}
  std::vector<double> embed(std::string_view text) override;
  std::string name() const override { return "hash-embed-v1"; }

 private:
  std::size_t dim_;
};

/// Asks the annotator (task embed) and parses the JSON array it returns.
class AnnotatorEmbedder : public Embedder {
 public:
  explicit AnnotatorEmbedder(annotate::AnnotatorClient& client) : client_(client) {}
  std::vector<double> embed(std::string_view text) override;
  std::string name() const override { return "annotator-embed"; }

 private:
  annotate::AnnotatorClient& client_;
};

/// Stable 64-bit FNV-1a, used wherever a platform-independent hash is needed.
std::uint64_t fnv1a(std::string_view bytes);

struct GroupInput {
  std::string narration_id;
  std::string text;  // normalized matn
};

inline constexpr double kDefaultGroupThreshold = 0.90;

struct GroupingStats {
  std::size_t inputs = 0;
  std::size_t groups = 0;  // including singletons
  std::size_t multi_member_groups = 0;
  std::size_t candidate_pairs = 0;  // pairs scored exactly
};

/// narration_id -> group_id. Groups are the connected components of the
/// graph joining every pair with lexical() >= threshold; the group id is the
/// smallest member narration_id, singletons map to themselves.
///
/// Pairs are only scored when blocking says they can reach the threshold:
/// texts of two or more words are indexed by a prefix of their bigram set
/// ordered rarest first (prefix length |x| - ceil(t|x|) + 1, so any pair with
/// Jaccard >= t shares a prefix bigram); shorter texts are compared against
/// every text containing their word. Neither filter can drop a qualifying
/// pair. Throws ValidationError unless threshold is in (0,1].
std::map<std::string, std::string> group_identical(const std::vector<GroupInput>& inputs,
                                                   double threshold = kDefaultGroupThreshold,
                                                   GroupingStats* stats = nullptr);

struct SimilarHit {
  std::string narration_id;
  double lexical = 0.0;
  double semantic = 0.0;
  double thematic = 0.0;
};

struct SimilarCandidate {
  std::string narration_id;
  std::string text;
  std::vector<std::string> tags;
};

/// Scores `query` against every candidate and returns the top k by
/// lexical, then semantic, then id.
std::vector<SimilarHit> most_similar(const SimilarCandidate& query, const std::vector<SimilarCandidate>& candidates,
                                     Embedder& embedder, std::size_t k);

}  // namespace isnad::similarity
