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


// Independent reference implementations the tests compare against.

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "isnad/corpus.hpp"
#include "isnad/similarity.hpp"

namespace isnad::testing {

/// Full-matrix Levenshtein over code points.
std::size_t dp_edit_distance(const std::u32string& a, const std::u32string& b);
double dp_similarity(const std::u32string& a, const std::u32string& b);

/// All-pairs graph with lexical() >= threshold, components by BFS, labelled
/// by their smallest id.
std::map<std::string, std::string> brute_force_groups(const std::vector<similarity::GroupInput>& inputs,
                                                      double threshold);

/// Arabic letters, spaces, a few diacritics and punctuation.
std::u32string random_arabic(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len,
                             bool with_marks = true);
/// Space-joined words drawn from a small vocabulary so near duplicates occur.
std::string random_sentence(std::mt19937_64& rng, std::size_t min_words, std::size_t max_words,
                            std::size_t vocabulary = 40);

std::filesystem::path source_dir();
std::filesystem::path sample_manifest();
std::filesystem::path fixture(const std::string& name);

/// Deleted with its contents on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Runs a shell command, returns its exit status and captured stdout.
struct CommandResult {
  int status = -1;
  std::string out;
};
CommandResult run_command(const std::string& command);

}  // namespace isnad::testing
