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

// Append-only JSON Lines record store with a sidecar offset index.
//
// Each put() appends one line with a single write(2); the newest line for a
// (kind, id) pair wins. The index file "<store>.idx" holds
// "kind/id \t offset \t length \t line_no" per appended line and is repaired
// or rebuilt from the data file on open when it is stale.
//
// Single-writer contract: one RecordStore instance per file appends; any
// number of threads may call put() on it (they serialize on the append
// point) and any number may read concurrently.

#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "isnad/corpus.hpp"

namespace isnad {

struct StoreLineError {
  std::size_t line_no = 0;  // 1-based
  std::string message;
};

template <typename T>
struct Loaded {
  std::vector<T> records;  // latest version per id, in order of first appearance
  std::vector<StoreLineError> errors;
};

class RecordStore {
 public:
  struct Options {
    bool create = true;   // create the file when missing
    bool fsync = false;   // fdatasync after every append
  };

  explicit RecordStore(std::filesystem::path path);
  RecordStore(std::filesystem::path path, Options options);
  ~RecordStore();

  RecordStore(const RecordStore&) = delete;
  RecordStore& operator=(const RecordStore&) = delete;

  /// Validates, appends, returns the byte offset of the new line.
  std::uint64_t put(const Record& record);

  /// Appends only when the serialized record differs from the stored latest
  /// version. Returns true when a line was written.
  bool put_if_changed(const Record& record);

  std::optional<Record> get_record(std::string_view kind, const std::string& id) const;

  template <typename T>
  std::optional<T> get(const std::string& id) const {
    auto r = get_record(RecordTraits<T>::kind, id);
    if (!r) return std::nullopt;
    return std::get<T>(std::move(*r));
  }

  /// Full replay of the data file, last write wins. Malformed lines are
  /// reported with their line number; every other line is still returned.
  Loaded<Record> scan() const;

  template <typename T>
  Loaded<T> load() const {
    auto all = scan();
    Loaded<T> out;
    out.errors = std::move(all.errors);
    for (auto& r : all.records) {
      if (auto* v = std::get_if<T>(&r)) out.records.push_back(std::move(*v));
    }
    return out;
  }

  /// Lines the index could not parse when the store was opened.
  std::vector<StoreLineError> index_errors() const;

  /// Distinct (kind, id) pairs.
  std::size_t size() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  struct Slot {
    std::uint64_t offset;
    std::uint32_t length;
    std::size_t line_no;
  };

  void open_files();
  void load_index();
  void rebuild_index(std::uint64_t from_offset, std::size_t from_line);
  std::string read_line(const Slot& slot) const;
  std::uint64_t append_locked(const std::string& key, const std::string& line);

  std::filesystem::path path_;
  std::filesystem::path index_path_;
  Options options_;
  int data_fd_ = -1;
  int read_fd_ = -1;
  int index_fd_ = -1;
  std::uint64_t end_offset_ = 0;
  std::size_t line_count_ = 0;

  mutable std::shared_mutex index_mutex_;
  std::mutex append_mutex_;
  std::unordered_map<std::string, Slot> index_;
  std::vector<StoreLineError> index_errors_;
};

}  // namespace isnad
