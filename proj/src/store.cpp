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

#include "isnad/store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "isnad/error.hpp"

namespace isnad {

namespace {

std::string make_key(std::string_view kind, std::string_view id) {
  std::string key(kind);
  key.push_back('/');
  key.append(id);
  return key;
}

[[noreturn]] void throw_errno(const std::string& what, const std::filesystem::path& p) {
  throw Error(ErrorKind::io, what + " " + p.string() + ": " + std::strerror(errno));
}

bool write_all(int fd, const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<std::size_t>(n);
  }
  return true;
}

std::string index_line(const std::string& key, std::uint64_t offset, std::uint32_t length, std::size_t line_no) {
  std::string s = key;
  s += '\t' + std::to_string(offset) + '\t' + std::to_string(length) + '\t' + std::to_string(line_no) + '\n';
  return s;
}

}  // namespace

RecordStore::RecordStore(std::filesystem::path path) : RecordStore(std::move(path), Options{}) {}

RecordStore::RecordStore(std::filesystem::path path, Options options)
    : path_(std::move(path)), index_path_(path_.string() + ".idx"), options_(options) {
  open_files();
  load_index();
}

RecordStore::~RecordStore() {
  if (data_fd_ >= 0) ::close(data_fd_);
  if (read_fd_ >= 0) ::close(read_fd_);
  if (index_fd_ >= 0) ::close(index_fd_);
}

void RecordStore::open_files() {
  if (!options_.create && !std::filesystem::exists(path_)) {
    throw Error(ErrorKind::io, "record store does not exist: " + path_.string());
  }
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  data_fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (data_fd_ < 0) throw_errno("cannot open", path_);
  read_fd_ = ::open(path_.c_str(), O_RDONLY | O_CLOEXEC);
  if (read_fd_ < 0) throw_errno("cannot open", path_);
  struct stat st {};
  if (::fstat(read_fd_, &st) != 0) throw_errno("cannot stat", path_);
  end_offset_ = static_cast<std::uint64_t>(st.st_size);
  if (end_offset_ > 0) {
    // A crash mid-append leaves a partial last line; terminate it so the
    // next record starts on a fresh line.
    char last = 0;
    if (::pread(read_fd_, &last, 1, static_cast<off_t>(end_offset_ - 1)) == 1 && last != '\n') {
      if (!write_all(data_fd_, "\n")) throw_errno("cannot repair", path_);
      ++end_offset_;
    }
  }
}

void RecordStore::load_index() {
  std::uint64_t covered = 0;
  std::size_t last_line = 0;
  bool usable = true;
  {
    std::ifstream in(index_path_);
    std::string line;
    while (usable && std::getline(in, line)) {
      std::istringstream fields(line);
      std::string key;
      std::uint64_t offset = 0;
      std::uint32_t length = 0;
      std::size_t line_no = 0;
      if (!std::getline(fields, key, '\t') || !(fields >> offset >> length >> line_no)) {
        usable = false;
        break;
      }
      index_[key] = Slot{offset, length, line_no};
      if (offset + length + 1 > covered) {
        covered = offset + length + 1;
        last_line = line_no;
      }
    }
  }
  if (!usable || covered > end_offset_) {
    index_.clear();
    index_fd_ = ::open(index_path_.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (index_fd_ < 0) throw_errno("cannot open", index_path_);
    rebuild_index(0, 0);
    return;
  }
  index_fd_ = ::open(index_path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (index_fd_ < 0) throw_errno("cannot open", index_path_);
  rebuild_index(covered, last_line);
}

void RecordStore::rebuild_index(std::uint64_t from_offset, std::size_t from_line) {
  line_count_ = from_line;
  if (from_offset >= end_offset_) return;
  std::ifstream in(path_, std::ios::binary);
  in.seekg(static_cast<std::streamoff>(from_offset));
  std::string line;
  std::uint64_t offset = from_offset;
  std::string pending;
  while (std::getline(in, line)) {
    ++line_count_;
    const std::uint64_t this_offset = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    try {
      const Record r = parse_record(line);
      const auto key = make_key(record_kind(r), record_id(r));
      const Slot slot{this_offset, static_cast<std::uint32_t>(line.size()), line_count_};
      index_[key] = slot;
      pending += index_line(key, slot.offset, slot.length, slot.line_no);
    } catch (const std::exception& e) {
      index_errors_.push_back({line_count_, e.what()});
    }
  }
  if (!pending.empty()) write_all(index_fd_, pending);
}

std::string RecordStore::read_line(const Slot& slot) const {
  std::string buf(slot.length, '\0');
  std::size_t done = 0;
  while (done < buf.size()) {
    const ssize_t n = ::pread(read_fd_, buf.data() + done, buf.size() - done,
                              static_cast<off_t>(slot.offset + done));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw_errno("cannot read", path_);
    done += static_cast<std::size_t>(n);
  }
  return buf;
}

std::uint64_t RecordStore::append_locked(const std::string& key, const std::string& line) {
  const std::uint64_t offset = end_offset_;
  const std::string data = line + '\n';
  if (!write_all(data_fd_, data)) {
    const int saved = errno;
    // No partial record may survive a failed append.
    if (::ftruncate(data_fd_, static_cast<off_t>(offset)) != 0) {
      // the store now ends in a partial line; reopening repairs it
    }
    errno = saved;
    throw_errno("append failed on", path_);
  }
  if (options_.fsync) ::fdatasync(data_fd_);
  end_offset_ += data.size();
  ++line_count_;
  const Slot slot{offset, static_cast<std::uint32_t>(line.size()), line_count_};
  {
    std::unique_lock lock(index_mutex_);
    index_[key] = slot;
  }
  // A lost index line only costs a tail rescan on the next open.
  write_all(index_fd_, index_line(key, slot.offset, slot.length, slot.line_no));
  return offset;
}

std::uint64_t RecordStore::put(const Record& record) {
  validate(record);
  const auto line = serialize_record(record);
  const auto key = make_key(record_kind(record), record_id(record));
  std::lock_guard lock(append_mutex_);
  return append_locked(key, line);
}

bool RecordStore::put_if_changed(const Record& record) {
  validate(record);
  const auto line = serialize_record(record);
  const auto key = make_key(record_kind(record), record_id(record));
  std::lock_guard lock(append_mutex_);
  std::optional<Slot> slot;
  {
    std::shared_lock rl(index_mutex_);
    if (auto it = index_.find(key); it != index_.end()) slot = it->second;
  }
  if (slot && read_line(*slot) == line) return false;
  append_locked(key, line);
  return true;
}

std::optional<Record> RecordStore::get_record(std::string_view kind, const std::string& id) const {
  Slot slot{};
  {
    std::shared_lock lock(index_mutex_);
    auto it = index_.find(make_key(kind, id));
    if (it == index_.end()) return std::nullopt;
    slot = it->second;
  }
  const auto line = read_line(slot);
  try {
    return parse_record(line);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::io, path_.string() + ":" + std::to_string(slot.line_no) + ": " + e.what());
  }
}

Loaded<Record> RecordStore::scan() const {
  Loaded<Record> out;
  std::unordered_map<std::string, std::size_t> position;
  std::ifstream in(path_, std::ios::binary);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      Record r = parse_record(line);
      auto key = make_key(record_kind(r), record_id(r));
      auto [it, inserted] = position.emplace(std::move(key), out.records.size());
      if (inserted) {
        out.records.push_back(std::move(r));
      } else {
        out.records[it->second] = std::move(r);
      }
    } catch (const std::exception& e) {
      out.errors.push_back({line_no, e.what()});
    }
  }
  return out;
}

std::vector<StoreLineError> RecordStore::index_errors() const { return index_errors_; }

std::size_t RecordStore::size() const {
  std::shared_lock lock(index_mutex_);
  return index_.size();
}

}  // namespace isnad
