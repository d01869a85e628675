#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <fcntl.h>
#include <unistd.h>

#include "gamette/session/event.hpp"

namespace gamette::session {

class StorageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Append-only per-session event storage. append() returns only once the
// record is durable.
class EventStore {
 public:
  virtual ~EventStore() = default;
  virtual void append(const SessionEvent& e) = 0;
  virtual std::vector<SessionEvent> load(const std::string& session) const = 0;
  virtual bool exists(const std::string& session) const = 0;
  virtual std::vector<std::string> sessions() const = 0;
};

class MemoryEventStore : public EventStore {
 public:
  void append(const SessionEvent& e) override {
    std::lock_guard lock(mu_);
    logs_[e.session].push_back(to_line(e));
  }
  std::vector<SessionEvent> load(const std::string& session) const override {
    std::lock_guard lock(mu_);
    std::vector<SessionEvent> out;
    if (auto it = logs_.find(session); it != logs_.end())
      for (const auto& line : it->second) out.push_back(from_line(line));
    return out;
  }
  bool exists(const std::string& session) const override {
    std::lock_guard lock(mu_);
    return logs_.count(session) > 0;
  }
  std::vector<std::string> sessions() const override {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [k, _] : logs_) out.push_back(k);
    return out;
  }
  std::vector<std::string> lines(const std::string& session) const {
    std::lock_guard lock(mu_);
    auto it = logs_.find(session);
    return it == logs_.end() ? std::vector<std::string>{} : it->second;
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::vector<std::string>> logs_;
};

// A record torn by a crash mid-append has no trailing newline; it was
// never acknowledged, so it is dropped.
inline std::vector<SessionEvent> read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot open event log " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<SessionEvent> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string::npos) break;
    if (nl > pos) out.push_back(from_line(text.substr(pos, nl - pos)));
    pos = nl + 1;
  }
  return out;
}

// One `<session>.jsonl` file per session under a data directory.
class FileEventStore : public EventStore {
 public:
  explicit FileEventStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) throw StorageError("storage unavailable: " + dir_.string());
  }

  void append(const SessionEvent& e) override {
    std::lock_guard lock(mu_);
    const auto line = to_line(e) + "\n";
    const auto path = path_for(e.session);
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) throw StorageError("storage unavailable: cannot open " + path.string());
    std::size_t written = 0;
    while (written < line.size()) {
      const auto n = ::write(fd, line.data() + written, line.size() - written);
      if (n <= 0) {
        ::close(fd);
        throw StorageError("storage unavailable: short write to " + path.string());
      }
      written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0) {
      ::close(fd);
      throw StorageError("storage unavailable: fsync failed on " + path.string());
    }
    ::close(fd);
  }

  std::vector<SessionEvent> load(const std::string& session) const override {
    const auto path = path_for(session);
    if (!std::filesystem::exists(path)) return {};
    return read_event_log(path);
  }
  bool exists(const std::string& session) const override { return std::filesystem::exists(path_for(session)); }
  std::vector<std::string> sessions() const override {
    std::vector<std::string> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir_))
      if (entry.path().extension() == ".jsonl") out.push_back(entry.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
  }
  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& session) const { return dir_ / (session + ".jsonl"); }

  std::filesystem::path dir_;
  mutable std::mutex mu_;
};

}  // namespace gamette::session
