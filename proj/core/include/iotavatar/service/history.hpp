#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <vector>

#include "iotavatar/profile/profile.hpp"
#include "iotavatar/service/avatar_state.hpp"

namespace iotavatar::service {

/// Append-only record log, one JSON object per line. Opening an existing file
/// resumes after its highest sequence number. Thread-safe.
class HistoryStore {
 public:
  /// In-memory only when `path` is empty. Unparseable lines in an existing
  /// file are skipped with a warning.
  HistoryStore(const profile::PlantProfile& profile, std::optional<std::filesystem::path> path = std::nullopt);

  /// Assigns the next sequence number. Timestamps are held non-decreasing.
  /// A failed file write is logged; the record is kept in memory regardless.
  HistoryRecord append(const AvatarState& state);

  /// Records with seq > `seq`, oldest first.
  std::vector<HistoryRecord> since(std::uint64_t seq) const;
  std::optional<HistoryRecord> latest() const;
  std::uint64_t last_seq() const;
  std::size_t size() const;
  std::size_t write_failures() const;

 private:
  const profile::PlantProfile& profile_;
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::vector<HistoryRecord> records_;
  std::uint64_t last_seq_ = 0;
  std::ofstream out_;
  std::size_t write_failures_ = 0;
};

/// Reads a JSONL history file. Throws ConfigError when it cannot be opened.
std::vector<HistoryRecord> read_history_file(const std::filesystem::path& path);

}  // namespace iotavatar::service
