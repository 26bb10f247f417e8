#include "iotavatar/service/history.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "iotavatar/error.hpp"

namespace iotavatar::service {

std::vector<HistoryRecord> read_history_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read history '{}'", path.string()));
  std::vector<HistoryRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      spdlog::warn("{}:{}: skipping unreadable history record ({})", path.string(), lineno, e.what());
    }
  }
  return records;
}

HistoryStore::HistoryStore(const profile::PlantProfile& profile, std::optional<std::filesystem::path> path)
    : profile_(profile), path_(std::move(path)) {
  if (!path_) return;
  if (std::filesystem::exists(*path_)) {
    records_ = read_history_file(*path_);
    for (const auto& r : records_) last_seq_ = std::max(last_seq_, r.seq);
  } else if (path_->has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_->parent_path(), ec);
  }
  out_.open(*path_, std::ios::app);
  if (!out_) spdlog::error("cannot open history '{}' for appending", path_->string());
}

HistoryRecord HistoryStore::append(const AvatarState& state) {
  std::lock_guard lock(mutex_);
  HistoryRecord rec{++last_seq_, state};
  if (!records_.empty()) rec.state.ts = std::max(rec.state.ts, records_.back().state.ts);
  records_.push_back(rec);

  if (path_) {
    out_ << to_json(rec.state, rec.seq, profile_).dump() << '\n';
    out_.flush();
    if (!out_) {
      ++write_failures_;
      spdlog::error("history write to '{}' failed (seq {})", path_->string(), rec.seq);
      out_.clear();
    }
  }
  return rec;
}

std::vector<HistoryRecord> HistoryStore::since(std::uint64_t seq) const {
  std::lock_guard lock(mutex_);
  const auto it = std::upper_bound(records_.begin(), records_.end(), seq,
                                   [](std::uint64_t s, const HistoryRecord& r) { return s < r.seq; });
  return {it, records_.end()};
}

std::optional<HistoryRecord> HistoryStore::latest() const {
  std::lock_guard lock(mutex_);
  if (records_.empty()) return std::nullopt;
  return records_.back();
}

std::uint64_t HistoryStore::last_seq() const {
  std::lock_guard lock(mutex_);
  return last_seq_;
}

std::size_t HistoryStore::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

std::size_t HistoryStore::write_failures() const {
  std::lock_guard lock(mutex_);
  return write_failures_;
}

}  // namespace iotavatar::service
