#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "iotavatar/service/history.hpp"
#include "iotavatar/service/poller.hpp"

namespace iotavatar::service {

/// Most recent poll together with the sequence number of the last recorded change.
struct LatestState {
  AvatarState state;
  std::uint64_t seq = 0;
};

/// The polling/inference loop: single writer of the current state.
///
/// Each tick polls, publishes the result as the latest state, and when the
/// presentation changed (emotion, stale flag, rounded affect) appends a history
/// record and notifies listeners. Listeners run on the loop thread and must not
/// block.
class AvatarService {
 public:
  using Listener = std::function<void(const HistoryRecord&)>;
  using Clock = std::function<Timestamp()>;

  AvatarService(const profile::PlantProfile& profile, DeviceSource& devices, HistoryStore& history,
                Clock clock = &now_ms);
  ~AvatarService();

  AvatarService(const AvatarService&) = delete;
  AvatarService& operator=(const AvatarService&) = delete;

  /// Register before start(); not synchronised against a running loop.
  void on_change(Listener listener);

  /// One poll at `now`. Returns the appended record when the state changed.
  std::optional<HistoryRecord> tick(Timestamp now);

  /// Polls every `interval` on a background thread until stop().
  void start(std::chrono::milliseconds interval);
  void stop();

  std::optional<LatestState> latest() const;
  std::uint64_t polls() const noexcept { return polls_.load(); }
  const profile::PlantProfile& profile() const noexcept { return profile_; }
  HistoryStore& history() noexcept { return history_; }

 private:
  void run(std::chrono::milliseconds interval);

  const profile::PlantProfile& profile_;
  HistoryStore& history_;
  Poller poller_;
  Clock clock_;
  std::vector<Listener> listeners_;

  mutable std::mutex latest_mutex_;
  std::optional<LatestState> latest_;
  std::optional<AvatarState> last_published_;
  std::atomic<std::uint64_t> polls_{0};

  std::mutex run_mutex_;
  std::condition_variable wake_;
  bool stopping_ = false;
  std::thread worker_;
};

}  // namespace iotavatar::service
