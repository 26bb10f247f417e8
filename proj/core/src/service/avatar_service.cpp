#include "iotavatar/service/avatar_service.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

namespace iotavatar::service {

AvatarService::AvatarService(const profile::PlantProfile& profile, DeviceSource& devices, HistoryStore& history,
                             Clock clock)
    : profile_(profile), history_(history), poller_(profile, devices), clock_(std::move(clock)) {
  if (const auto last = history_.latest()) last_published_ = last->state;
}

AvatarService::~AvatarService() { stop(); }

void AvatarService::on_change(Listener listener) { listeners_.push_back(std::move(listener)); }

std::optional<HistoryRecord> AvatarService::tick(Timestamp now) {
  const AvatarState state = poller_.poll_once(now);
  ++polls_;

  std::optional<HistoryRecord> record;
  if (!last_published_ || !same_presentation(*last_published_, state)) {
    record = history_.append(state);
    last_published_ = state;
  }
  {
    std::lock_guard lock(latest_mutex_);
    latest_ = LatestState{record ? record->state : state, history_.last_seq()};
  }
  if (record) {
    for (const auto& listener : listeners_) {
      try {
        listener(*record);
      } catch (const std::exception& e) {
        spdlog::error("state listener failed: {}", e.what());
      }
    }
  }
  return record;
}

void AvatarService::start(std::chrono::milliseconds interval) {
  std::lock_guard lock(run_mutex_);
  if (worker_.joinable()) return;
  stopping_ = false;
  worker_ = std::thread([this, interval] { run(interval); });
}

void AvatarService::stop() {
  {
    std::lock_guard lock(run_mutex_);
    if (!worker_.joinable()) return;
    stopping_ = true;
  }
  wake_.notify_all();
  worker_.join();
  std::lock_guard lock(run_mutex_);
  worker_ = std::thread();
}

std::optional<LatestState> AvatarService::latest() const {
  std::lock_guard lock(latest_mutex_);
  return latest_;
}

void AvatarService::run(std::chrono::milliseconds interval) {
  auto next = std::chrono::steady_clock::now();
  while (true) {
    try {
      tick(clock_());
    } catch (const std::exception& e) {
      spdlog::error("poll failed: {}", e.what());
    }
    next += interval;
    // An overrun poll is followed immediately by the next one, never by a burst.
    next = std::max(next, std::chrono::steady_clock::now());
    std::unique_lock lock(run_mutex_);
    if (wake_.wait_until(lock, next, [this] { return stopping_; })) break;
  }
}

}  // namespace iotavatar::service
