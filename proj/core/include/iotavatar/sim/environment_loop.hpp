#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <future>
#include <mutex>
#include <thread>

#include "iotavatar/sim/environment.hpp"

namespace iotavatar::sim {

/// Owns the live EnvironmentState. A single worker thread integrates the
/// dynamics and applies queued commands; readers get whole-state copies.
class EnvironmentLoop {
 public:
  struct Options {
    std::chrono::milliseconds tick{100};
    /// Sim seconds per wall second.
    double time_scale = 1.0;
  };

  EnvironmentLoop(EnvironmentState initial, Dynamics dyn, Options options);
  explicit EnvironmentLoop(EnvironmentState initial, Dynamics dyn = {});
  ~EnvironmentLoop();

  EnvironmentLoop(const EnvironmentLoop&) = delete;
  EnvironmentLoop& operator=(const EnvironmentLoop&) = delete;

  void start();
  void stop();
  bool running() const;

  EnvironmentState state() const;
  SensorSnapshot snapshot() const;
  const Dynamics& dynamics() const noexcept { return dyn_; }

  /// Validates on the calling thread (throws ValidationError), then queues the
  /// action for the worker. The future resolves to the state right after it
  /// was applied. Without a running worker the action is applied inline.
  std::future<EnvironmentState> submit(const Action& action);

 private:
  struct Pending {
    Action action;
    std::promise<EnvironmentState> done;
  };

  void run();

  const Dynamics dyn_;
  const Options options_;

  mutable std::mutex mutex_;
  std::condition_variable wake_;
  EnvironmentState state_;
  std::deque<Pending> queue_;
  bool stopping_ = false;
  std::thread worker_;
};

}  // namespace iotavatar::sim
