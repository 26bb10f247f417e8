#include "iotavatar/sim/environment_loop.hpp"

namespace iotavatar::sim {

EnvironmentLoop::EnvironmentLoop(EnvironmentState initial, Dynamics dyn, Options options)
    : dyn_(dyn), options_(options), state_(initial) {}

EnvironmentLoop::EnvironmentLoop(EnvironmentState initial, Dynamics dyn)
    : EnvironmentLoop(initial, dyn, Options{}) {}

EnvironmentLoop::~EnvironmentLoop() { stop(); }

void EnvironmentLoop::start() {
  std::lock_guard lock(mutex_);
  if (worker_.joinable()) return;
  stopping_ = false;
  worker_ = std::thread([this] { run(); });
}

void EnvironmentLoop::stop() {
  {
    std::lock_guard lock(mutex_);
    if (!worker_.joinable()) return;
    stopping_ = true;
  }
  wake_.notify_all();
  worker_.join();
  std::lock_guard lock(mutex_);
  worker_ = std::thread();
}

bool EnvironmentLoop::running() const {
  std::lock_guard lock(mutex_);
  return worker_.joinable() && !stopping_;
}

EnvironmentState EnvironmentLoop::state() const {
  std::lock_guard lock(mutex_);
  return state_;
}

SensorSnapshot EnvironmentLoop::snapshot() const { return snapshot_of(state(), dyn_); }

std::future<EnvironmentState> EnvironmentLoop::submit(const Action& action) {
  validate(action);
  Pending p{action, {}};
  auto fut = p.done.get_future();
  {
    std::lock_guard lock(mutex_);
    if (!worker_.joinable() || stopping_) {
      state_ = sim::apply(state_, action);
      p.done.set_value(state_);
      return fut;
    }
    queue_.push_back(std::move(p));
  }
  wake_.notify_all();
  return fut;
}

void EnvironmentLoop::run() {
  using clock = std::chrono::steady_clock;
  auto last = clock::now();
  std::unique_lock lock(mutex_);
  while (!stopping_) {
    wake_.wait_for(lock, options_.tick, [this] { return stopping_ || !queue_.empty(); });

    const auto now = clock::now();
    const double dt = std::chrono::duration<double>(now - last).count() * options_.time_scale;
    last = now;
    if (dt > 0.0) state_ = step(state_, dt, dyn_);

    while (!queue_.empty()) {
      auto p = std::move(queue_.front());
      queue_.pop_front();
      state_ = sim::apply(state_, p.action);
      p.done.set_value(state_);
    }
  }
  // Anything queued during shutdown still completes.
  while (!queue_.empty()) {
    auto p = std::move(queue_.front());
    queue_.pop_front();
    state_ = sim::apply(state_, p.action);
    p.done.set_value(state_);
  }
}

}  // namespace iotavatar::sim
