#pragma once

#include <memory>
#include <string>

#include "iotavatar/sim/environment_loop.hpp"

namespace iotavatar::sim {

/// Which virtual device a node impersonates.
///   plant   GET /sensors -> {"brightness", "moisture", "ts"}
///   people  GET /people  -> {"count", "ts"}
///   control POST /command (see wire.hpp), GET /env
enum class NodeKind { plant, people, control };

/// One HTTP device endpoint over a shared EnvironmentLoop. Nodes start and stop
/// independently; a stopped node refuses connections, the environment keeps
/// running.
class DeviceNode {
 public:
  /// Port 0 binds an ephemeral port on first start; restarts reuse it.
  DeviceNode(NodeKind kind, EnvironmentLoop& env, std::string host = "127.0.0.1", int port = 0);
  ~DeviceNode();

  DeviceNode(const DeviceNode&) = delete;
  DeviceNode& operator=(const DeviceNode&) = delete;

  /// Binds and serves on a background thread. Throws std::runtime_error when
  /// the port cannot be bound.
  void start();
  void stop();
  bool running() const;

  NodeKind kind() const noexcept { return kind_; }
  int port() const noexcept { return port_; }
  std::string url() const;

 private:
  struct Impl;

  NodeKind kind_;
  EnvironmentLoop& env_;
  std::string host_;
  int port_;
  std::unique_ptr<Impl> impl_;
};

/// Fixed ports for the three nodes; 0 picks an ephemeral port.
struct DevicePorts {
  int plant = 0;
  int people = 0;
  int control = 0;
};

/// The three nodes plus their environment, as one unit.
class DeviceSimulator {
 public:
  DeviceSimulator(EnvironmentState initial, Dynamics dyn = {}, EnvironmentLoop::Options options = {},
                  std::string host = "127.0.0.1", DevicePorts ports = {});

  void start();
  void stop();

  EnvironmentLoop& environment() noexcept { return env_; }
  DeviceNode& plant() noexcept { return plant_; }
  DeviceNode& people() noexcept { return people_; }
  DeviceNode& control() noexcept { return control_; }

 private:
  EnvironmentLoop env_;
  DeviceNode plant_;
  DeviceNode people_;
  DeviceNode control_;
};

}  // namespace iotavatar::sim
