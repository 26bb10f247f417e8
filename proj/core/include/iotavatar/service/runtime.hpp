#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "iotavatar/profile/profile.hpp"
#include "iotavatar/service/api_server.hpp"
#include "iotavatar/service/avatar_service.hpp"
#include "iotavatar/sim/device_node.hpp"

namespace iotavatar::service {

/// Service configuration file (JSON). Relative paths resolve against the
/// file's directory.
///
///   {
///     "listen": {"host": "127.0.0.1", "port": 8080},
///     "devices": {"plant": "http://127.0.0.1:8081", "people": "http://127.0.0.1:8082",
///                 "control": "http://127.0.0.1:8083"},
///     "simulate_devices": true,
///     "poll_interval_ms": 1000,
///     "profile": "default_profile.conf",
///     "history": "history.jsonl",
///     "static_root": "ui",
///     "mode": "live" | {"replay": {"scenario": "...", "time_scale": 60}},
///     "simulation": {"tau_dry_hours": 36, "time_scale": 1,
///                    "initial": {"lights": 1, "curtain": "closed", "moisture": 2450, "people": 0}}
///   }
struct ServiceConfig {
  struct Replay {
    std::filesystem::path scenario;
    double time_scale = -1.0;  // < 0 keeps the scenario's own scale
  };

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string plant_url = "http://127.0.0.1:8081";
  std::string people_url = "http://127.0.0.1:8082";
  std::string control_url = "http://127.0.0.1:8083";
  bool simulate_devices = false;
  std::chrono::milliseconds poll_interval{1000};
  std::optional<std::filesystem::path> profile_path;
  std::optional<std::filesystem::path> history_path;
  std::filesystem::path static_root;
  std::optional<Replay> replay;
  sim::Dynamics dynamics{};
  double sim_time_scale = 1.0;
  sim::EnvironmentState initial_env{0, false, 2450.0, 0, {}};
};

/// Throws ConfigError naming the offending key.
ServiceConfig parse_service_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ServiceConfig load_service_config(const std::filesystem::path& path);

/// Port of an `http://host:port` URL, or nullopt.
std::optional<int> url_port(std::string_view url);

/// Live mode, assembled: optional in-process device simulator, HTTP poller,
/// history, polling loop and API server.
class LiveRuntime {
 public:
  LiveRuntime(ServiceConfig config, profile::PlantProfile profile);
  ~LiveRuntime();

  void start();
  void stop();

  const ServiceConfig& config() const noexcept { return config_; }
  AvatarService& service() noexcept { return *service_; }
  ApiServer& api() noexcept { return *api_; }
  sim::DeviceSimulator* simulator() noexcept { return simulator_.get(); }

 private:
  ServiceConfig config_;
  profile::PlantProfile profile_;
  std::unique_ptr<sim::DeviceSimulator> simulator_;
  std::unique_ptr<HttpDeviceSource> devices_;
  std::unique_ptr<HistoryStore> history_;
  std::unique_ptr<AvatarService> service_;
  std::unique_ptr<ApiServer> api_;
};

}  // namespace iotavatar::service
