#include "iotavatar/service/runtime.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "iotavatar/error.hpp"

namespace iotavatar::service {
namespace {

template <class T>
T get_as(const nlohmann::json& obj, const char* key, const T& fallback, std::string_view where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(fmt::format("{}.{} has the wrong type", where, key));
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

std::optional<int> url_port(std::string_view url) {
  const auto scheme = url.find("://");
  if (scheme != std::string_view::npos) url.remove_prefix(scheme + 3);
  const auto slash = url.find('/');
  if (slash != std::string_view::npos) url = url.substr(0, slash);
  const auto colon = url.rfind(':');
  if (colon == std::string_view::npos) return std::nullopt;
  int port = 0;
  const auto digits = url.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || port < 0 || port > 65535) return std::nullopt;
  return port;
}

ServiceConfig parse_service_config(const nlohmann::json& j, const std::filesystem::path& base) {
  if (!j.is_object()) throw ConfigError("service config must be a JSON object");
  ServiceConfig c;

  if (const auto it = j.find("listen"); it != j.end()) {
    c.host = get_as<std::string>(*it, "host", c.host, "listen");
    c.port = get_as<int>(*it, "port", c.port, "listen");
  }
  if (const auto it = j.find("devices"); it != j.end()) {
    c.plant_url = get_as<std::string>(*it, "plant", c.plant_url, "devices");
    c.people_url = get_as<std::string>(*it, "people", c.people_url, "devices");
    c.control_url = get_as<std::string>(*it, "control", c.control_url, "devices");
  }
  c.simulate_devices = get_as<bool>(j, "simulate_devices", c.simulate_devices, "config");

  const auto poll_ms = get_as<long long>(j, "poll_interval_ms", c.poll_interval.count(), "config");
  if (poll_ms <= 0) throw ConfigError("poll_interval_ms must be > 0");
  c.poll_interval = std::chrono::milliseconds(poll_ms);

  if (const auto p = get_as<std::string>(j, "profile", "", "config"); !p.empty()) c.profile_path = resolve(base, p);
  if (const auto p = get_as<std::string>(j, "history", "", "config"); !p.empty()) c.history_path = resolve(base, p);
  if (const auto p = get_as<std::string>(j, "static_root", "", "config"); !p.empty()) c.static_root = resolve(base, p);

  if (const auto it = j.find("mode"); it != j.end()) {
    if (it->is_string() && it->get<std::string>() == "live") {
      c.replay.reset();
    } else if (it->is_object() && it->contains("replay")) {
      const auto& r = it->at("replay");
      const auto scenario = get_as<std::string>(r, "scenario", "", "mode.replay");
      if (scenario.empty()) throw ConfigError("mode.replay.scenario is required");
      c.replay = ServiceConfig::Replay{resolve(base, scenario), get_as<double>(r, "time_scale", -1.0, "mode.replay")};
    } else {
      throw ConfigError(R"(mode must be "live" or {"replay": {...}})");
    }
  }

  if (const auto it = j.find("simulation"); it != j.end()) {
    const double tau_h = get_as<double>(*it, "tau_dry_hours", c.dynamics.tau_dry_s / 3600.0, "simulation");
    if (!(tau_h > 0.0)) throw ConfigError("simulation.tau_dry_hours must be > 0");
    c.dynamics.tau_dry_s = tau_h * 3600.0;
    c.sim_time_scale = get_as<double>(*it, "time_scale", c.sim_time_scale, "simulation");
    if (!(c.sim_time_scale > 0.0)) throw ConfigError("simulation.time_scale must be > 0");
    if (const auto init = it->find("initial"); init != it->end()) {
      auto& env = c.initial_env;
      env.lights_on = get_as<int>(*init, "lights", env.lights_on, "simulation.initial");
      env.curtain_open = get_as<std::string>(*init, "curtain", env.curtain_open ? "open" : "closed",
                                             "simulation.initial") == "open";
      env.moisture = get_as<double>(*init, "moisture", env.moisture, "simulation.initial");
      env.people = get_as<int>(*init, "people", env.people, "simulation.initial");
      if (env.lights_on < 0 || env.lights_on > sim::kMaxLamps || env.people < 0 || env.people > sim::kMaxPeople ||
          env.moisture < universe::kMoisture.min || env.moisture > universe::kMoisture.max) {
        throw ConfigError("simulation.initial has a value outside its range");
      }
    }
  }

  if (c.simulate_devices) {
    for (const auto* url : {&c.plant_url, &c.people_url, &c.control_url}) {
      if (!url_port(*url)) throw ConfigError(fmt::format("simulated device url '{}' needs an explicit port", *url));
    }
  }
  return c;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_service_config(j, path.parent_path());
}

LiveRuntime::LiveRuntime(ServiceConfig config, profile::PlantProfile profile)
    : config_(std::move(config)), profile_(std::move(profile)) {}

LiveRuntime::~LiveRuntime() { stop(); }

void LiveRuntime::start() {
  if (service_) return;
  if (config_.simulate_devices) {
    auto env = config_.initial_env;
    env.clock = now_ms();
    simulator_ = std::make_unique<sim::DeviceSimulator>(
        env, config_.dynamics, sim::EnvironmentLoop::Options{std::chrono::milliseconds(100), config_.sim_time_scale},
        "127.0.0.1",
        sim::DevicePorts{*url_port(config_.plant_url), *url_port(config_.people_url),
                                    *url_port(config_.control_url)});
    simulator_->start();
  }
  const auto timeout = std::clamp(config_.poll_interval / 2, std::chrono::milliseconds(50), std::chrono::milliseconds(500));
  devices_ = std::make_unique<HttpDeviceSource>(config_.plant_url, config_.people_url, timeout);
  history_ = std::make_unique<HistoryStore>(profile_, config_.history_path);
  service_ = std::make_unique<AvatarService>(profile_, *devices_, *history_);

  ApiServer::Options api_opts;
  api_opts.host = config_.host;
  api_opts.port = config_.port;
  api_opts.static_root = config_.static_root;
  api_ = std::make_unique<ApiServer>(make_handlers(*service_, make_command_proxy(config_.control_url)), api_opts);
  service_->on_change([this](const HistoryRecord& rec) {
    api_->broadcast(to_json(rec.state, rec.seq, profile_).dump());
  });
  api_->start();
  service_->start(config_.poll_interval);
}

void LiveRuntime::stop() {
  if (service_) service_->stop();
  if (api_) api_->stop();
  if (simulator_) simulator_->stop();
  api_.reset();
  service_.reset();
  history_.reset();
  devices_.reset();
  simulator_.reset();
}

}  // namespace iotavatar::service
