#pragma once

// The live pipeline on ephemeral ports: simulated device nodes, HTTP poller,
// history, polling loop and API server.

#include <chrono>
#include <memory>

#include "iotavatar/service/api_server.hpp"
#include "iotavatar/service/avatar_service.hpp"
#include "iotavatar/service/device_source.hpp"
#include "iotavatar/sim/device_node.hpp"

namespace testsupport {

struct Stack {
  struct Options {
    iotavatar::sim::EnvironmentState env{0, false, 2450, 0, {}};
    /// Sim seconds per wall second; 0 freezes drying so the environment is constant.
    double time_scale = 0.0;
    std::chrono::milliseconds poll{50};
    bool viewer = false;
    std::size_t max_pending = 64;
  };

  explicit Stack(Options o) : options(o) {
    options.env.clock = iotavatar::now_ms();
    sim = std::make_unique<iotavatar::sim::DeviceSimulator>(
        options.env, iotavatar::sim::Dynamics{},
        iotavatar::sim::EnvironmentLoop::Options{std::chrono::milliseconds(20), options.time_scale});
    sim->start();
    devices = std::make_unique<iotavatar::service::HttpDeviceSource>(sim->plant().url(), sim->people().url(),
                                                                      std::chrono::milliseconds(200));
    history = std::make_unique<iotavatar::service::HistoryStore>(profile);
    service = std::make_unique<iotavatar::service::AvatarService>(profile, *devices, *history);
    iotavatar::service::ApiServer::Options api_opts;
    api_opts.max_pending = options.max_pending;
    api = std::make_unique<iotavatar::service::ApiServer>(
        iotavatar::service::make_handlers(
            *service, options.viewer ? nullptr : iotavatar::service::make_command_proxy(sim->control().url())),
        api_opts);
    service->on_change([this](const iotavatar::service::HistoryRecord& rec) {
      api->broadcast(iotavatar::service::to_json(rec.state, rec.seq, profile).dump());
    });
    api->start();
  }

  Stack() : Stack(Options{}) {}

  ~Stack() { stop(); }

  void start_polling() { service->start(options.poll); }

  void stop() {
    if (service) service->stop();
    if (api) api->stop();
    if (sim) sim->stop();
  }

  Options options;
  iotavatar::profile::PlantProfile profile;
  std::unique_ptr<iotavatar::sim::DeviceSimulator> sim;
  std::unique_ptr<iotavatar::service::HttpDeviceSource> devices;
  std::unique_ptr<iotavatar::service::HistoryStore> history;
  std::unique_ptr<iotavatar::service::AvatarService> service;
  std::unique_ptr<iotavatar::service::ApiServer> api;
};

}  // namespace testsupport
