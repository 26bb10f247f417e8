#include "iotavatar/sim/device_node.hpp"

#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "iotavatar/error.hpp"
#include "iotavatar/sim/wire.hpp"

namespace iotavatar::sim {
namespace {

void reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void install_routes(httplib::Server& svr, NodeKind kind, EnvironmentLoop& env) {
  switch (kind) {
    case NodeKind::plant:
      svr.Get("/sensors", [&env](const httplib::Request&, httplib::Response& res) {
        const auto s = env.snapshot();
        reply(res, 200, {{"brightness", s.brightness}, {"moisture", s.moisture}, {"ts", format_iso8601(s.ts)}});
      });
      break;
    case NodeKind::people:
      svr.Get("/people", [&env](const httplib::Request&, httplib::Response& res) {
        const auto s = env.snapshot();
        reply(res, 200, {{"count", s.people}, {"ts", format_iso8601(s.ts)}});
      });
      break;
    case NodeKind::control:
      svr.Get("/env", [&env](const httplib::Request&, httplib::Response& res) {
        reply(res, 200, environment_to_json(env.state(), env.dynamics()));
      });
      svr.Post("/command", [&env](const httplib::Request& req, httplib::Response& res) {
        try {
          const auto body = nlohmann::json::parse(req.body);
          const auto action = action_from_json(body);
          const auto after = env.submit(action).get();
          reply(res, 200, {{"ok", true}, {"applied", describe(action)}, {"env", environment_to_json(after, env.dynamics())}});
        } catch (const nlohmann::json::parse_error& e) {
          reply(res, 422, {{"ok", false}, {"error", fmt::format("malformed JSON: {}", e.what())}});
        } catch (const ValidationError& e) {
          reply(res, 422, {{"ok", false}, {"error", e.what()}});
        }
      });
      break;
  }
}

}  // namespace

struct DeviceNode::Impl {
  httplib::Server server;
  std::thread thread;
};

DeviceNode::DeviceNode(NodeKind kind, EnvironmentLoop& env, std::string host, int port)
    : kind_(kind), env_(env), host_(std::move(host)), port_(port) {}

DeviceNode::~DeviceNode() { stop(); }

void DeviceNode::start() {
  if (impl_) return;
  auto impl = std::make_unique<Impl>();
  install_routes(impl->server, kind_, env_);
  if (port_ == 0) {
    port_ = impl->server.bind_to_any_port(host_);
    if (port_ < 0) {
      port_ = 0;
      throw std::runtime_error(fmt::format("cannot bind device node on {}", host_));
    }
  } else if (!impl->server.bind_to_port(host_, port_)) {
    throw std::runtime_error(fmt::format("cannot bind device node on {}:{}", host_, port_));
  }
  impl->thread = std::thread([srv = &impl->server] { srv->listen_after_bind(); });
  // stop() before the accept loop is up would be lost otherwise.
  impl->server.wait_until_ready();
  impl_ = std::move(impl);
}

void DeviceNode::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
  impl_.reset();
}

bool DeviceNode::running() const { return impl_ != nullptr; }

std::string DeviceNode::url() const { return fmt::format("http://{}:{}", host_, port_); }

DeviceSimulator::DeviceSimulator(EnvironmentState initial, Dynamics dyn, EnvironmentLoop::Options options,
                                 std::string host, DevicePorts ports)
    : env_(initial, dyn, options),
      plant_(NodeKind::plant, env_, host, ports.plant),
      people_(NodeKind::people, env_, host, ports.people),
      control_(NodeKind::control, env_, host, ports.control) {}

void DeviceSimulator::start() {
  env_.start();
  plant_.start();
  people_.start();
  control_.start();
}

void DeviceSimulator::stop() {
  control_.stop();
  people_.stop();
  plant_.stop();
  env_.stop();
}

}  // namespace iotavatar::sim
