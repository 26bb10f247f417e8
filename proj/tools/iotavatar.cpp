#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "iotavatar/error.hpp"
#include "iotavatar/profile/profile.hpp"
#include "iotavatar/service/replay.hpp"
#include "iotavatar/service/runtime.hpp"
#include "iotavatar/sim/device_node.hpp"
#include "iotavatar/sim/scenario.hpp"

using namespace iotavatar;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kScenarioError = 2;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

/// Blocks until SIGINT/SIGTERM, or `seconds` when positive.
void wait_for_shutdown(double seconds) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const auto end = std::chrono::steady_clock::now() + std::chrono::duration<double>(seconds);
  while (!g_stop && (seconds <= 0 || std::chrono::steady_clock::now() < end)) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

profile::PlantProfile profile_or_default(const std::optional<fs::path>& path) {
  return path ? profile::load_profile_file(*path) : profile::PlantProfile();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
}

int cmd_run(const fs::path& config_path, double run_for) {
  auto config = service::load_service_config(config_path);
  const auto profile = profile_or_default(config.profile_path);

  if (!config.replay) {
    service::LiveRuntime rt(config, profile);
    rt.start();
    spdlog::info("serving on http://{}:{} (live)", config.host, rt.api().port());
    wait_for_shutdown(run_for);
    rt.stop();
    return kOk;
  }

  // Replay mode: the scenario drives the service on sim time; the API is read-only.
  const auto scenario = sim::load_scenario_file(config.replay->scenario);
  std::optional<service::HistoryStore> history;
  history.emplace(profile, config.history_path);
  std::unique_ptr<service::ApiServer> api;
  service::ReplayOptions opt;
  opt.time_scale = config.replay->time_scale;
  opt.dynamics = config.dynamics;
  opt.history = &*history;
  opt.on_start = [&](service::AvatarService& svc) {
    service::ApiServer::Options api_opts;
    api_opts.host = config.host;
    api_opts.port = config.port;
    api_opts.static_root = config.static_root;
    api = std::make_unique<service::ApiServer>(service::make_handlers(svc), api_opts);
    api->start();
    spdlog::info("serving on http://{}:{} (replay of {})", config.host, api->port(), config.replay->scenario.string());
  };
  opt.on_change = [&](const service::HistoryRecord& rec) {
    if (api) api->broadcast(service::to_json(rec.state, rec.seq, profile).dump());
  };
  const auto result = service::replay(scenario, profile, opt);
  spdlog::info("replay finished: {} events, {} recorded changes", result.applied.size(), result.history.size());
  // The service object is gone; keep answering from the stored history.
  if (api) api->stop();
  std::optional<service::LatestState> last;
  if (const auto rec = history->latest()) last = service::LatestState{rec->state, rec->seq};
  service::ApiServer::Handlers h;
  h.state = [&]() -> std::optional<std::string> {
    if (!last) return std::nullopt;
    return service::to_json(last->state, last->seq, profile).dump();
  };
  h.history = [&](std::uint64_t since) {
    auto out = nlohmann::json::array();
    for (const auto& rec : history->since(since)) out.push_back(service::to_json(rec.state, rec.seq, profile));
    return out.dump();
  };
  service::ApiServer::Options api_opts;
  api_opts.host = config.host;
  api_opts.port = config.port;
  api_opts.static_root = config.static_root;
  service::ApiServer after(h, api_opts);
  after.start();
  wait_for_shutdown(run_for);
  after.stop();
  return kOk;
}

int cmd_replay(const fs::path& scenario_path, const std::optional<fs::path>& profile_path, const fs::path& out,
               double time_scale) {
  const auto profile = profile_or_default(profile_path);
  const auto scenario = sim::load_scenario_file(scenario_path);
  service::ReplayOptions opt;
  opt.time_scale = time_scale;
  const auto result = service::replay(scenario, profile, opt);
  write_text(out, service::replay_csv(result.rows));
  for (const auto& row : result.rows) {
    if (row.event) {
      spdlog::info("event {:>2}: {} ({})", *row.event, profile::code(row.emotion), profile::label(row.emotion));
    }
  }
  return kOk;
}

int cmd_export(const fs::path& history_path, const fs::path& out) {
  const auto records = service::read_history_file(history_path);
  write_text(out, service::history_csv(records));
  return kOk;
}

int cmd_validate(const std::optional<fs::path>& profile_path, const std::optional<fs::path>& scenario_path) {
  if (profile_path) {
    const auto p = profile::load_profile_file(*profile_path);
    fmt::print("profile ok: {} rules, deadband {}, moisture {}\n", p.engine().rules().size(), p.deadband(),
               p.moisture_polarity() == profile::MoisturePolarity::wet_high ? "wet_high" : "dry_high");
  }
  if (scenario_path) {
    const auto sc = sim::load_scenario_file(*scenario_path);
    fmt::print("scenario ok: {} events over {} s\n", sc.events.size(), sc.duration_s);
  }
  return kOk;
}

int cmd_simulate(const sim::DevicePorts& ports, double time_scale, double run_for) {
  sim::EnvironmentState env{0, false, 2450.0, 0, now_ms()};
  sim::DeviceSimulator devices(env, {}, {std::chrono::milliseconds(100), time_scale}, "127.0.0.1", ports);
  devices.start();
  spdlog::info("plant {}  people {}  control {}", devices.plant().url(), devices.people().url(),
               devices.control().url());
  wait_for_shutdown(run_for);
  devices.stop();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plant avatar: fuzzy affect service, device simulator and replay tools"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  fs::path config;
  double run_for = 0;
  auto* run = app.add_subcommand("run", "Serve the avatar API (live or replay mode per config)");
  run->add_option("--config", config, "Service config (JSON)")->required();
  run->add_option("--for", run_for, "Stop after this many seconds (default: until interrupted)");

  fs::path scenario, out, history;
  std::optional<fs::path> profile_path;
  std::optional<fs::path> scenario_opt;
  double time_scale = -1;
  auto* replay = app.add_subcommand("replay", "Replay a scenario and write the state table as CSV");
  replay->add_option("--scenario", scenario, "Scenario file")->required();
  replay->add_option("--profile", profile_path, "Plant profile (default: built-in)");
  replay->add_option("--out", out, "Output CSV, '-' for stdout")->required();
  replay->add_option("--time-scale", time_scale, "Sim seconds per wall second; 0 runs unpaced");

  auto* exp = app.add_subcommand("export", "Convert a history JSONL file to CSV");
  exp->add_option("--history", history, "History file (JSONL)")->required();
  exp->add_option("--out", out, "Output CSV, '-' for stdout")->required();

  auto* validate = app.add_subcommand("validate", "Check a profile and/or scenario file");
  validate->add_option("--profile", profile_path, "Plant profile");
  validate->add_option("--scenario", scenario_opt, "Scenario file");

  sim::DevicePorts ports{8081, 8082, 8083};
  double sim_scale = 1.0;
  auto* simulate = app.add_subcommand("simulate", "Run only the simulated device nodes");
  simulate->add_option("--plant-port", ports.plant);
  simulate->add_option("--people-port", ports.people);
  simulate->add_option("--control-port", ports.control);
  simulate->add_option("--time-scale", sim_scale, "Sim seconds per wall second");
  simulate->add_option("--for", run_for, "Stop after this many seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*run) return cmd_run(config, run_for);
    if (*replay) return cmd_replay(scenario, profile_path, out, time_scale);
    if (*exp) return cmd_export(history, out);
    if (*validate) {
      if (!profile_path && !scenario_opt) {
        std::cerr << "validate: give --profile and/or --scenario\n";
        return kConfigError;
      }
      return cmd_validate(profile_path, scenario_opt);
    }
    if (*simulate) return cmd_simulate(ports, sim_scale, run_for);
  } catch (const ScenarioError& e) {
    spdlog::error("scenario error: {}", e.what());
    return kScenarioError;
  } catch (const ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  }
  return kOk;
}
