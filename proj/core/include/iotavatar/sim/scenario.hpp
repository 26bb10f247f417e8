#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "iotavatar/sim/environment.hpp"

namespace iotavatar::sim {

struct ScenarioEvent {
  double at_s = 0.0;  // offset from scenario start
  Action action;
  int line = 0;
};

/// A timed list of environment changes.
///
/// Text form, one directive per line, '#' comments:
///
///   start 2021-06-01T09:00:00Z      sim clock at offset 0
///   duration 60m
///   timescale 3600                   sim seconds per wall second, 0 = unpaced
///   init lights=0 curtain=closed moisture=3100 people=2
///   preroll 3d                       dry/step the initial state before offset 0
///   05:00 set_lights 1               <offset> <action> [argument]
///
/// Offsets are `mm:ss`, `hh:mm:ss`, or a number with an optional s/m/h/d unit.
/// Actions: set_lights <0..2>, set_curtain <open|closed>, water [amount],
/// set_people <0..4>.
struct Scenario {
  std::vector<ScenarioEvent> events;
  double duration_s = 0.0;
  double time_scale = 0.0;
  double preroll_s = 0.0;
  EnvironmentState initial{};

  /// `initial` advanced through the preroll.
  EnvironmentState start_state(const Dynamics& dyn = {}) const;
};

/// Throws ScenarioError carrying the offending line number.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);

struct AppliedEvent {
  std::size_t index = 0;  // 0-based position in Scenario::events
  double at_s = 0.0;
  Action action;
  EnvironmentState after;
};

/// Hooks called from inside run_scenario, in time order. Events due at a tick
/// are applied before that tick's on_tick.
class ScenarioObserver {
 public:
  virtual ~ScenarioObserver() = default;
  virtual void on_event(const AppliedEvent& /*event*/) {}
  virtual void on_tick(double /*t_s*/, const EnvironmentState& /*env*/) {}
};

struct RunOptions {
  double tick_s = 1.0;
  /// Sleep so that sim time tracks wall time times `time_scale`. Ignored when
  /// the scale is 0.
  bool pace = true;
  /// Overrides Scenario::time_scale when >= 0.
  double time_scale = -1.0;
};

/// Steps `env` from offset 0 to the scenario duration, applying each event at
/// its offset. Returns the applied-event log in order.
std::vector<AppliedEvent> run_scenario(const Scenario& scenario, EnvironmentState env, const Dynamics& dyn = {},
                                       ScenarioObserver* observer = nullptr, const RunOptions& options = {});

}  // namespace iotavatar::sim
