#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iotavatar/profile/profile.hpp"
#include "iotavatar/service/avatar_service.hpp"
#include "iotavatar/sim/scenario.hpp"

namespace iotavatar::service {

/// One line of the replay table.
struct ReplayRow {
  std::optional<std::size_t> event;  // 1-based event number; empty for periodic rows
  double t_s = 0.0;                  // sim seconds from scenario start
  SensorSnapshot snapshot;
  profile::AffectScore affect;
  profile::Emotion emotion = profile::Emotion::normal;
};

struct ReplayOptions {
  double poll_interval_s = 1.0;
  /// A periodic row is emitted every this many sim seconds (from offset 0).
  double row_interval_s = 60.0;
  bool pace = true;
  /// Overrides the scenario's time scale when >= 0.
  double time_scale = -1.0;
  sim::Dynamics dynamics{};
  /// Optional persistent store; an in-memory one is used otherwise.
  HistoryStore* history = nullptr;
  /// Called on the replay thread for each recorded change.
  std::function<void(const HistoryRecord&)> on_change;
  /// Called with the service before the run, e.g. to expose its latest state.
  std::function<void(AvatarService&)> on_start;
};

struct ReplayResult {
  std::vector<ReplayRow> rows;
  std::vector<HistoryRecord> history;
  std::vector<sim::AppliedEvent> applied;
};

/// Runs the scenario through the simulated devices and the polling service on
/// sim time. Timestamps come from the scenario clock, so identical inputs give
/// identical results.
ReplayResult replay(const sim::Scenario& scenario, const profile::PlantProfile& profile,
                    const ReplayOptions& options = {});

inline constexpr std::string_view kCsvHeader = "event,people,brightness,moisture,arousal,valence,state,t_sim";

/// Header plus one line per row. Undefined affect is an empty field.
std::string replay_csv(std::span<const ReplayRow> rows);

/// Same first seven columns for stored history, with an ISO-8601 `ts` last.
std::string history_csv(std::span<const HistoryRecord> records);

}  // namespace iotavatar::service
