#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iotavatar/profile/profile.hpp"
#include "iotavatar/sensor_snapshot.hpp"

namespace iotavatar::service {

struct PlantReading {
  double brightness = 0.0;
  double moisture = 0.0;
  Timestamp ts{};

  friend bool operator==(const PlantReading&, const PlantReading&) = default;
};

struct PeopleReading {
  int count = 0;
  Timestamp ts{};

  friend bool operator==(const PeopleReading&, const PeopleReading&) = default;
};

/// What the avatar shows after one poll.
struct AvatarState {
  Timestamp ts{};
  std::optional<PlantReading> plant;
  std::optional<PeopleReading> people;
  profile::AffectScore affect;
  profile::Emotion emotion = profile::Emotion::normal;
  /// Devices whose reading this poll is reused or missing.
  bool plant_stale = false;
  bool people_stale = false;

  bool stale() const noexcept { return plant_stale || people_stale; }

  /// Both readings known; the snapshot fed to inference.
  std::optional<SensorSnapshot> snapshot() const;

  friend bool operator==(const AvatarState&, const AvatarState&) = default;
};

struct HistoryRecord {
  std::uint64_t seq = 0;
  AvatarState state;

  friend bool operator==(const HistoryRecord&, const HistoryRecord&) = default;
};

/// Two states are the same for push purposes when emotion, stale flag and the
/// integer-rounded affect agree.
bool same_presentation(const AvatarState& a, const AvatarState& b) noexcept;

/// Payload schema:
///   {"seq", "ts", "sensors": {"brightness", "moisture", "people"},
///    "percent": {"brightness", "moisture", "people"},
///    "affect": {"arousal", "valence"}, "emotion": {"label", "code"},
///    "stale", "stale_devices": [...]}
/// Unknown sensor values and undefined affect are null. `profile` supplies the
/// percentage scaling.
nlohmann::json to_json(const AvatarState& state, std::uint64_t seq, const profile::PlantProfile& profile);

/// Inverse of to_json (percentages are derived data and not read back).
/// Throws nlohmann::json::exception or ConfigError on a malformed payload.
HistoryRecord record_from_json(const nlohmann::json& j);

}  // namespace iotavatar::service
