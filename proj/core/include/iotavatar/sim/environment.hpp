#pragma once

#include <string>
#include <variant>

#include "iotavatar/sensor_snapshot.hpp"
#include "iotavatar/time.hpp"

namespace iotavatar::sim {

inline constexpr int kMaxLamps = 2;
inline constexpr int kMaxPeople = 4;
inline constexpr double kDefaultWaterAmount = 600.0;

/// The simulated room around the plant.
struct EnvironmentState {
  int lights_on = 0;
  bool curtain_open = false;
  double moisture = universe::kMoisture.min;
  int people = 0;
  Timestamp clock{};

  friend bool operator==(const EnvironmentState&, const EnvironmentState&) = default;
};

/// Tunables for drying and lighting. A non-finite `tau_dry_s` disables drying.
struct Dynamics {
  double tau_dry_s = 36.0 * 3600.0;
  double base_brightness = 10.0;
  double lamp_brightness = 330.0;
  double curtain_brightness = 110.0;
};

/// Advances `dt_s` seconds: moisture relaxes exponentially toward the dry end of
/// its universe; lights, curtain and people are untouched. dt_s == 0 is the
/// identity; negative dt throws InvocationError.
EnvironmentState step(const EnvironmentState& env, double dt_s, const Dynamics& dyn = {});

/// base + lamp * lights_on + curtain (when open), clamped to [0, 780].
double brightness_of(const EnvironmentState& env, const Dynamics& dyn = {});

SensorSnapshot snapshot_of(const EnvironmentState& env, const Dynamics& dyn = {});

struct SetLights {
  int count = 0;
  friend bool operator==(const SetLights&, const SetLights&) = default;
};
struct SetCurtain {
  bool open = false;
  friend bool operator==(const SetCurtain&, const SetCurtain&) = default;
};
struct Water {
  double amount = kDefaultWaterAmount;
  friend bool operator==(const Water&, const Water&) = default;
};
struct SetPeople {
  int count = 0;
  friend bool operator==(const SetPeople&, const SetPeople&) = default;
};

using Action = std::variant<SetLights, SetCurtain, Water, SetPeople>;

/// Throws ValidationError for lamp counts outside 0..2, people outside 0..4, or
/// a water amount that is negative or non-finite.
void validate(const Action& action);

/// Validates, then applies. Watering adds to moisture and clamps at the wet end.
EnvironmentState apply(const EnvironmentState& env, const Action& action);

/// Scenario-file spelling of the action, e.g. "water 600".
std::string describe(const Action& action);

}  // namespace iotavatar::sim
