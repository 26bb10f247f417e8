#pragma once

#include "iotavatar/time.hpp"

namespace iotavatar {

/// One complete set of plant readings, each within its universe.
struct SensorSnapshot {
  Timestamp ts{};
  double brightness = 0.0;
  double moisture = 0.0;
  int people = 0;

  friend bool operator==(const SensorSnapshot&, const SensorSnapshot&) = default;
};

namespace universe {

struct Range {
  double min;
  double max;
};

inline constexpr Range kBrightness{0.0, 780.0};
inline constexpr Range kMoisture{1800.0, 3100.0};
inline constexpr Range kPeople{0.0, 4.0};
inline constexpr Range kAffect{0.0, 300.0};

}  // namespace universe
}  // namespace iotavatar
