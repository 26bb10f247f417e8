#pragma once

#include "iotavatar/profile/profile.hpp"
#include "iotavatar/service/avatar_state.hpp"
#include "iotavatar/service/device_source.hpp"

namespace iotavatar::service {

/// Turns device readings into avatar states, remembering each device's last
/// good reading across outages.
class Poller {
 public:
  Poller(const profile::PlantProfile& profile, DeviceSource& devices);

  /// Queries both devices and runs inference. A device that fails reuses its
  /// last-known reading and is flagged stale; a device that has never answered
  /// leaves affect undefined and the emotion normal.
  AvatarState poll_once(Timestamp now);

 private:
  const profile::PlantProfile& profile_;
  DeviceSource& devices_;
  std::optional<PlantReading> last_plant_;
  std::optional<PeopleReading> last_people_;
};

}  // namespace iotavatar::service
