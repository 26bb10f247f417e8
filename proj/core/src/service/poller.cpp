#include "iotavatar/service/poller.hpp"

namespace iotavatar::service {

Poller::Poller(const profile::PlantProfile& profile, DeviceSource& devices) : profile_(profile), devices_(devices) {}

AvatarState Poller::poll_once(Timestamp now) {
  AvatarState state;
  state.ts = now;

  if (auto plant = devices_.read_plant()) {
    last_plant_ = *plant;
  } else {
    state.plant_stale = true;
  }
  if (auto people = devices_.read_people()) {
    last_people_ = *people;
  } else {
    state.people_stale = true;
  }
  state.plant = last_plant_;
  state.people = last_people_;

  if (const auto snap = state.snapshot()) {
    state.affect = profile_.score_affect(*snap);
  }
  state.emotion = profile_.classify(state.affect);
  return state;
}

}  // namespace iotavatar::service
