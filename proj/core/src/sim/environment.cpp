#include "iotavatar/sim/environment.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "iotavatar/error.hpp"

namespace iotavatar::sim {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

EnvironmentState step(const EnvironmentState& env, double dt_s, const Dynamics& dyn) {
  if (!(dt_s >= 0.0) || !std::isfinite(dt_s)) {
    throw InvocationError(fmt::format("step needs a finite dt >= 0, got {}", dt_s));
  }
  if (dt_s == 0.0) return env;
  EnvironmentState next = env;
  const double floor = universe::kMoisture.min;
  if (std::isfinite(dyn.tau_dry_s) && dyn.tau_dry_s > 0.0) {
    next.moisture = floor + (env.moisture - floor) * std::exp(-dt_s / dyn.tau_dry_s);
  }
  next.moisture = std::clamp(next.moisture, floor, universe::kMoisture.max);
  next.clock += std::chrono::milliseconds(std::llround(dt_s * 1000.0));
  return next;
}

double brightness_of(const EnvironmentState& env, const Dynamics& dyn) {
  const double lux = dyn.base_brightness + dyn.lamp_brightness * env.lights_on +
                     (env.curtain_open ? dyn.curtain_brightness : 0.0);
  return std::clamp(lux, universe::kBrightness.min, universe::kBrightness.max);
}

SensorSnapshot snapshot_of(const EnvironmentState& env, const Dynamics& dyn) {
  return {env.clock, brightness_of(env, dyn),
          std::clamp(env.moisture, universe::kMoisture.min, universe::kMoisture.max),
          std::clamp(env.people, 0, kMaxPeople)};
}

void validate(const Action& action) {
  std::visit(overloaded{
                 [](const SetLights& a) {
                   if (a.count < 0 || a.count > kMaxLamps) {
                     throw ValidationError(fmt::format("set_lights: count {} outside 0..{}", a.count, kMaxLamps));
                   }
                 },
                 [](const SetCurtain&) {},
                 [](const Water& a) {
                   if (!std::isfinite(a.amount) || a.amount < 0.0) {
                     throw ValidationError(fmt::format("water: amount {} must be finite and >= 0", a.amount));
                   }
                 },
                 [](const SetPeople& a) {
                   if (a.count < 0 || a.count > kMaxPeople) {
                     throw ValidationError(fmt::format("set_people: count {} outside 0..{}", a.count, kMaxPeople));
                   }
                 },
             },
             action);
}

EnvironmentState apply(const EnvironmentState& env, const Action& action) {
  validate(action);
  EnvironmentState next = env;
  std::visit(overloaded{
                 [&](const SetLights& a) { next.lights_on = a.count; },
                 [&](const SetCurtain& a) { next.curtain_open = a.open; },
                 [&](const Water& a) {
                   next.moisture = std::min(env.moisture + a.amount, universe::kMoisture.max);
                 },
                 [&](const SetPeople& a) { next.people = a.count; },
             },
             action);
  return next;
}

std::string describe(const Action& action) {
  return std::visit(overloaded{
                        [](const SetLights& a) { return fmt::format("set_lights {}", a.count); },
                        [](const SetCurtain& a) { return fmt::format("set_curtain {}", a.open ? "open" : "closed"); },
                        [](const Water& a) { return fmt::format("water {}", a.amount); },
                        [](const SetPeople& a) { return fmt::format("set_people {}", a.count); },
                    },
                    action);
}

}  // namespace iotavatar::sim
