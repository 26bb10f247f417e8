#include "iotavatar/sim/wire.hpp"

#include <fmt/format.h>

#include "iotavatar/error.hpp"

namespace iotavatar::sim {
namespace {

const nlohmann::json& field(const nlohmann::json& body, const char* key, std::string_view action) {
  const auto it = body.find(key);
  if (it == body.end()) throw ValidationError(fmt::format("{}: missing '{}'", action, key));
  return *it;
}

int int_field(const nlohmann::json& body, const char* key, std::string_view action) {
  const auto& v = field(body, key, action);
  if (!v.is_number_integer()) throw ValidationError(fmt::format("{}: '{}' must be an integer", action, key));
  return v.get<int>();
}

}  // namespace

Action action_from_json(const nlohmann::json& body) {
  if (!body.is_object()) throw ValidationError("command must be a JSON object");
  const auto it = body.find("action");
  if (it == body.end() || !it->is_string()) throw ValidationError("command needs a string 'action'");
  const auto name = it->get<std::string>();

  Action action;
  if (name == "set_lights") {
    action = SetLights{int_field(body, "count", name)};
  } else if (name == "set_people") {
    action = SetPeople{int_field(body, "count", name)};
  } else if (name == "set_curtain") {
    const auto& v = field(body, "open", name);
    if (!v.is_boolean()) throw ValidationError("set_curtain: 'open' must be a boolean");
    action = SetCurtain{v.get<bool>()};
  } else if (name == "water") {
    Water w;
    if (const auto a = body.find("amount"); a != body.end()) {
      if (!a->is_number()) throw ValidationError("water: 'amount' must be a number");
      w.amount = a->get<double>();
    }
    action = w;
  } else {
    throw ValidationError(fmt::format("unknown action '{}'", name));
  }
  validate(action);
  return action;
}

nlohmann::json action_to_json(const Action& action) {
  return std::visit(
      [](const auto& a) -> nlohmann::json {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, SetLights>) return {{"action", "set_lights"}, {"count", a.count}};
        if constexpr (std::is_same_v<T, SetCurtain>) return {{"action", "set_curtain"}, {"open", a.open}};
        if constexpr (std::is_same_v<T, Water>) return {{"action", "water"}, {"amount", a.amount}};
        if constexpr (std::is_same_v<T, SetPeople>) return {{"action", "set_people"}, {"count", a.count}};
      },
      action);
}

nlohmann::json environment_to_json(const EnvironmentState& env, const Dynamics& dyn) {
  return {
      {"lights_on", env.lights_on},
      {"curtain_open", env.curtain_open},
      {"moisture", env.moisture},
      {"people", env.people},
      {"brightness", brightness_of(env, dyn)},
      {"ts", format_iso8601(env.clock)},
  };
}

}  // namespace iotavatar::sim
