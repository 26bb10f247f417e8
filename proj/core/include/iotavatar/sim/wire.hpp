#pragma once

#include <nlohmann/json.hpp>

#include "iotavatar/sim/environment.hpp"

namespace iotavatar::sim {

/// POST /command body:
///   {"action": "set_lights",  "count": 0..2}
///   {"action": "set_curtain", "open": bool}
///   {"action": "water",       "amount": number}   amount optional, default 600
///   {"action": "set_people",  "count": 0..4}
/// Throws ValidationError for an unknown action, wrong types, or out-of-range values.
Action action_from_json(const nlohmann::json& body);
nlohmann::json action_to_json(const Action& action);

/// {"lights_on", "curtain_open", "moisture", "people", "brightness", "ts"}
nlohmann::json environment_to_json(const EnvironmentState& env, const Dynamics& dyn = {});

}  // namespace iotavatar::sim
