#include "iotavatar/fuzzy/rule.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "iotavatar/error.hpp"

namespace iotavatar::fuzzy {

double activate(const FuzzyRule& rule, const Memberships& inputs) {
  double strength = 1.0;
  for (const auto& ref : rule.antecedents) {
    const auto it = inputs.find(ref.variable);
    if (it == inputs.end()) {
      throw ConfigError(fmt::format("rule references unknown input '{}'", ref.variable));
    }
    strength = std::min(strength, it->second.of(ref.term));
  }
  return strength;
}

}  // namespace iotavatar::fuzzy
