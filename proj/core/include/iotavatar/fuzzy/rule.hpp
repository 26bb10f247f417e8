#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>

#include "iotavatar/fuzzy/membership.hpp"

namespace iotavatar::fuzzy {

struct TermRef {
  std::string variable;
  std::string term;

  friend bool operator==(const TermRef&, const TermRef&) = default;
};

/// Two AND-combined antecedents, one consequent term on an output variable.
struct FuzzyRule {
  std::array<TermRef, 2> antecedents;
  TermRef consequent;
};

using Memberships = std::map<std::string, MembershipVector, std::less<>>;

/// Firing strength under the min t-norm. Throws ConfigError when a referenced
/// variable or term is not present in `inputs`.
double activate(const FuzzyRule& rule, const Memberships& inputs);

}  // namespace iotavatar::fuzzy
