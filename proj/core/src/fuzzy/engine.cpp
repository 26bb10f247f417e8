#include "iotavatar/fuzzy/engine.hpp"

#include <set>

#include <fmt/format.h>

#include "iotavatar/error.hpp"

namespace iotavatar::fuzzy {
namespace {

const LinguisticVariable* find_by_name(std::span<const LinguisticVariable> vars, std::string_view name) {
  for (const auto& v : vars) {
    if (v.name() == name) return &v;
  }
  return nullptr;
}

std::string describe(const FuzzyRule& r) {
  return fmt::format("IF {} is {} AND {} is {} THEN {} is {}", r.antecedents[0].variable, r.antecedents[0].term,
                     r.antecedents[1].variable, r.antecedents[1].term, r.consequent.variable, r.consequent.term);
}

}  // namespace

InferenceEngine::InferenceEngine(std::vector<LinguisticVariable> inputs, std::vector<LinguisticVariable> outputs,
                                 std::vector<FuzzyRule> rules, std::size_t samples)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), rules_(std::move(rules)), samples_(samples) {
  if (samples_ < kDefaultSamples) {
    throw ConfigError(fmt::format("engine needs at least {} output samples", kDefaultSamples));
  }
  std::set<std::string_view> names;
  for (const auto& v : inputs_) {
    if (!names.insert(v.name()).second) throw ConfigError(fmt::format("duplicate variable '{}'", v.name()));
  }
  for (const auto& v : outputs_) {
    if (!names.insert(v.name()).second) throw ConfigError(fmt::format("duplicate variable '{}'", v.name()));
  }

  for (const auto& r : rules_) {
    const auto& [lhs, rhs] = r.antecedents;
    if (lhs.variable == rhs.variable) {
      throw ConfigError(fmt::format("rule '{}': antecedents must use distinct variables", describe(r)));
    }
    for (const auto& ref : r.antecedents) {
      const auto* var = find_input(ref.variable);
      if (var == nullptr) {
        throw ConfigError(fmt::format("rule '{}': '{}' is not an input variable", describe(r), ref.variable));
      }
      if (var->term_index(ref.term) == kTermCount) {
        throw ConfigError(fmt::format("rule '{}': input '{}' has no term '{}'", describe(r), ref.variable, ref.term));
      }
    }
    const auto* out = find_output(r.consequent.variable);
    if (out == nullptr) {
      throw ConfigError(fmt::format("rule '{}': '{}' is not an output variable", describe(r), r.consequent.variable));
    }
    if (out->term_index(r.consequent.term) == kTermCount) {
      throw ConfigError(fmt::format("rule '{}': output '{}' has no term '{}'", describe(r), r.consequent.variable,
                                    r.consequent.term));
    }
  }
}

const LinguisticVariable* InferenceEngine::find_input(std::string_view name) const noexcept {
  return find_by_name(inputs_, name);
}

const LinguisticVariable* InferenceEngine::find_output(std::string_view name) const noexcept {
  return find_by_name(outputs_, name);
}

std::vector<AggregatedOutput> InferenceEngine::aggregate_all(const CrispInputs& crisp) const {
  Memberships memberships;
  for (const auto& v : inputs_) {
    const auto it = crisp.find(v.name());
    if (it == crisp.end()) throw InvocationError(fmt::format("missing crisp input '{}'", v.name()));
    memberships.emplace(v.name(), fuzzify(it->second, v));
  }

  std::vector<AggregatedOutput> curves;
  curves.reserve(outputs_.size());
  std::vector<RuleActivation> fired;
  for (const auto& out : outputs_) {
    fired.clear();
    for (const auto& r : rules_) {
      if (r.consequent.variable == out.name()) fired.push_back({r, activate(r, memberships)});
    }
    curves.push_back(aggregate(fired, out, samples_));
  }
  return curves;
}

CrispOutputs InferenceEngine::infer(const CrispInputs& crisp) const {
  CrispOutputs result;
  for (const auto& curve : aggregate_all(crisp)) {
    result.emplace(curve.variable, defuzz_centroid(curve));
  }
  return result;
}

}  // namespace iotavatar::fuzzy
