#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iotavatar/fuzzy/aggregate.hpp"
#include "iotavatar/fuzzy/membership.hpp"
#include "iotavatar/fuzzy/rule.hpp"

namespace iotavatar::fuzzy {

using CrispInputs = std::map<std::string, double, std::less<>>;
using CrispOutputs = std::map<std::string, std::optional<double>, std::less<>>;

/// Mamdani engine: fuzzify, min-AND activation, max aggregation, centroid.
///
/// Immutable after construction; `infer` is a pure function and may be called
/// from any number of threads.
class InferenceEngine {
 public:
  /// Validates every rule: two distinct input antecedents, a consequent on an
  /// output variable, and known term labels. Throws ConfigError otherwise.
  InferenceEngine(std::vector<LinguisticVariable> inputs, std::vector<LinguisticVariable> outputs,
                  std::vector<FuzzyRule> rules, std::size_t samples = kDefaultSamples);

  /// Throws InvocationError when an input variable has no crisp value.
  /// Extra entries in `crisp` are ignored.
  CrispOutputs infer(const CrispInputs& crisp) const;

  /// Aggregated curve per output for the given inputs, before defuzzification.
  std::vector<AggregatedOutput> aggregate_all(const CrispInputs& crisp) const;

  std::span<const LinguisticVariable> inputs() const noexcept { return inputs_; }
  std::span<const LinguisticVariable> outputs() const noexcept { return outputs_; }
  std::span<const FuzzyRule> rules() const noexcept { return rules_; }

  const LinguisticVariable* find_input(std::string_view name) const noexcept;
  const LinguisticVariable* find_output(std::string_view name) const noexcept;

 private:
  std::vector<LinguisticVariable> inputs_;
  std::vector<LinguisticVariable> outputs_;
  std::vector<FuzzyRule> rules_;
  std::size_t samples_;
};

}  // namespace iotavatar::fuzzy
