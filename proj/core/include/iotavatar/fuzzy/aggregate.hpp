#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iotavatar/fuzzy/membership.hpp"
#include "iotavatar/fuzzy/rule.hpp"

namespace iotavatar::fuzzy {

inline constexpr std::size_t kDefaultSamples = 301;

struct RuleActivation {
  FuzzyRule rule;
  double strength = 0.0;
};

struct CurvePoint {
  double u = 0.0;
  double mu = 0.0;
};

/// Max-of-clipped-consequents curve for one output variable.
///
/// `samples` holds the curve on N equally spaced points over the universe.
/// `knots` is the same curve as an exact piecewise-linear polyline: the uniform
/// grid merged with every breakpoint (triangle corners, clip corners, crossings
/// between clipped terms), sorted by `u`.
struct AggregatedOutput {
  std::string variable;
  double umin = 0.0;
  double umax = 0.0;
  std::vector<double> samples;
  std::vector<CurvePoint> knots;

  double sample_u(std::size_t i) const noexcept {
    return umin + (umax - umin) * static_cast<double>(i) / static_cast<double>(samples.size() - 1);
  }
};

/// Mamdani aggregation: clip each consequent at its rule's strength, pointwise
/// max across rules. Strengths are clamped to [0, 1].
/// Throws ConfigError for a rule that targets another variable or an unknown
/// term, InvocationError for fewer than kDefaultSamples samples.
AggregatedOutput aggregate(std::span<const RuleActivation> rules, const LinguisticVariable& outvar,
                           std::size_t samples = kDefaultSamples);

inline constexpr double kZeroArea = 1e-12;

/// Centre of mass of the aggregated curve, or nullopt when its area is below
/// kZeroArea.
std::optional<double> defuzz_centroid(const AggregatedOutput& agg);

}  // namespace iotavatar::fuzzy
