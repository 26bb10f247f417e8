#include "iotavatar/fuzzy/aggregate.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "iotavatar/error.hpp"

namespace iotavatar::fuzzy {
namespace {

struct ClippedTerm {
  TriangularMF mf;
  double level = 0.0;

  double operator()(double u) const noexcept { return std::min(level, mf(u)); }
};

double envelope(std::span<const ClippedTerm> terms, double u) noexcept {
  double mu = 0.0;
  for (const auto& t : terms) mu = std::max(mu, t(u));
  return mu;
}

}  // namespace

AggregatedOutput aggregate(std::span<const RuleActivation> rules, const LinguisticVariable& outvar,
                           std::size_t samples) {
  if (samples < kDefaultSamples) {
    throw InvocationError(fmt::format("aggregate needs at least {} samples, got {}", kDefaultSamples, samples));
  }

  // Rules sharing a consequent term collapse to one clip at their max strength.
  std::array<double, kTermCount> level{};
  for (const auto& ra : rules) {
    if (ra.rule.consequent.variable != outvar.name()) {
      throw ConfigError(fmt::format("rule consequent '{}' does not target output '{}'",
                                    ra.rule.consequent.variable, outvar.name()));
    }
    const auto idx = outvar.term_index(ra.rule.consequent.term);
    if (idx == kTermCount) {
      throw ConfigError(fmt::format("output '{}' has no term '{}'", outvar.name(), ra.rule.consequent.term));
    }
    const double s = std::isnan(ra.strength) ? 0.0 : std::clamp(ra.strength, 0.0, 1.0);
    level[idx] = std::max(level[idx], s);
  }

  std::vector<ClippedTerm> active;
  for (std::size_t i = 0; i < kTermCount; ++i) {
    if (level[i] > 0.0) active.push_back({outvar.terms()[i].mf, level[i]});
  }

  AggregatedOutput out;
  out.variable = outvar.name();
  out.umin = outvar.umin();
  out.umax = outvar.umax();
  out.samples.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    out.samples[i] = envelope(active, out.sample_u(i));
  }

  // Every clipped term is linear between consecutive candidates, so adding the
  // pairwise crossings inside each gap makes the polyline exact.
  std::vector<double> xs;
  xs.reserve(samples + 5 * active.size());
  for (std::size_t i = 0; i < samples; ++i) xs.push_back(out.sample_u(i));
  for (const auto& t : active) {
    const auto& m = t.mf;
    for (double x : {m.a, m.b, m.c, m.a + t.level * (m.b - m.a), m.c - t.level * (m.c - m.b)}) {
      if (x > out.umin && x < out.umax) xs.push_back(x);
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<double> crossings;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double x0 = xs[k];
    const double x1 = xs[k + 1];
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const double d0 = active[i](x0) - active[j](x0);
        const double d1 = active[i](x1) - active[j](x1);
        if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) {
          crossings.push_back(x0 + (x1 - x0) * d0 / (d0 - d1));
        }
      }
    }
  }
  if (!crossings.empty()) {
    xs.insert(xs.end(), crossings.begin(), crossings.end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  }

  out.knots.reserve(xs.size());
  for (double x : xs) out.knots.push_back({x, envelope(active, x)});
  return out;
}

std::optional<double> defuzz_centroid(const AggregatedOutput& agg) {
  // Exact moments of the piecewise-linear curve: trapezoid area, and the
  // closed-form first moment of a linear segment.
  double area = 0.0;
  double moment = 0.0;
  for (std::size_t k = 0; k + 1 < agg.knots.size(); ++k) {
    const auto& p = agg.knots[k];
    const auto& q = agg.knots[k + 1];
    const double h = q.u - p.u;
    area += 0.5 * h * (p.mu + q.mu);
    moment += h * (p.u * (2.0 * p.mu + q.mu) + q.u * (p.mu + 2.0 * q.mu)) / 6.0;
  }
  if (area < kZeroArea) return std::nullopt;
  return std::clamp(moment / area, agg.umin, agg.umax);
}

}  // namespace iotavatar::fuzzy
