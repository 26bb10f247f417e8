#include "iotavatar/fuzzy/membership.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "iotavatar/error.hpp"

namespace iotavatar::fuzzy {

void TriangularMF::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw ConfigError("triangular MF has a non-finite vertex");
  }
  if (a > b || b > c) {
    throw ConfigError(fmt::format("triangular MF ({}, {}, {}) violates a <= b <= c", a, b, c));
  }
}

double TriangularMF::operator()(double x) const noexcept {
  if (x < a || x > c) return 0.0;
  if (x == b) return 1.0;
  if (x < b) return (x - a) / (b - a);
  return (c - x) / (c - b);
}

double trimf(double x, const TriangularMF& mf) {
  mf.validate();
  return mf(x);
}

TermSet auto_partition3(double umin, double umax, const TermLabels& labels) {
  if (!(umin < umax)) {
    throw ConfigError(fmt::format("universe [{}, {}] is empty", umin, umax));
  }
  const double mid = 0.5 * (umin + umax);
  return TermSet{{
      {std::string(labels[0]), {umin, umin, mid}},
      {std::string(labels[1]), {umin, mid, umax}},
      {std::string(labels[2]), {mid, umax, umax}},
  }};
}

double MembershipVector::of(std::string_view label) const {
  for (std::size_t i = 0; i < kTermCount; ++i) {
    if (labels[i] == label) return degrees[i];
  }
  throw ConfigError(fmt::format("unknown term '{}'", label));
}

LinguisticVariable::LinguisticVariable(std::string name, double umin, double umax, TermSet terms)
    : name_(std::move(name)), umin_(umin), umax_(umax), terms_(std::move(terms)) {
  if (name_.empty()) throw ConfigError("linguistic variable needs a name");
  if (!(umin_ < umax_)) {
    throw ConfigError(fmt::format("variable '{}': universe [{}, {}] is empty", name_, umin_, umax_));
  }
  std::set<std::string_view> seen;
  for (const auto& t : terms_) {
    t.mf.validate();
    if (t.mf.a < umin_ || t.mf.c > umax_) {
      throw ConfigError(fmt::format("variable '{}': term '{}' leaves the universe", name_, t.label));
    }
    if (t.label.empty() || !seen.insert(t.label).second) {
      throw ConfigError(fmt::format("variable '{}': term label '{}' is empty or repeated", name_, t.label));
    }
  }
}

LinguisticVariable LinguisticVariable::auto_partitioned(std::string name, double umin, double umax,
                                                        const TermLabels& labels) {
  return LinguisticVariable(std::move(name), umin, umax, auto_partition3(umin, umax, labels));
}

std::size_t LinguisticVariable::term_index(std::string_view label) const noexcept {
  for (std::size_t i = 0; i < kTermCount; ++i) {
    if (terms_[i].label == label) return i;
  }
  return kTermCount;
}

const Term& LinguisticVariable::term(std::string_view label) const {
  const auto i = term_index(label);
  if (i == kTermCount) {
    throw ConfigError(fmt::format("variable '{}' has no term '{}'", name_, label));
  }
  return terms_[i];
}

double LinguisticVariable::clamp(double value) const noexcept {
  if (std::isnan(value)) return umin_;
  return std::clamp(value, umin_, umax_);
}

MembershipVector fuzzify(double value, const LinguisticVariable& var) {
  const double x = var.clamp(value);
  MembershipVector out;
  for (std::size_t i = 0; i < kTermCount; ++i) {
    out.labels[i] = var.terms()[i].label;
    out.degrees[i] = var.terms()[i].mf(x);
  }
  return out;
}

}  // namespace iotavatar::fuzzy
