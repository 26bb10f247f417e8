#pragma once

#include <array>
#include <string>
#include <string_view>

namespace iotavatar::fuzzy {

/// Triangle with feet `a`, `c` and peak `b` (a <= b <= c). Shoulders a == b or
/// b == c are allowed and reach 1 at the shared endpoint.
struct TriangularMF {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  /// Throws ConfigError unless a <= b <= c and all three are finite.
  void validate() const;

  /// Unchecked evaluation; callers hold a validated MF.
  double operator()(double x) const noexcept;

  friend bool operator==(const TriangularMF&, const TriangularMF&) = default;
};

/// Checked evaluation, throws ConfigError for an invalid MF.
double trimf(double x, const TriangularMF& mf);

inline constexpr std::size_t kTermCount = 3;

using TermLabels = std::array<std::string_view, kTermCount>;
inline constexpr TermLabels kQualityLabels{"Poor", "Average", "Good"};
inline constexpr TermLabels kLevelLabels{"Low", "Medium", "High"};

struct Term {
  std::string label;
  TriangularMF mf;
};

using TermSet = std::array<Term, kTermCount>;

/// Three equally spaced triangles over [umin, umax]: left shoulder, centred
/// peak, right shoulder. Memberships sum to 1 everywhere on the universe.
TermSet auto_partition3(double umin, double umax, const TermLabels& labels = kQualityLabels);

/// Degrees of one crisp value in each of a variable's terms.
struct MembershipVector {
  std::array<std::string, kTermCount> labels;
  std::array<double, kTermCount> degrees{};

  /// Degree for `label`; throws ConfigError for a label the variable lacks.
  double of(std::string_view label) const;
};

class LinguisticVariable {
 public:
  LinguisticVariable(std::string name, double umin, double umax, TermSet terms);

  static LinguisticVariable auto_partitioned(std::string name, double umin, double umax,
                                             const TermLabels& labels = kQualityLabels);

  const std::string& name() const noexcept { return name_; }
  double umin() const noexcept { return umin_; }
  double umax() const noexcept { return umax_; }
  const TermSet& terms() const noexcept { return terms_; }

  /// Index of `label`, or kTermCount when absent.
  std::size_t term_index(std::string_view label) const noexcept;
  const Term& term(std::string_view label) const;

  double clamp(double value) const noexcept;

 private:
  std::string name_;
  double umin_;
  double umax_;
  TermSet terms_;
};

/// Clamps `value` into the universe, then evaluates every term.
MembershipVector fuzzify(double value, const LinguisticVariable& var);

}  // namespace iotavatar::fuzzy
