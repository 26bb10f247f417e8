#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iotavatar/fuzzy/engine.hpp"
#include "iotavatar/profile/emotion.hpp"
#include "iotavatar/sensor_snapshot.hpp"

namespace iotavatar::profile {

/// Matrix axes, named the way the rules talk about them.
enum class Input { soil, light, people };
enum class Output { arousal, valence };
enum class Level { low, medium, high };

std::string_view axis_name(Input in) noexcept;
std::string_view output_name(Output out) noexcept;
/// Fuzzy variable backing an axis: soil -> moisture, light -> brightness.
std::string_view variable_name(Input in) noexcept;
char level_letter(Level l) noexcept;

/// 3x3 consequent grid; rows follow `row`'s terms, columns `column`'s, both
/// in Poor/Average/Good order.
struct RuleMatrix {
  Output output = Output::arousal;
  Input row = Input::soil;
  Input column = Input::light;
  std::array<std::array<Level, 3>, 3> cells{};

  friend bool operator==(const RuleMatrix&, const RuleMatrix&) = default;
};

inline constexpr std::size_t kMatrixCount = 6;
using RuleMatrices = std::array<RuleMatrix, kMatrixCount>;

/// Position of (output, row, column) in the canonical matrix order, or nullopt
/// for a pairing outside soil x light, people x light, people x soil.
std::optional<std::size_t> matrix_slot(Output out, Input row, Input column) noexcept;

/// Built-in matrices in canonical order: arousal (soil x light, people x light,
/// people x soil), then valence in the same pair order.
const RuleMatrices& default_matrices();

/// Raw moisture orientation. `dry_high` sensors are mirrored across the
/// universe before fuzzification.
enum class MoisturePolarity { wet_high, dry_high };

/// Sensor readings rescaled to 0..100 for display.
struct Percentages {
  double brightness = 0.0;
  double moisture = 0.0;
  double people = 0.0;
};

/// The plant's fuzzy configuration. Immutable once built.
class PlantProfile {
 public:
  explicit PlantProfile(RuleMatrices matrices = default_matrices(), double deadband = kDefaultDeadband,
                        MoisturePolarity polarity = MoisturePolarity::wet_high);

  const fuzzy::InferenceEngine& engine() const noexcept { return engine_; }
  const RuleMatrices& matrices() const noexcept { return matrices_; }
  const RuleMatrix& matrix(Output out, Input row, Input column) const;
  double deadband() const noexcept { return deadband_; }
  MoisturePolarity moisture_polarity() const noexcept { return polarity_; }

  /// Wetness on the moisture universe after applying the polarity flag.
  double wetness(double raw_moisture) const noexcept;

  AffectScore score_affect(const SensorSnapshot& snapshot) const;
  Emotion classify(const AffectScore& affect) const noexcept;
  Percentages percentages(const SensorSnapshot& snapshot) const;

  friend bool operator==(const PlantProfile& a, const PlantProfile& b) {
    return a.matrices_ == b.matrices_ && a.deadband_ == b.deadband_ && a.polarity_ == b.polarity_;
  }

 private:
  RuleMatrices matrices_;
  double deadband_;
  MoisturePolarity polarity_;
  fuzzy::InferenceEngine engine_;
};

/// The 54 rules encoded by six matrices.
std::vector<fuzzy::FuzzyRule> expand_rules(std::span<const RuleMatrix> matrices);

/// Fuzzy variables with their auto-partitioned terms: brightness [0,780],
/// moisture [1800,3100], people [0,4]; arousal and valence [0,300].
std::vector<fuzzy::LinguisticVariable> input_variables();
std::vector<fuzzy::LinguisticVariable> output_variables();

/// clamp((v - umin) / (umax - umin)) * 100.
double normalize(double value, const fuzzy::LinguisticVariable& var) noexcept;

/// Parses profile text. Empty text yields the default profile. Throws
/// ConfigError naming the offending line and cell.
PlantProfile load_profile(std::string_view text);
PlantProfile load_profile_file(const std::filesystem::path& path);

/// Profile as config text, full grids for all six matrices.
std::string render_profile(const PlantProfile& profile);

}  // namespace iotavatar::profile
