#pragma once

#include <optional>
#include <string_view>

namespace iotavatar::profile {

/// Avatar emotion with its fixed state code (1..5).
enum class Emotion : int {
  sad = 1,
  angry = 2,
  normal = 3,
  relaxation = 4,
  happy = 5,
};

inline constexpr int code(Emotion e) noexcept { return static_cast<int>(e); }
std::string_view label(Emotion e) noexcept;
std::optional<Emotion> emotion_from_label(std::string_view label) noexcept;
std::optional<Emotion> emotion_from_code(int code) noexcept;

/// Defuzzified affect; an empty dimension had no rule coverage or no input.
struct AffectScore {
  std::optional<double> arousal;
  std::optional<double> valence;

  friend bool operator==(const AffectScore&, const AffectScore&) = default;
};

inline constexpr double kAffectMidpoint = 150.0;
inline constexpr double kDefaultDeadband = 15.0;

enum class Band { low, mid, high };

/// High above 150 + deadband, Low below 150 - deadband, mid otherwise and when undefined.
Band band_of(const std::optional<double>& score, double deadband = kDefaultDeadband) noexcept;

/// (valence, arousal): (High, Low) relaxation, (High, High) happy,
/// (Low, High) angry, (Low, Low) sad, anything touching the mid band normal.
Emotion classify(const AffectScore& affect, double deadband = kDefaultDeadband) noexcept;

}  // namespace iotavatar::profile
