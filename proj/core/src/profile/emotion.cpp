#include "iotavatar/profile/emotion.hpp"

#include <array>

namespace iotavatar::profile {
namespace {

constexpr std::array<std::string_view, 5> kLabels{"sad", "angry", "normal", "relaxation", "happy"};

}  // namespace

std::string_view label(Emotion e) noexcept { return kLabels[static_cast<std::size_t>(code(e) - 1)]; }

std::optional<Emotion> emotion_from_label(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kLabels.size(); ++i) {
    if (kLabels[i] == text) return static_cast<Emotion>(static_cast<int>(i) + 1);
  }
  return std::nullopt;
}

std::optional<Emotion> emotion_from_code(int c) noexcept {
  if (c < 1 || c > 5) return std::nullopt;
  return static_cast<Emotion>(c);
}

Band band_of(const std::optional<double>& score, double deadband) noexcept {
  if (!score) return Band::mid;
  if (*score > kAffectMidpoint + deadband) return Band::high;
  if (*score < kAffectMidpoint - deadband) return Band::low;
  return Band::mid;
}

Emotion classify(const AffectScore& affect, double deadband) noexcept {
  const Band valence = band_of(affect.valence, deadband);
  const Band arousal = band_of(affect.arousal, deadband);
  if (valence == Band::high && arousal == Band::low) return Emotion::relaxation;
  if (valence == Band::high && arousal == Band::high) return Emotion::happy;
  if (valence == Band::low && arousal == Band::high) return Emotion::angry;
  if (valence == Band::low && arousal == Band::low) return Emotion::sad;
  return Emotion::normal;
}

}  // namespace iotavatar::profile
