#include "iotavatar/profile/profile.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "iotavatar/error.hpp"

namespace iotavatar::profile {
namespace {

using fuzzy::LinguisticVariable;

constexpr std::array<std::pair<Input, Input>, 3> kPairs{{
    {Input::soil, Input::light},
    {Input::people, Input::light},
    {Input::people, Input::soil},
}};

RuleMatrix grid(Output out, Input row, Input column, std::string_view rows) {
  RuleMatrix m{out, row, column, {}};
  std::size_t k = 0;
  for (char ch : rows) {
    if (ch == ' ' || ch == '/') continue;
    const Level l = ch == 'L' ? Level::low : ch == 'M' ? Level::medium : Level::high;
    m.cells[k / 3][k % 3] = l;
    ++k;
  }
  return m;
}

std::string_view level_label(Level l) noexcept {
  return fuzzy::kLevelLabels[static_cast<std::size_t>(l)];
}

}  // namespace

std::string_view axis_name(Input in) noexcept {
  switch (in) {
    case Input::soil: return "soil";
    case Input::light: return "light";
    case Input::people: return "people";
  }
  return "?";
}

std::string_view output_name(Output out) noexcept { return out == Output::arousal ? "arousal" : "valence"; }

std::string_view variable_name(Input in) noexcept {
  switch (in) {
    case Input::soil: return "moisture";
    case Input::light: return "brightness";
    case Input::people: return "people";
  }
  return "?";
}

char level_letter(Level l) noexcept { return "LMH"[static_cast<std::size_t>(l)]; }

std::optional<std::size_t> matrix_slot(Output out, Input row, Input column) noexcept {
  for (std::size_t i = 0; i < kPairs.size(); ++i) {
    if (kPairs[i].first == row && kPairs[i].second == column) {
      return (out == Output::arousal ? 0 : kPairs.size()) + i;
    }
  }
  return std::nullopt;
}

const RuleMatrices& default_matrices() {
  static const RuleMatrices kDefaults{
      grid(Output::arousal, Input::soil, Input::light, "LMM/LLL/HMH"),
      grid(Output::arousal, Input::people, Input::light, "LLL/LMM/HHH"),
      grid(Output::arousal, Input::people, Input::soil, "LLM/MLM/HMH"),
      grid(Output::valence, Input::soil, Input::light, "LLM/MHH/LMM"),
      grid(Output::valence, Input::people, Input::light, "LMH/LMH/MMH"),
      grid(Output::valence, Input::people, Input::soil, "LHM/LHM/LML"),
  };
  return kDefaults;
}

std::vector<LinguisticVariable> input_variables() {
  using namespace universe;
  return {
      LinguisticVariable::auto_partitioned("brightness", kBrightness.min, kBrightness.max),
      LinguisticVariable::auto_partitioned("moisture", kMoisture.min, kMoisture.max),
      LinguisticVariable::auto_partitioned("people", kPeople.min, kPeople.max),
  };
}

std::vector<LinguisticVariable> output_variables() {
  using namespace universe;
  return {
      LinguisticVariable::auto_partitioned("arousal", kAffect.min, kAffect.max, fuzzy::kLevelLabels),
      LinguisticVariable::auto_partitioned("valence", kAffect.min, kAffect.max, fuzzy::kLevelLabels),
  };
}

std::vector<fuzzy::FuzzyRule> expand_rules(std::span<const RuleMatrix> matrices) {
  std::vector<fuzzy::FuzzyRule> rules;
  rules.reserve(matrices.size() * 9);
  for (const auto& m : matrices) {
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 3; ++c) {
        rules.push_back({
            {{{std::string(variable_name(m.row)), std::string(fuzzy::kQualityLabels[r])},
              {std::string(variable_name(m.column)), std::string(fuzzy::kQualityLabels[c])}}},
            {std::string(output_name(m.output)), std::string(level_label(m.cells[r][c]))},
        });
      }
    }
  }
  return rules;
}

double normalize(double value, const LinguisticVariable& var) noexcept {
  return (var.clamp(value) - var.umin()) / (var.umax() - var.umin()) * 100.0;
}

PlantProfile::PlantProfile(RuleMatrices matrices, double deadband, MoisturePolarity polarity)
    : matrices_(matrices),
      deadband_(deadband),
      polarity_(polarity),
      engine_(input_variables(), output_variables(), expand_rules(matrices_)) {
  if (!(deadband_ >= 0.0 && deadband_ < kAffectMidpoint)) {
    throw ConfigError(fmt::format("deadband {} must lie in [0, {})", deadband_, kAffectMidpoint));
  }
  for (std::size_t i = 0; i < matrices_.size(); ++i) {
    const auto& m = matrices_[i];
    const auto slot = matrix_slot(m.output, m.row, m.column);
    if (!slot || *slot != i) {
      throw ConfigError(fmt::format("matrix {} {} x {} is out of place", output_name(m.output), axis_name(m.row),
                                    axis_name(m.column)));
    }
  }
}

const RuleMatrix& PlantProfile::matrix(Output out, Input row, Input column) const {
  const auto slot = matrix_slot(out, row, column);
  if (!slot) {
    throw ConfigError(fmt::format("no {} matrix for {} x {}", output_name(out), axis_name(row), axis_name(column)));
  }
  return matrices_[*slot];
}

double PlantProfile::wetness(double raw) const noexcept {
  if (polarity_ == MoisturePolarity::wet_high) return raw;
  return universe::kMoisture.min + universe::kMoisture.max - raw;
}

AffectScore PlantProfile::score_affect(const SensorSnapshot& s) const {
  const auto out = engine_.infer({
      {"brightness", s.brightness},
      {"moisture", wetness(s.moisture)},
      {"people", static_cast<double>(s.people)},
  });
  return {out.at("arousal"), out.at("valence")};
}

Emotion PlantProfile::classify(const AffectScore& affect) const noexcept {
  return profile::classify(affect, deadband_);
}

Percentages PlantProfile::percentages(const SensorSnapshot& s) const {
  const auto in = engine_.inputs();
  return {normalize(s.brightness, in[0]), normalize(wetness(s.moisture), in[1]),
          normalize(static_cast<double>(s.people), in[2])};
}

std::string render_profile(const PlantProfile& p) {
  std::string out;
  out += "[settings]\n";
  out += fmt::format("deadband = {}\n", p.deadband());
  out += fmt::format("moisture_polarity = {}\n",
                     p.moisture_polarity() == MoisturePolarity::wet_high ? "wet_high" : "dry_high");
  out += "base = none\n";
  for (const auto& m : p.matrices()) {
    out += fmt::format("\n# rows: {} Poor/Average/Good, columns: {} Poor/Average/Good\n", axis_name(m.row),
                       axis_name(m.column));
    out += fmt::format("[{} {} {}]\n", output_name(m.output), axis_name(m.row), axis_name(m.column));
    for (const auto& row : m.cells) {
      out += fmt::format("{} {} {}\n", level_letter(row[0]), level_letter(row[1]), level_letter(row[2]));
    }
  }
  return out;
}

PlantProfile load_profile_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read profile '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return load_profile(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace iotavatar::profile
