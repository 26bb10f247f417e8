#include "iotavatar/service/avatar_state.hpp"

#include <cmath>

#include "iotavatar/error.hpp"

namespace iotavatar::service {
namespace {

std::optional<long long> rounded(const std::optional<double>& v) {
  if (!v) return std::nullopt;
  return std::llround(*v);
}

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::optional<double> opt_double(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::optional<SensorSnapshot> AvatarState::snapshot() const {
  if (!plant || !people) return std::nullopt;
  return SensorSnapshot{ts, plant->brightness, plant->moisture, people->count};
}

bool same_presentation(const AvatarState& a, const AvatarState& b) noexcept {
  return a.emotion == b.emotion && a.stale() == b.stale() && rounded(a.affect.arousal) == rounded(b.affect.arousal) &&
         rounded(a.affect.valence) == rounded(b.affect.valence);
}

nlohmann::json to_json(const AvatarState& s, std::uint64_t seq, const profile::PlantProfile& profile) {
  const auto inputs = profile.engine().inputs();
  nlohmann::json sensors = {{"brightness", nullptr}, {"moisture", nullptr}, {"people", nullptr}};
  nlohmann::json percent = sensors;
  nlohmann::json stale_devices = nlohmann::json::array();
  if (s.plant) {
    sensors["brightness"] = s.plant->brightness;
    sensors["moisture"] = s.plant->moisture;
    percent["brightness"] = profile::normalize(s.plant->brightness, inputs[0]);
    percent["moisture"] = profile::normalize(profile.wetness(s.plant->moisture), inputs[1]);
    sensors["plant_ts"] = format_iso8601(s.plant->ts);
  }
  if (s.people) {
    sensors["people"] = s.people->count;
    percent["people"] = profile::normalize(s.people->count, inputs[2]);
    sensors["people_ts"] = format_iso8601(s.people->ts);
  }
  if (s.plant_stale) stale_devices.push_back("plant");
  if (s.people_stale) stale_devices.push_back("people");
  return {
      {"seq", seq},
      {"ts", format_iso8601(s.ts)},
      {"sensors", sensors},
      {"percent", percent},
      {"affect", {{"arousal", opt(s.affect.arousal)}, {"valence", opt(s.affect.valence)}}},
      {"emotion", {{"label", profile::label(s.emotion)}, {"code", profile::code(s.emotion)}}},
      {"stale", s.stale()},
      {"stale_devices", stale_devices},
  };
}

HistoryRecord record_from_json(const nlohmann::json& j) {
  HistoryRecord r;
  r.seq = j.at("seq").get<std::uint64_t>();
  auto& s = r.state;
  auto parse_ts = [](const nlohmann::json& v) {
    const auto ts = parse_iso8601(v.get<std::string>());
    if (!ts) throw ConfigError("history record has a malformed timestamp");
    return *ts;
  };
  s.ts = parse_ts(j.at("ts"));
  const auto& sensors = j.at("sensors");
  if (!sensors.at("brightness").is_null()) {
    s.plant = PlantReading{sensors.at("brightness").get<double>(), sensors.at("moisture").get<double>(),
                           sensors.contains("plant_ts") ? parse_ts(sensors.at("plant_ts")) : s.ts};
  }
  if (!sensors.at("people").is_null()) {
    s.people = PeopleReading{sensors.at("people").get<int>(),
                             sensors.contains("people_ts") ? parse_ts(sensors.at("people_ts")) : s.ts};
  }
  s.affect.arousal = opt_double(j.at("affect").at("arousal"));
  s.affect.valence = opt_double(j.at("affect").at("valence"));
  const auto e = profile::emotion_from_code(j.at("emotion").at("code").get<int>());
  if (!e) throw ConfigError("history record has an unknown emotion code");
  s.emotion = *e;
  for (const auto& d : j.at("stale_devices")) {
    const auto name = d.get<std::string>();
    if (name == "plant") s.plant_stale = true;
    if (name == "people") s.people_stale = true;
  }
  return r;
}

}  // namespace iotavatar::service
