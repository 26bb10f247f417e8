#include "iotavatar/service/device_source.hpp"

#include <algorithm>
#include <cmath>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace iotavatar::service {
namespace {

std::unique_ptr<httplib::Client> make_client(const std::string& url, std::chrono::milliseconds timeout) {
  auto client = std::make_unique<httplib::Client>(url);
  client->set_connection_timeout(timeout);
  client->set_read_timeout(timeout);
  client->set_write_timeout(timeout);
  return client;
}

std::optional<nlohmann::json> get_json(httplib::Client& client, const char* path) {
  const auto res = client.Get(path);
  if (!res || res->status != 200) return std::nullopt;
  auto body = nlohmann::json::parse(res->body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) return std::nullopt;
  return body;
}

Timestamp reading_time(const nlohmann::json& body) {
  if (const auto it = body.find("ts"); it != body.end() && it->is_string()) {
    if (const auto ts = parse_iso8601(it->get<std::string>())) return *ts;
  }
  return now_ms();
}

}  // namespace

struct HttpDeviceSource::Impl {
  std::unique_ptr<httplib::Client> plant;
  std::unique_ptr<httplib::Client> people;
};

HttpDeviceSource::HttpDeviceSource(std::string plant_url, std::string people_url, std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>(Impl{make_client(plant_url, timeout), make_client(people_url, timeout)})) {}

HttpDeviceSource::~HttpDeviceSource() = default;

std::optional<PlantReading> HttpDeviceSource::read_plant() {
  const auto body = get_json(*impl_->plant, "/sensors");
  if (!body) return std::nullopt;
  const auto b = body->find("brightness");
  const auto m = body->find("moisture");
  if (b == body->end() || m == body->end() || !b->is_number() || !m->is_number()) {
    spdlog::warn("plant node sent an incomplete reading");
    return std::nullopt;
  }
  const double brightness = b->get<double>();
  const double moisture = m->get<double>();
  if (!std::isfinite(brightness) || !std::isfinite(moisture)) return std::nullopt;
  return PlantReading{std::clamp(brightness, universe::kBrightness.min, universe::kBrightness.max),
                      std::clamp(moisture, universe::kMoisture.min, universe::kMoisture.max), reading_time(*body)};
}

std::optional<PeopleReading> HttpDeviceSource::read_people() {
  const auto body = get_json(*impl_->people, "/people");
  if (!body) return std::nullopt;
  const auto c = body->find("count");
  if (c == body->end() || !c->is_number_integer()) {
    spdlog::warn("people node sent an incomplete reading");
    return std::nullopt;
  }
  return PeopleReading{std::clamp(c->get<int>(), 0, static_cast<int>(universe::kPeople.max)), reading_time(*body)};
}

LocalDeviceSource::LocalDeviceSource(std::function<SensorSnapshot()> read) : read_(std::move(read)) {}

std::optional<PlantReading> LocalDeviceSource::read_plant() {
  if (!plant_online_) return std::nullopt;
  const auto s = read_();
  return PlantReading{s.brightness, s.moisture, s.ts};
}

std::optional<PeopleReading> LocalDeviceSource::read_people() {
  if (!people_online_) return std::nullopt;
  const auto s = read_();
  return PeopleReading{s.people, s.ts};
}

}  // namespace iotavatar::service
