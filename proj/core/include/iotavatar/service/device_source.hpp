#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "iotavatar/service/avatar_state.hpp"

namespace iotavatar::service {

/// Where the poller gets readings. An empty optional means the device could
/// not be reached or answered with garbage.
class DeviceSource {
 public:
  virtual ~DeviceSource() = default;
  virtual std::optional<PlantReading> read_plant() = 0;
  virtual std::optional<PeopleReading> read_people() = 0;
};

/// Polls the plant node's GET /sensors and the people node's GET /people.
/// Not thread-safe; owned by the polling thread.
class HttpDeviceSource final : public DeviceSource {
 public:
  HttpDeviceSource(std::string plant_url, std::string people_url,
                   std::chrono::milliseconds timeout = std::chrono::milliseconds(500));
  ~HttpDeviceSource() override;

  std::optional<PlantReading> read_plant() override;
  std::optional<PeopleReading> read_people() override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Reads an in-process snapshot; replay and tests use it.
class LocalDeviceSource final : public DeviceSource {
 public:
  explicit LocalDeviceSource(std::function<SensorSnapshot()> read);

  std::optional<PlantReading> read_plant() override;
  std::optional<PeopleReading> read_people() override;

  void set_plant_online(bool online) noexcept { plant_online_ = online; }
  void set_people_online(bool online) noexcept { people_online_ = online; }

 private:
  std::function<SensorSnapshot()> read_;
  bool plant_online_ = true;
  bool people_online_ = true;
};

}  // namespace iotavatar::service
