#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

namespace iotavatar::service {

class AvatarService;

/// HTTP + WebSocket front of the avatar service.
///
///   GET  /state             latest AvatarState JSON (503 before the first poll)
///   GET  /history?since=N   JSON array of records with seq > N
///   GET  /live              WebSocket; one text frame per recorded change
///   POST /env/command       forwarded to the device control node
///   GET  /health
///
/// Anything else is served from `static_root` when set. Broadcasting never
/// blocks: each subscriber has a bounded send queue and is disconnected when
/// it falls `max_pending` frames behind.
class ApiServer {
 public:
  struct CommandResult {
    int status = 200;
    std::string body;
  };

  struct Handlers {
    std::function<std::optional<std::string>()> state;
    std::function<std::string(std::uint64_t since)> history;
    /// Empty in viewer mode; POST /env/command then answers 404.
    std::function<CommandResult(const std::string& body)> command;
  };

  struct Options {
    std::string host = "127.0.0.1";
    int port = 0;
    std::size_t max_pending = 64;
    int threads = 2;
    std::filesystem::path static_root;
  };

  ApiServer(Handlers handlers, Options options);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds and starts the I/O threads. Throws std::runtime_error on bind failure.
  void start();
  void stop();

  int port() const noexcept;

  /// Queues `payload` for every connected /live subscriber and returns at once.
  void broadcast(std::string payload);

  std::size_t subscribers() const;
  std::uint64_t dropped_subscribers() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Forwards command bodies to `control_url` + /command. An unreachable control
/// node yields 502.
std::function<ApiServer::CommandResult(const std::string&)> make_command_proxy(std::string control_url);

/// Handlers reading `service`'s latest state and history.
ApiServer::Handlers make_handlers(AvatarService& service,
                                  std::function<ApiServer::CommandResult(const std::string&)> command = {});

}  // namespace iotavatar::service
