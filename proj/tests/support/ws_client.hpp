#pragma once

// Minimal blocking WebSocket client for tests: a reader thread collects text
// frames until the server closes or close() is called.

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace testsupport {

class WsClient {
 public:
  WsClient(int port, const std::string& path = "/live") : ws_(ioc_) {
    namespace net = boost::asio;
    net::ip::tcp::resolver resolver(ioc_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1:" + std::to_string(port), path);
    reader_ = std::thread([this] { read_loop(); });
  }

  ~WsClient() { close(); }

  void close() {
    {
      std::lock_guard lock(mutex_);
      if (closing_) return;
      closing_ = true;
    }
    boost::system::error_code ec;
    ws_.next_layer().shutdown(boost::asio::ip::tcp::socket::shutdown_both, ec);
    ws_.next_layer().close(ec);
    if (reader_.joinable()) reader_.join();
  }

  std::vector<std::string> messages() const {
    std::lock_guard lock(mutex_);
    return messages_;
  }

  std::size_t count() const {
    std::lock_guard lock(mutex_);
    return messages_.size();
  }

  bool closed_by_server() const {
    std::lock_guard lock(mutex_);
    return ended_;
  }

  /// Waits until at least `n` frames arrived or `timeout` elapsed.
  bool wait_for(std::size_t n, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    return cv_.wait_for(lock, timeout, [&] { return messages_.size() >= n || ended_; }) && messages_.size() >= n;
  }

 private:
  void read_loop() {
    for (;;) {
      boost::beast::flat_buffer buf;
      boost::system::error_code ec;
      ws_.read(buf, ec);
      std::lock_guard lock(mutex_);
      if (ec) {
        ended_ = true;
        cv_.notify_all();
        return;
      }
      messages_.push_back(boost::beast::buffers_to_string(buf.data()));
      cv_.notify_all();
    }
  }

  boost::asio::io_context ioc_;
  boost::beast::websocket::stream<boost::asio::ip::tcp::socket> ws_;
  std::thread reader_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<std::string> messages_;
  bool closing_ = false;
  bool ended_ = false;
};

}  // namespace testsupport
