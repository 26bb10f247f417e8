#include "iotavatar/service/api_server.hpp"

#include <atomic>
#include <charconv>
#include <deque>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_set>
#include <vector>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "iotavatar/service/avatar_service.hpp"

namespace iotavatar::service {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

class WsSession;

/// Registry of live subscribers.
class Hub {
 public:
  void join(WsSession* s) {
    std::lock_guard lock(mutex_);
    sessions_.insert(s);
  }

  void leave(WsSession* s) {
    std::lock_guard lock(mutex_);
    sessions_.erase(s);
  }

  std::vector<std::weak_ptr<WsSession>> snapshot() const;

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
  }

  std::atomic<std::uint64_t> dropped{0};

 private:
  mutable std::mutex mutex_;
  std::unordered_set<WsSession*> sessions_;
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Hub& hub, std::size_t max_pending)
      : ws_(std::move(socket)), hub_(hub), max_pending_(max_pending) {}

  ~WsSession() { hub_.leave(this); }

  void run(Request req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  void send(std::shared_ptr<const std::string> msg) {
    net::post(ws_.get_executor(), [self = shared_from_this(), msg = std::move(msg)] { self->enqueue(msg); });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    hub_.join(this);
    do_read();
  }

  // Inbound frames are ignored; reading keeps close/ping handling alive.
  void do_read() { ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      hub_.leave(this);
      return;
    }
    buffer_.consume(buffer_.size());
    do_read();
  }

  void enqueue(std::shared_ptr<const std::string> msg) {
    if (dropped_) return;
    if (queue_.size() >= max_pending_) {
      drop();
      return;
    }
    queue_.push_back(std::move(msg));
    if (queue_.size() == 1) do_write();
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      hub_.leave(this);
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) do_write();
  }

  void drop() {
    dropped_ = true;
    queue_.clear();
    hub_.leave(this);
    ++hub_.dropped;
    spdlog::warn("dropping slow /live subscriber");
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ignored);
    beast::get_lowest_layer(ws_).close();
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  Hub& hub_;
  std::size_t max_pending_;
  bool dropped_ = false;
};

std::vector<std::weak_ptr<WsSession>> Hub::snapshot() const {
  std::lock_guard lock(mutex_);
  std::vector<std::weak_ptr<WsSession>> out;
  out.reserve(sessions_.size());
  for (auto* s : sessions_) out.push_back(s->weak_from_this());
  return out;
}

std::string_view mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

struct Target {
  std::string path;
  std::string query;
};

Target split_target(std::string_view target) {
  const auto q = target.find('?');
  if (q == std::string_view::npos) return {std::string(target), {}};
  return {std::string(target.substr(0, q)), std::string(target.substr(q + 1))};
}

std::optional<std::string_view> query_param(std::string_view query, std::string_view key) {
  while (!query.empty()) {
    const auto amp = query.find('&');
    const auto pair = query.substr(0, amp);
    const auto eq = pair.find('=');
    if (pair.substr(0, eq) == key) return eq == std::string_view::npos ? std::string_view{} : pair.substr(eq + 1);
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  return std::nullopt;
}

}  // namespace

namespace {

std::string_view sv(beast::string_view s) { return {s.data(), s.size()}; }

/// Routing state shared by every HTTP session.
struct ServerCore {
  ApiServer::Handlers handlers;
  ApiServer::Options options;
  Hub hub;

  Response handle(const Request& req) const;
};

}  // namespace

struct ApiServer::Impl {
  Impl(Handlers h, Options o) : core{std::move(h), std::move(o), {}} {}

  void accept();

  ServerCore core;
  net::io_context ioc;
  std::optional<tcp::acceptor> acceptor;
  std::vector<std::thread> threads;
  int port = 0;
};

namespace {

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, ServerCore& server) : stream_(std::move(socket)), server_(server) {}

  void run() { net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::do_read, shared_from_this())); }

 private:
  void do_read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;

    if (websocket::is_upgrade(req_) && split_target(sv(req_.target())).path == "/live") {
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), server_.hub, server_.options.max_pending)
          ->run(std::move(req_));
      return;
    }

    res_ = std::make_shared<Response>(server_.handle(req_));
    http::async_write(stream_, *res_,
                      beast::bind_front_handler(&HttpSession::on_write, shared_from_this(), res_->need_eof()));
  }

  void on_write(bool close, beast::error_code ec, std::size_t) {
    if (ec) return;
    if (close) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    res_.reset();
    do_read();
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  Request req_;
  std::shared_ptr<Response> res_;
  ServerCore& server_;
};

}  // namespace

Response ServerCore::handle(const Request& req) const {
  auto make = [&](http::status status, std::string body, std::string_view type = "application/json") {
    Response res{status, req.version()};
    res.set(http::field::content_type, std::string(type));
    res.set(http::field::access_control_allow_origin, "*");
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  };
  auto error = [&](http::status status, std::string_view what) {
    return make(status, nlohmann::json{{"error", what}}.dump());
  };

  const auto [path, query] = split_target(sv(req.target()));

  if (req.method() == http::verb::options) {
    auto res = make(http::status::no_content, "");
    res.set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
    res.set(http::field::access_control_allow_headers, "Content-Type");
    return res;
  }

  if (path == "/state" && req.method() == http::verb::get) {
    const auto body = handlers.state ? handlers.state() : std::nullopt;
    if (!body) return error(http::status::service_unavailable, "no state yet");
    return make(http::status::ok, *body);
  }
  if (path == "/history" && req.method() == http::verb::get) {
    std::uint64_t since = 0;
    if (const auto v = query_param(query, "since"); v && !v->empty()) {
      const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), since);
      if (ec != std::errc{} || ptr != v->data() + v->size()) {
        return error(http::status::bad_request, "since must be a non-negative integer");
      }
    }
    return make(http::status::ok, handlers.history ? handlers.history(since) : "[]");
  }
  if (path == "/live") return error(http::status::upgrade_required, "/live is a WebSocket endpoint");
  if (path == "/env/command" && req.method() == http::verb::post) {
    if (!handlers.command) return error(http::status::not_found, "steering is disabled");
    const auto result = handlers.command(req.body());
    return make(static_cast<http::status>(result.status), result.body);
  }
  if (path == "/health") return make(http::status::ok, R"({"ok":true})");

  if (!options.static_root.empty() && req.method() == http::verb::get) {
    auto rel = std::filesystem::path(path == "/" ? "index.html" : path.substr(1)).lexically_normal();
    if (!rel.empty() && rel.begin()->string() != ".." && !rel.is_absolute()) {
      const auto file = options.static_root / rel;
      std::ifstream in(file, std::ios::binary);
      if (in) {
        std::ostringstream body;
        body << in.rdbuf();
        return make(http::status::ok, body.str(), mime_type(file));
      }
    }
  }
  return error(http::status::not_found, "no such endpoint");
}

void ApiServer::Impl::accept() {
  acceptor->async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (!ec) std::make_shared<HttpSession>(std::move(socket), core)->run();
    if (acceptor->is_open()) accept();
  });
}

ApiServer::ApiServer(Handlers handlers, Options options)
    : impl_(std::make_unique<Impl>(std::move(handlers), std::move(options))) {}

ApiServer::~ApiServer() { stop(); }

void ApiServer::start() {
  if (!impl_->threads.empty()) return;
  beast::error_code ec;
  const auto address = net::ip::make_address(impl_->core.options.host, ec);
  if (ec) throw std::runtime_error(fmt::format("bad listen address '{}'", impl_->core.options.host));
  const tcp::endpoint endpoint{address, static_cast<unsigned short>(impl_->core.options.port)};

  auto& acc = impl_->acceptor.emplace(impl_->ioc);
  acc.open(endpoint.protocol(), ec);
  if (!ec) acc.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) acc.bind(endpoint, ec);
  if (!ec) acc.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    impl_->acceptor.reset();
    throw std::runtime_error(fmt::format("cannot listen on {}:{}: {}", impl_->core.options.host, impl_->core.options.port,
                                         ec.message()));
  }
  impl_->port = acc.local_endpoint().port();
  impl_->accept();
  const int n = std::max(1, impl_->core.options.threads);
  for (int i = 0; i < n; ++i) impl_->threads.emplace_back([this] { impl_->ioc.run(); });
}

void ApiServer::stop() {
  if (!impl_ || impl_->threads.empty()) return;
  net::post(impl_->ioc, [this] {
    beast::error_code ignored;
    impl_->acceptor->close(ignored);
  });
  impl_->ioc.stop();
  for (auto& t : impl_->threads) t.join();
  impl_->threads.clear();
}

int ApiServer::port() const noexcept { return impl_->port; }

void ApiServer::broadcast(std::string payload) {
  auto msg = std::make_shared<const std::string>(std::move(payload));
  for (const auto& weak : impl_->core.hub.snapshot()) {
    if (auto s = weak.lock()) s->send(msg);
  }
}

std::size_t ApiServer::subscribers() const { return impl_->core.hub.size(); }

std::uint64_t ApiServer::dropped_subscribers() const { return impl_->core.hub.dropped.load(); }

std::function<ApiServer::CommandResult(const std::string&)> make_command_proxy(std::string control_url) {
  auto client = std::make_shared<httplib::Client>(control_url);
  client->set_connection_timeout(std::chrono::seconds(2));
  client->set_read_timeout(std::chrono::seconds(5));
  auto mutex = std::make_shared<std::mutex>();
  return [client, mutex, control_url](const std::string& body) -> ApiServer::CommandResult {
    std::lock_guard lock(*mutex);
    const auto res = client->Post("/command", body, "application/json");
    if (!res) {
      return {502, nlohmann::json{{"ok", false}, {"error", fmt::format("control node {} unreachable", control_url)}}.dump()};
    }
    return {res->status, res->body};
  };
}

ApiServer::Handlers make_handlers(AvatarService& service,
                                  std::function<ApiServer::CommandResult(const std::string&)> command) {
  ApiServer::Handlers h;
  h.state = [&service]() -> std::optional<std::string> {
    const auto latest = service.latest();
    if (!latest) return std::nullopt;
    return to_json(latest->state, latest->seq, service.profile()).dump();
  };
  h.history = [&service](std::uint64_t since) {
    auto out = nlohmann::json::array();
    for (const auto& rec : service.history().since(since)) out.push_back(to_json(rec.state, rec.seq, service.profile()));
    return out.dump();
  };
  h.command = std::move(command);
  return h;
}

}  // namespace iotavatar::service
