#include <doctest.h>

#include <httplib.h>

#include <chrono>
#include <thread>

#include <nlohmann/json.hpp>

#include "stack.hpp"
#include "ws_client.hpp"

using namespace iotavatar;
using namespace iotavatar::service;
using namespace std::chrono_literals;
using nlohmann::json;
using testsupport::Stack;
using testsupport::WsClient;

namespace {

httplib::Client client_for(int port) {
  httplib::Client c("127.0.0.1", port);
  c.set_connection_timeout(2s);
  c.set_read_timeout(5s);
  return c;
}

template <class Pred>
bool eventually(Pred pred, std::chrono::milliseconds limit = 3s) {
  const auto end = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < end) {
    if (pred()) return true;
    std::this_thread::sleep_for(10ms);
  }
  return pred();
}

}  // namespace

TEST_CASE("state is 503 before the first poll, then follows the schema") {
  Stack stack;
  auto c = client_for(stack.api->port());
  auto r = c.Get("/state");
  REQUIRE(r);
  CHECK(r->status == 503);

  stack.service->tick(now_ms());
  r = c.Get("/state");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(r->get_header_value("Content-Type").find("application/json") == 0);
  const auto j = json::parse(r->body);
  for (const char* key : {"seq", "ts", "sensors", "percent", "affect", "emotion", "stale", "stale_devices"})
    CHECK_MESSAGE(j.contains(key), key);
  CHECK(j["seq"] == 1);
  CHECK(j["sensors"]["brightness"] == 10.0);
  CHECK(j["emotion"]["code"].get<int>() >= 1);
  CHECK(j["emotion"]["code"].get<int>() <= 5);
  CHECK(j["stale"] == false);

  r = c.Get("/health");
  REQUIRE(r);
  CHECK(r->status == 200);
}

TEST_CASE("history since filter") {
  Stack stack;
  auto c = client_for(stack.api->port());
  stack.service->tick(now_ms());
  stack.sim->environment().submit(sim::SetLights{2}).get();
  stack.service->tick(now_ms());
  stack.sim->environment().submit(sim::SetPeople{4}).get();
  stack.service->tick(now_ms());
  const auto total = stack.history->size();
  REQUIRE(total >= 2);

  auto r = c.Get("/history");
  REQUIRE(r);
  auto all = json::parse(r->body);
  REQUIRE(all.is_array());
  CHECK(all.size() == total);
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i]["seq"].get<int>() > all[i - 1]["seq"].get<int>());

  r = c.Get("/history?since=1");
  REQUIRE(r);
  CHECK(json::parse(r->body).size() == total - 1);
  r = c.Get("/history?since=999");
  REQUIRE(r);
  CHECK(json::parse(r->body) == json::array());
  r = c.Get("/history?since=abc");
  REQUIRE(r);
  CHECK(r->status == 400);
}

TEST_CASE("constant environment pushes at most once over ten polls") {
  Stack stack;
  WsClient ws(stack.api->port());
  CHECK(eventually([&] { return stack.api->subscribers() == 1; }));
  for (int i = 0; i < 10; ++i) stack.service->tick(now_ms());
  std::this_thread::sleep_for(200ms);
  CHECK(ws.count() <= 1);
  CHECK(ws.count() == 1);
  const auto j = json::parse(ws.messages().front());
  CHECK(j["seq"] == 1);
}

TEST_CASE("a command round-trips to a live push within two poll intervals") {
  Stack::Options o;
  o.poll = 100ms;
  Stack stack(o);
  stack.start_polling();
  CHECK(eventually([&] { return stack.service->latest().has_value(); }));
  WsClient ws(stack.api->port());
  CHECK(eventually([&] { return stack.api->subscribers() == 1; }));

  auto c = client_for(stack.api->port());
  const auto sent = std::chrono::steady_clock::now();
  auto r = c.Post("/env/command", R"({"action":"set_lights","count":2})", "application/json");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(json::parse(r->body)["env"]["lights_on"] == 2);
  REQUIRE(ws.wait_for(1, 1s));
  CHECK(std::chrono::steady_clock::now() - sent <= 2 * o.poll + 50ms);
  CHECK(json::parse(ws.messages().back())["sensors"]["brightness"] == 670.0);

  r = c.Post("/env/command", R"({"action":"set_lights","count":7})", "application/json");
  REQUIRE(r);
  CHECK(r->status == 422);
  CHECK(json::parse(r->body)["ok"] == false);
}

TEST_CASE("viewer mode refuses commands") {
  Stack::Options o;
  o.viewer = true;
  Stack stack(o);
  auto c = client_for(stack.api->port());
  auto r = c.Post("/env/command", R"({"action":"water"})", "application/json");
  REQUIRE(r);
  CHECK(r->status == 404);
}

TEST_CASE("unreachable control node gives 502") {
  Stack stack;
  stack.sim->control().stop();
  auto c = client_for(stack.api->port());
  auto r = c.Post("/env/command", R"({"action":"water"})", "application/json");
  REQUIRE(r);
  CHECK(r->status == 502);
}

TEST_CASE("plain GET on the live endpoint asks for an upgrade") {
  Stack stack;
  auto c = client_for(stack.api->port());
  auto r = c.Get("/live");
  REQUIRE(r);
  CHECK(r->status == 426);
}

TEST_CASE("a stalled subscriber is dropped without blocking broadcast") {
  ApiServer::Options opt;
  opt.max_pending = 4;
  ApiServer api(ApiServer::Handlers{}, opt);
  api.start();

  // Raw socket that completes the handshake and then never reads.
  namespace net = boost::asio;
  net::io_context ioc;
  boost::beast::websocket::stream<net::ip::tcp::socket> stalled(ioc);
  net::ip::tcp::resolver resolver(ioc);
  net::connect(stalled.next_layer(), resolver.resolve("127.0.0.1", std::to_string(api.port())));
  stalled.handshake("127.0.0.1", "/live");
  WsClient healthy(api.port());
  CHECK(eventually([&] { return api.subscribers() == 2; }));

  const std::string big(256 * 1024, 'x');
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 200; ++i) api.broadcast(big);
  CHECK(std::chrono::steady_clock::now() - t0 < 1s);
  CHECK(eventually([&] { return api.dropped_subscribers() >= 1; }, 5s));
  CHECK(eventually([&] { return api.subscribers() <= 1; }, 5s));
  api.stop();
}

TEST_CASE("people-node outage keeps states flowing, stale, without gaps") {
  Stack::Options o;
  o.poll = 50ms;
  Stack stack(o);
  stack.start_polling();
  CHECK(eventually([&] { return stack.service->latest().has_value(); }));
  auto c = client_for(stack.api->port());

  stack.sim->people().stop();
  CHECK(eventually([&] { return stack.service->latest()->state.people_stale; }));
  const auto polls_before = stack.service->polls();
  auto last = stack.service->latest()->state.ts;
  std::chrono::milliseconds worst{0};
  for (int i = 0; i < 15; ++i) {
    std::this_thread::sleep_for(o.poll);
    const auto cur = stack.service->latest()->state;
    CHECK(cur.people_stale);
    CHECK(cur.people.has_value());
    if (cur.ts != last) {
      worst = std::max(worst, std::chrono::duration_cast<std::chrono::milliseconds>(cur.ts - last));
      last = cur.ts;
    }
  }
  CHECK(stack.service->polls() > polls_before + 5);
  // Poll timestamps stay on the schedule; allow 30 ms of scheduler jitter.
  CHECK(worst <= o.poll + 30ms);
  auto r = c.Get("/state");
  REQUIRE(r);
  const auto j = json::parse(r->body);
  CHECK(j["stale"] == true);
  CHECK(j["stale_devices"] == json::array({"people"}));

  stack.sim->people().start();
  CHECK(eventually([&] { return !stack.service->latest()->state.stale(); }));
}
