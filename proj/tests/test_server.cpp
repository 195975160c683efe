#include <doctest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "pnd/server.hpp"
#include "test_helpers.hpp"

using namespace pnd;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

struct Reply {
  int status;
  Json body;
};

Reply request(unsigned short port, http::verb method, const std::string& target,
              const std::string& token = "", const std::string& body = "") {
  net::io_context ioc;
  tcp::resolver resolver(ioc);
  beast::tcp_stream stream(ioc);
  stream.connect(resolver.resolve("127.0.0.1", std::to_string(port)));
  http::request<http::string_body> req{method, target, 11};
  req.set(http::field::host, "127.0.0.1");
  if (!token.empty()) req.set(http::field::authorization, "Bearer " + token);
  if (!body.empty()) {
    req.set(http::field::content_type, "application/json");
    req.body() = body;
  }
  req.prepare_payload();
  http::write(stream, req);
  beast::flat_buffer buffer;
  http::response<http::string_body> res;
  http::read(stream, buffer, res);
  beast::error_code ec;
  stream.socket().shutdown(tcp::socket::shutdown_both, ec);
  return {static_cast<int>(res.result_int()), res.body().empty() ? Json() : Json::parse(res.body())};
}

class WsClient {
 public:
  WsClient(unsigned short port, const std::string& target) : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", target);
  }
  ~WsClient() {
    beast::error_code ec;
    ws_.close(websocket::close_code::normal, ec);
  }
  void send(const Json& j) { ws_.write(net::buffer(j.dump())); }
  Json receive() {
    beast::flat_buffer buffer;
    ws_.read(buffer);
    return Json::parse(beast::buffers_to_string(buffer.data()));
  }

 private:
  net::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
};

struct Live {
  SessionManager sessions;
  Server server{sessions, "127.0.0.1", 0, 2};
  Live() { server.start(); }
  unsigned short port() const { return server.port(); }
};

}  // namespace

TEST_CASE("token extraction") {
  CHECK(request_token("Bearer abc", "/games/x/view") == "abc");
  CHECK(request_token("", "/games/x/events?token=def") == "def");
  CHECK(request_token("", "/games/x/events?a=1&token=ghi&b=2") == "ghi");
  CHECK(request_token("Basic xyz", "/games/x/view").empty());
}

TEST_CASE("routing without a socket") {
  SessionManager m;
  auto r = route_http(m, "POST", "/games", "", R"({"grid_size":7})");
  REQUIRE(r.status == 201);
  const auto t = Json::parse(r.body);
  const std::string id = t["game_id"];
  CHECK(route_http(m, "GET", "/games", "", "").status == 405);
  CHECK(route_http(m, "GET", "/nothing", "", "").status == 404);
  CHECK(route_http(m, "POST", "/games", "", "{oops").status == 400);
  CHECK(route_http(m, "POST", "/games", "", R"({"grid_size":2})").status == 400);
  CHECK(route_http(m, "GET", "/games/" + id + "/view", "Bearer nope", "").status == 401);
  CHECK(route_http(m, "GET", "/games/zzz/view", "Bearer nope", "").status == 404);
  const std::string auth = "Bearer " + t["token_a"].get<std::string>();
  CHECK(route_http(m, "GET", "/games/" + id + "/view", auth, "").status == 200);
  CHECK(route_http(m, "GET", "/games/" + id + "/events", auth, "").status == 426);
  CHECK(route_http(m, "POST", "/games/" + id + "/moves", auth, R"({"kind":"pass"})").status == 409);
  CHECK(route_http(m, "POST", "/games/" + id + "/setup", auth, R"({"lan":1})").status == 400);
  CHECK(route_http(m, "POST", "/games/" + id + "/view", auth, "").status == 405);
}

TEST_CASE("a game over HTTP and WebSocket") {
  Live live;
  const auto port = live.port();
  CHECK(port != 0);

  auto created = request(port, http::verb::post, "/games");
  REQUIRE(created.status == 201);
  const std::string id = created.body["game_id"];
  const std::string ta = created.body["token_a"];
  const std::string tb = created.body["token_b"];

  CHECK(request(port, http::verb::get, "/games/" + id + "/view", "wrong").status == 401);
  CHECK(request(port, http::verb::get, "/games/" + id + "/events", ta).status == 426);

  WsClient ws_b(port, "/games/" + id + "/events?token=" + tb);
  auto first = ws_b.receive();
  CHECK(first["type"] == "view_update");
  CHECK(first["view"]["phase"] == "awaiting_setup");

  auto setup_a = request(port, http::verb::post, "/games/" + id + "/setup", ta,
                         to_json(test::ordered_setup()).dump());
  CHECK(setup_a.status == 200);
  CHECK(ws_b.receive()["view"]["opponent_ready"] == true);

  ws_b.send({{"type", "submit_setup"}, {"setup", to_json(test::ordered_setup())}});
  auto started = ws_b.receive();
  CHECK(started["type"] == "view_update");
  CHECK(started["view"]["phase"] == "in_play");
  CHECK(ws_b.receive()["type"] == "ack");

  auto bad_move = request(port, http::verb::post, "/games/" + id + "/moves", tb,
                          R"({"kind":"spawn","attack":"worm"})");
  CHECK(bad_move.status == 409);
  CHECK(bad_move.body["code"] == "NotYourTurn");

  auto moved = request(port, http::verb::post, "/games/" + id + "/moves", ta,
                       R"({"kind":"spawn","attack":"virus"})");
  CHECK(moved.status == 200);
  CHECK(moved.body["events"][0]["attack"] == "virus");

  auto pushed = ws_b.receive();
  CHECK(pushed["type"] == "events");
  CHECK(pushed["events"][0]["kind"] == "spawned");
  CHECK_FALSE(pushed["events"][0].contains("attack"));
  auto view = ws_b.receive();
  CHECK(view["type"] == "view_update");
  CHECK(view["view"]["turn"] == "b");
  CHECK_FALSE(view["view"]["rings"][0].contains("type"));

  ws_b.send("not an envelope");
  CHECK(ws_b.receive()["code"] == "BadRequest");

  auto resigned = request(port, http::verb::post, "/games/" + id + "/resign", ta);
  CHECK(resigned.status == 200);
  CHECK(ws_b.receive()["events"].back()["winner"] == "b");
  auto final_view = ws_b.receive();
  CHECK(final_view["view"]["phase"] == "finished");
  CHECK(final_view["view"].contains("opponent_setup"));
}

TEST_CASE("WebSocket upgrades need a valid token") {
  Live live;
  auto created = request(live.port(), http::verb::post, "/games");
  const std::string id = created.body["game_id"];
  CHECK_THROWS(WsClient(live.port(), "/games/" + id + "/events?token=bad"));
  CHECK_THROWS(WsClient(live.port(), "/games/missing/events?token=bad"));
}
