#include "pnd/server.hpp"

#include <deque>
#include <thread>
#include <vector>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace pnd {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

using C = ServiceError::Code;

std::vector<std::string_view> path_segments(std::string_view target) {
  target = target.substr(0, target.find('?'));
  std::vector<std::string_view> out;
  while (!target.empty()) {
    if (target.front() == '/') {
      target.remove_prefix(1);
      continue;
    }
    const auto slash = target.find('/');
    out.push_back(target.substr(0, slash));
    if (slash == std::string_view::npos) break;
    target.remove_prefix(slash);
  }
  return out;
}

Json parse_body(std::string_view body) {
  if (body.empty()) return Json(nullptr);
  try {
    return Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw ServiceError(C::BadRequest, std::string("malformed JSON: ") + e.what());
  }
}

HttpReply reply(int status, const Json& j) { return HttpReply{status, j.dump()}; }

/// Game id for /games/{id}/events, or empty.
std::string events_game(std::string_view target) {
  const auto seg = path_segments(target);
  if (seg.size() == 3 && seg[0] == "games" && seg[2] == "events") return std::string(seg[1]);
  return {};
}

}  // namespace

std::string request_token(std::string_view authorization, std::string_view target) {
  constexpr std::string_view kBearer = "Bearer ";
  if (authorization.starts_with(kBearer)) return std::string(authorization.substr(kBearer.size()));
  const auto q = target.find('?');
  if (q == std::string_view::npos) return {};
  auto query = target.substr(q + 1);
  while (!query.empty()) {
    const auto amp = query.find('&');
    const auto pair = query.substr(0, amp);
    if (pair.starts_with("token=")) return std::string(pair.substr(6));
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  return {};
}

HttpReply route_http(SessionManager& sessions, std::string_view method, std::string_view target,
                     std::string_view authorization, std::string_view body) {
  try {
    const auto seg = path_segments(target);
    if (seg.empty() || seg[0] != "games")
      return reply(404, {{"type", "error"}, {"code", "NotFound"}, {"message", "no such route"}});
    const bool post = method == "POST";
    const bool get = method == "GET";

    if (seg.size() == 1) {
      if (!post) return reply(405, {{"type", "error"}, {"code", "MethodNotAllowed"}, {"message", "use POST"}});
      GameConfig config;
      try {
        config = config_from_json(parse_body(body));
      } catch (const DecodeError& e) {
        throw ServiceError(C::BadRequest, e.what());
      }
      const auto t = sessions.create_game(config);
      return reply(201, {{"game_id", t.game_id}, {"token_a", t.token_a}, {"token_b", t.token_b}});
    }
    if (seg.size() != 3)
      return reply(404, {{"type", "error"}, {"code", "NotFound"}, {"message", "no such route"}});

    const std::string game(seg[1]);
    const std::string_view action = seg[2];
    const auto token = request_token(authorization, target);
    auto wrong_method = [] {
      return reply(405, {{"type", "error"}, {"code", "MethodNotAllowed"}, {"message", "wrong method"}});
    };
    try {
      if (action == "setup") {
        if (!post) return wrong_method();
        return reply(200, sessions.submit_setup(game, token, setup_from_json(parse_body(body))));
      }
      if (action == "moves") {
        if (!post) return wrong_method();
        return reply(200, sessions.submit_move(game, token, move_from_json(parse_body(body))));
      }
    } catch (const DecodeError& e) {
      throw ServiceError(C::BadRequest, e.what());
    }
    if (action == "resign") {
      if (!post) return wrong_method();
      return reply(200, sessions.resign(game, token));
    }
    if (action == "view") {
      if (!get) return wrong_method();
      return reply(200, sessions.get_view(game, token));
    }
    if (action == "events") {
      sessions.authenticate(game, token);
      return reply(426, {{"type", "error"}, {"code", "UpgradeRequired"},
                         {"message", "connect with a WebSocket upgrade"}});
    }
    return reply(404, {{"type", "error"}, {"code", "NotFound"}, {"message", "no such route"}});
  } catch (const ServiceError& e) {
    return reply(e.http_status(), error_message(e));
  }
}

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, SessionManager& sessions, std::string game, std::string token)
      : ws_(std::move(socket)), sessions_(sessions), game_(std::move(game)), token_(std::move(token)) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  void send(std::string message) {
    net::post(ws_.get_executor(), [self = shared_from_this(), m = std::move(message)]() mutable {
      self->queue_.push_back(std::move(m));
      if (self->queue_.size() == 1) self->write_next();
    });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    std::weak_ptr<WsSession> weak = shared_from_this();
    try {
      subscription_ = sessions_.subscribe(game_, token_, [weak](const std::string& m) {
        if (auto self = weak.lock()) self->send(m);
      });
      send(sessions_.get_view(game_, token_).dump());
    } catch (const ServiceError& e) {
      send(error_message(e).dump());
    }
    read_next();
  }

  void read_next() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      if (subscription_) sessions_.unsubscribe(game_, subscription_);
      subscription_ = 0;
      return;
    }
    const auto text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    Json answer;
    try {
      answer = sessions_.handle(game_, token_, Json::parse(text));
    } catch (const Json::parse_error&) {
      answer = error_message(ServiceError(C::BadRequest, "malformed JSON"));
    }
    send(answer.dump());
    read_next();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()),
                    beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) return;
    queue_.pop_front();
    if (!queue_.empty()) write_next();
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  SessionManager& sessions_;
  std::string game_;
  std::string token_;
  int subscription_ = 0;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, SessionManager& sessions)
      : stream_(std::move(socket)), sessions_(sessions) {}

  void run() {
    net::dispatch(stream_.get_executor(),
                  beast::bind_front_handler(&HttpSession::read_next, shared_from_this()));
  }

 private:
  void read_next() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;

    const std::string target(req_.target());
    const std::string auth(req_[http::field::authorization]);
    if (websocket::is_upgrade(req_)) {
      const auto game = events_game(target);
      if (!game.empty()) {
        const auto token = request_token(auth, target);
        try {
          sessions_.authenticate(game, token);
          stream_.expires_never();
          std::make_shared<WsSession>(stream_.release_socket(), sessions_, game, token)
              ->run(std::move(req_));
          return;
        } catch (const ServiceError& e) {
          respond(HttpReply{e.http_status(), error_message(e).dump()});
          return;
        }
      }
    }
    respond(route_http(sessions_, std::string(req_.method_string()), target, auth, req_.body()));
  }

  void respond(const HttpReply& r) {
    auto res = std::make_shared<http::response<http::string_body>>(
        static_cast<http::status>(r.status), req_.version());
    res->set(http::field::server, "pnd");
    res->set(http::field::content_type, "application/json");
    res->keep_alive(req_.keep_alive());
    res->body() = r.body;
    res->prepare_payload();
    http::async_write(stream_, *res,
                      [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
                        self->on_write(res->need_eof(), ec);
                      });
  }

  void on_write(bool close, beast::error_code ec) {
    if (ec) return;
    if (close) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    read_next();
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  SessionManager& sessions_;
};

}  // namespace

struct Server::Impl {
  Impl(SessionManager& s, const std::string& address, unsigned short port, unsigned n)
      : sessions(s), threads(std::max(1U, n)), acceptor(net::make_strand(ioc)), expiry(ioc) {
    const tcp::endpoint endpoint(net::ip::make_address(address), port);
    acceptor.open(endpoint.protocol());
    acceptor.set_option(net::socket_base::reuse_address(true));
    acceptor.bind(endpoint);
    acceptor.listen(net::socket_base::max_listen_connections);
    accept_next();
    schedule_expiry();
  }

  void accept_next() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec == net::error::operation_aborted) return;
      if (!ec) std::make_shared<HttpSession>(std::move(socket), sessions)->run();
      accept_next();
    });
  }

  void schedule_expiry() {
    expiry.expires_after(std::chrono::minutes(1));
    expiry.async_wait([this](beast::error_code ec) {
      if (ec) return;
      sessions.expire_idle();
      schedule_expiry();
    });
  }

  SessionManager& sessions;
  unsigned threads;
  net::io_context ioc;
  tcp::acceptor acceptor;
  net::steady_timer expiry;
  std::vector<std::thread> pool;
};

Server::Server(SessionManager& sessions, const std::string& address, unsigned short port,
               unsigned threads)
    : impl_(std::make_unique<Impl>(sessions, address, port, threads)) {}

Server::~Server() { stop(); }

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::start() {
  for (unsigned i = 0; i < impl_->threads; ++i) impl_->pool.emplace_back([this] { impl_->ioc.run(); });
}

void Server::run() { impl_->ioc.run(); }

void Server::stop() {
  impl_->ioc.stop();
  for (auto& t : impl_->pool)
    if (t.joinable()) t.join();
  impl_->pool.clear();
}

}  // namespace pnd
