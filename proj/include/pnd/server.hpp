#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "pnd/session.hpp"

namespace pnd {

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

/// Request/response routes:
///   POST /games                  body: optional GameConfig
///   POST /games/{id}/setup       body: SetupChoice
///   POST /games/{id}/moves       body: Move
///   POST /games/{id}/resign
///   GET  /games/{id}/view
/// `authorization` is the raw header value ("Bearer <token>").
HttpReply route_http(SessionManager& sessions, std::string_view method, std::string_view target,
                     std::string_view authorization, std::string_view body);

/// Token from "Bearer <token>", else from a `token=` query parameter.
std::string request_token(std::string_view authorization, std::string_view target);

/// HTTP plus WebSocket push (GET /games/{id}/events with an upgrade).
class Server {
 public:
  /// Port 0 picks a free port; see port().
  Server(SessionManager& sessions, const std::string& address, unsigned short port,
         unsigned threads = 1);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  unsigned short port() const;
  /// Serves on background threads.
  void start();
  /// Serves on the calling thread until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pnd
