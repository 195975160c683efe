#pragma once

#include <array>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnd/rules.hpp"
#include "pnd/rules_json.hpp"

namespace pnd {

class ServiceError : public std::runtime_error {
 public:
  enum class Code {
    BadToken,
    UnknownGame,
    WrongPhase,
    NotYourTurn,
    IllegalMove,
    InvalidSetup,
    InvalidConfig,
    BadRequest,
  };

  ServiceError(Code code, std::string message, std::vector<SetupIssue> issues = {});

  Code code() const { return code_; }
  const std::vector<SetupIssue>& issues() const { return issues_; }
  int http_status() const;

 private:
  Code code_;
  std::vector<SetupIssue> issues_;
};

std::string_view to_string(ServiceError::Code c);

/// {"type":"error","code":...,"message":...[,"violations":[...]]}
Json error_message(const ServiceError& e);

struct GameTokens {
  std::string game_id;
  std::string token_a;
  std::string token_b;
};

/// Receives serialized ServerToClient messages. Called with the session lock
/// held, so it must not call back into the manager.
using Subscriber = std::function<void(const std::string& message)>;

/// Hosts live games. Every mutation of one session runs under that
/// session's mutex; everything sent to a player is built from player_view or
/// from events filtered for that player.
class SessionManager {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SessionManager(std::chrono::seconds idle_ttl = std::chrono::hours(24),
                          std::function<Clock::time_point()> now = Clock::now);
  ~SessionManager();

  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  /// Throws InvalidConfig.
  GameTokens create_game(const GameConfig& config = {});

  /// The replies below are ServerToClient messages; failures throw
  /// ServiceError.
  Json submit_setup(const std::string& game_id, const std::string& token,
                    const SetupChoice& setup);
  Json submit_move(const std::string& game_id, const std::string& token, const Move& move);
  Json resign(const std::string& game_id, const std::string& token);
  Json get_view(const std::string& game_id, const std::string& token);

  /// Dispatches a ClientToServer envelope ({"type": "submit_setup" |
  /// "submit_move" | "resign" | "get_view", ...}) for an authenticated
  /// connection. Errors come back as error messages, never thrown.
  Json handle(const std::string& game_id, const std::string& token, const Json& message);

  /// Throws BadToken / UnknownGame.
  PlayerId authenticate(const std::string& game_id, const std::string& token);

  int subscribe(const std::string& game_id, const std::string& token, Subscriber sink);
  void unsubscribe(const std::string& game_id, int subscription);

  /// Full NDJSON log (server side only; contains both setups).
  std::string event_log(const std::string& game_id);
  /// Rebuilds a session from its tokens and log.
  void restore(const GameTokens& tokens, const GameLog& log);
  /// Omniscient snapshot for audits and recovery checks.
  GameState state(const std::string& game_id);

  /// Drops sessions idle for longer than the ttl; returns how many.
  std::size_t expire_idle();
  std::size_t size() const;

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& game_id);

  std::chrono::seconds ttl_;
  std::function<Clock::time_point()> now_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

/// 128 random bits as 32 lowercase hex digits.
std::string random_token();

}  // namespace pnd
