#include "pnd/session.hpp"

#include <cstdio>
#include <random>

namespace pnd {

ServiceError::ServiceError(Code code, std::string message, std::vector<SetupIssue> issues)
    : std::runtime_error(std::move(message)), code_(code), issues_(std::move(issues)) {}

int ServiceError::http_status() const {
  switch (code_) {
    case Code::BadToken: return 401;
    case Code::UnknownGame: return 404;
    case Code::WrongPhase:
    case Code::NotYourTurn: return 409;
    case Code::IllegalMove:
    case Code::InvalidSetup: return 422;
    case Code::InvalidConfig:
    case Code::BadRequest: return 400;
  }
  return 500;
}

std::string_view to_string(ServiceError::Code c) {
  using C = ServiceError::Code;
  switch (c) {
    case C::BadToken: return "BadToken";
    case C::UnknownGame: return "UnknownGame";
    case C::WrongPhase: return "WrongPhase";
    case C::NotYourTurn: return "NotYourTurn";
    case C::IllegalMove: return "IllegalMove";
    case C::InvalidSetup: return "InvalidSetup";
    case C::InvalidConfig: return "InvalidConfig";
    case C::BadRequest: return "BadRequest";
  }
  return "?";
}

Json error_message(const ServiceError& e) {
  Json j = {{"type", "error"}, {"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (!e.issues().empty()) {
    Json v = Json::array();
    for (const auto& i : e.issues()) v.push_back(to_json(i));
    j["violations"] = std::move(v);
  }
  return j;
}

std::string random_token() {
  std::random_device rd;
  std::string out;
  char buf[9];
  for (int i = 0; i < 4; ++i) {
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(rd()));
    out += buf;
  }
  return out;
}

namespace {

using C = ServiceError::Code;

bool same_secret(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return false;
  unsigned char diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    diff |= static_cast<unsigned char>(a[i] ^ b[i]);
  return diff == 0;
}

Json view_update(const PlayerView& v) { return {{"type", "view_update"}, {"view", to_json(v)}}; }

}  // namespace

struct SessionManager::Session {
  std::mutex mu;
  GameTokens tokens;
  GameConfig config;
  std::array<std::optional<SetupChoice>, 2> pending;
  std::optional<GameState> state;
  GameLog log;
  std::map<int, std::pair<PlayerId, Subscriber>> subscribers;
  int next_subscription = 1;
  Clock::time_point last_active;

  PlayerId player_for(const std::string& token) const {
    if (same_secret(token, tokens.token_a)) return PlayerId::A;
    if (same_secret(token, tokens.token_b)) return PlayerId::B;
    throw ServiceError(C::BadToken, "token does not belong to this game");
  }

  Json view_message(PlayerId p) const {
    if (state) return view_update(player_view(*state, p));
    const auto& own = pending[index_of(p)];
    return {{"type", "view_update"},
            {"view",
             {{"viewer", std::string(to_string(p))},
              {"phase", std::string(to_string(Phase::AwaitingSetup))},
              {"own_setup", own ? to_json(*own) : Json(nullptr)},
              {"opponent_ready", pending[index_of(opponent(p))].has_value()}}}};
  }

  void push(PlayerId p, const Json& message) {
    const auto text = message.dump();
    for (const auto& [id, sub] : subscribers)
      if (sub.first == p) sub.second(text);
  }

  void push_views() {
    for (auto p : kPlayers) push(p, view_message(p));
  }

  /// Appends, fans out per-player filtered events and fresh views, and
  /// returns the actor's filtered events.
  Json commit(PlayerId actor, std::optional<Move> move, Transition t) {
    log.records.push_back(LogRecord{state->turn_count, actor, move, t.events});
    state = std::move(t.state);
    for (auto p : kPlayers) {
      push(p, {{"type", "events"},
               {"turn_count", state->turn_count},
               {"events", to_json(filter_events(t.events, p))}});
    }
    push_views();
    return {{"type", "ack"}, {"events", to_json(filter_events(t.events, actor))}};
  }
};

SessionManager::SessionManager(std::chrono::seconds idle_ttl,
                               std::function<Clock::time_point()> now)
    : ttl_(idle_ttl), now_(std::move(now)) {}

SessionManager::~SessionManager() = default;

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& game_id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(game_id);
  if (it == sessions_.end()) throw ServiceError(C::UnknownGame, "no game '" + game_id + "'");
  return it->second;
}

GameTokens SessionManager::create_game(const GameConfig& config) {
  if (auto problem = config_problem(config)) throw ServiceError(C::InvalidConfig, *problem);
  auto s = std::make_shared<Session>();
  s->config = config;
  s->log.config = config;
  s->tokens.token_a = random_token();
  do {
    s->tokens.token_b = random_token();
  } while (s->tokens.token_b == s->tokens.token_a);
  s->last_active = now_();
  std::lock_guard lock(mu_);
  do {
    s->tokens.game_id = random_token().substr(0, 16);
  } while (sessions_.contains(s->tokens.game_id));
  sessions_[s->tokens.game_id] = s;
  return s->tokens;
}

PlayerId SessionManager::authenticate(const std::string& game_id, const std::string& token) {
  auto s = find(game_id);
  std::lock_guard lock(s->mu);
  return s->player_for(token);
}

Json SessionManager::submit_setup(const std::string& game_id, const std::string& token,
                                  const SetupChoice& setup) {
  auto s = find(game_id);
  std::lock_guard lock(s->mu);
  const auto p = s->player_for(token);
  s->last_active = now_();
  if (s->state || s->pending[index_of(p)])
    throw ServiceError(C::WrongPhase, "setup already submitted");
  auto issues = check_setup(setup);
  if (!issues.empty()) {
    std::string msg = "invalid setup: " + issues.front().code;
    if (!issues.front().subject.empty()) msg += " (" + issues.front().subject + ")";
    throw ServiceError(C::InvalidSetup, msg, std::move(issues));
  }
  s->pending[index_of(p)] = setup;
  if (s->pending[0] && s->pending[1]) {
    try {
      s->state = new_game(*s->pending[0], *s->pending[1], s->config);
    } catch (const RulesError& e) {
      s->pending[index_of(p)].reset();
      throw ServiceError(C::InvalidSetup, e.what(), e.issues());
    }
    s->log.setups = {*s->pending[0], *s->pending[1]};
    s->push_views();
  } else {
    s->push(opponent(p), s->view_message(opponent(p)));
  }
  return {{"type", "ack"}, {"phase", std::string(to_string(s->state ? s->state->phase
                                                                     : Phase::AwaitingSetup))}};
}

Json SessionManager::submit_move(const std::string& game_id, const std::string& token,
                                 const Move& move) {
  auto s = find(game_id);
  std::lock_guard lock(s->mu);
  const auto p = s->player_for(token);
  s->last_active = now_();
  if (!s->state || s->state->phase != Phase::InPlay)
    throw ServiceError(C::WrongPhase, "game is not in play");
  try {
    auto t = apply_move(*s->state, p, move);
    return s->commit(p, move, std::move(t));
  } catch (const RulesError& e) {
    if (e.code() == RulesError::Code::NotYourTurn) throw ServiceError(C::NotYourTurn, e.what());
    if (e.code() == RulesError::Code::GameNotInPlay) throw ServiceError(C::WrongPhase, e.what());
    throw ServiceError(C::IllegalMove, e.what());
  }
}

Json SessionManager::resign(const std::string& game_id, const std::string& token) {
  auto s = find(game_id);
  std::lock_guard lock(s->mu);
  const auto p = s->player_for(token);
  s->last_active = now_();
  if (!s->state || s->state->phase != Phase::InPlay)
    throw ServiceError(C::WrongPhase, "game is not in play");
  return s->commit(p, std::nullopt, pnd::resign(*s->state, p));
}

Json SessionManager::get_view(const std::string& game_id, const std::string& token) {
  auto s = find(game_id);
  std::lock_guard lock(s->mu);
  const auto p = s->player_for(token);
  s->last_active = now_();
  return s->view_message(p);
}

Json SessionManager::handle(const std::string& game_id, const std::string& token,
                            const Json& message) {
  try {
    if (!message.is_object() || !message.contains("type") || !message["type"].is_string())
      throw ServiceError(C::BadRequest, "message needs a string 'type'");
    const auto type = message["type"].get<std::string>();
    try {
      if (type == "submit_setup") {
        if (!message.contains("setup")) throw DecodeError("missing 'setup'");
        return submit_setup(game_id, token, setup_from_json(message["setup"]));
      }
      if (type == "submit_move") {
        if (!message.contains("move")) throw DecodeError("missing 'move'");
        return submit_move(game_id, token, move_from_json(message["move"]));
      }
    } catch (const DecodeError& e) {
      throw ServiceError(C::BadRequest, e.what());
    }
    if (type == "resign") return resign(game_id, token);
    if (type == "get_view" || type == "join") return get_view(game_id, token);
    throw ServiceError(C::BadRequest, "unknown message type '" + type + "'");
  } catch (const ServiceError& e) {
    return error_message(e);
  }
}

int SessionManager::subscribe(const std::string& game_id, const std::string& token,
                              Subscriber sink) {
  auto s = find(game_id);
  std::lock_guard lock(s->mu);
  const auto p = s->player_for(token);
  const int id = s->next_subscription++;
  s->subscribers.emplace(id, std::make_pair(p, std::move(sink)));
  return id;
}

void SessionManager::unsubscribe(const std::string& game_id, int subscription) {
  std::shared_ptr<Session> s;
  {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(game_id);
    if (it == sessions_.end()) return;
    s = it->second;
  }
  std::lock_guard lock(s->mu);
  s->subscribers.erase(subscription);
}

std::string SessionManager::event_log(const std::string& game_id) {
  auto s = find(game_id);
  std::lock_guard lock(s->mu);
  if (!s->state) return Json{{"type", "config"}, {"config", to_json(s->config)}}.dump() + "\n";
  return write_event_log(s->log);
}

void SessionManager::restore(const GameTokens& tokens, const GameLog& log) {
  auto s = std::make_shared<Session>();
  s->tokens = tokens;
  s->config = log.config;
  s->log = log;
  s->pending = {log.setups[0], log.setups[1]};
  try {
    s->state = replay(log);
  } catch (const RulesError& e) {
    throw ServiceError(C::BadRequest, std::string("log does not replay: ") + e.what());
  } catch (const DecodeError& e) {
    throw ServiceError(C::BadRequest, std::string("log does not replay: ") + e.what());
  }
  s->last_active = now_();
  std::lock_guard lock(mu_);
  sessions_[tokens.game_id] = s;
}

GameState SessionManager::state(const std::string& game_id) {
  auto s = find(game_id);
  std::lock_guard lock(s->mu);
  if (!s->state) throw ServiceError(C::WrongPhase, "game has not started");
  return *s->state;
}

std::size_t SessionManager::expire_idle() {
  const auto now = now_();
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    bool idle;
    {
      std::lock_guard slock(it->second->mu);
      idle = now - it->second->last_active > ttl_;
    }
    if (idle) {
      it = sessions_.erase(it);
      ++n;
    } else {
      ++it;
    }
  }
  return n;
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

}  // namespace pnd
