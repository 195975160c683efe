#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pnd/rules.hpp"

namespace pnd {

using Json = nlohmann::json;

/// Thrown for malformed wire or log documents.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const LanConfig& lan);
LanConfig lan_from_json(const Json& j);

Json to_json(const SetupChoice& s);
SetupChoice setup_from_json(const Json& j);

Json to_json(const GameConfig& c);
GameConfig config_from_json(const Json& j);

Json to_json(const Move& m);
Move move_from_json(const Json& j);

/// Optional fields are omitted when empty.
Json to_json(const Event& e);
Event event_from_json(const Json& j);
Json to_json(const std::vector<Event>& events);

Json to_json(const PlayerView& v);

Json to_json(const SetupIssue& i);

/// Full omniscient snapshot, for audit and bit-for-bit comparisons.
Json to_json(const GameState& s);

// ---------------------------------------------------------------------------
// Event log (newline-delimited JSON)
// ---------------------------------------------------------------------------

/// One applied action. `move` is empty for a resignation.
struct LogRecord {
  int turn_count = 0;
  PlayerId player = PlayerId::A;
  std::optional<Move> move;
  std::vector<Event> events;
  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

struct GameLog {
  GameConfig config;
  std::array<SetupChoice, 2> setups;
  std::vector<LogRecord> records;
};

/// Header lines for the config and both setups, then one line per record.
std::string write_event_log(const GameLog& log);
std::string log_line(const LogRecord& r);
GameLog parse_event_log(std::string_view text);

/// Re-applies every record from a fresh game. Throws DecodeError when a
/// recorded event list differs from the one the rules produce.
GameState replay(const GameLog& log);

}  // namespace pnd
