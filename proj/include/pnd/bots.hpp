#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pnd/rng.hpp"
#include "pnd/rules.hpp"
#include "pnd/rules_json.hpp"

namespace pnd {

enum class BotKind : std::uint8_t { Random, Scout };

std::string_view to_string(BotKind k);
std::optional<BotKind> parse_bot_kind(std::string_view s);

/// What a bot has learned from the events it was shown.
struct BotMemory {
  std::map<std::string, int> defenses;    // enemy computer -> package
  std::map<std::string, bool> scouted;    // enemy computer -> critical
  std::set<std::string> destroyed;        // enemy computers taken down
  std::map<std::string, std::set<AttackType>> attempted;  // enemy computer -> attacks tried

  /// `events` must already be filtered for `me`.
  void observe(const std::vector<Event>& events, PlayerId me);

  friend bool operator==(const BotMemory&, const BotMemory&) = default;
};

/// Uniform over legal_moves(view).
Move random_bot_move(const PlayerView& view, Rng& rng);

/// Keeps four probes in flight (Virus first, then the attacks with the fewest
/// blockers), steers each along shortest paths toward the nearest enemy
/// computer it can still hurt, switches to unblocked types once a defense is
/// revealed, and drives a destructive attack at the critical computer once
/// scouting or elimination pins it down.
std::pair<Move, BotMemory> scout_bot_move(const PlayerView& view, const BotMemory& memory,
                                          Rng& rng);

/// The enemy critical computer if memory pins it down (board node id).
std::optional<std::string> known_critical(const PlayerView& view, const BotMemory& memory);

Move bot_move(BotKind kind, const PlayerView& view, BotMemory& memory, Rng& rng);

/// Random card placement on `lan` keeping its critical flag.
SetupChoice random_setup(const LanConfig& lan, Rng& rng);
/// The two-community LAN with critical c8 and shuffled cards.
SetupChoice dual_community_setup(Rng& rng);

struct SelfPlayOptions {
  LanConfig lan_a = fig5_default();
  LanConfig lan_b = fig5_default();
  int turn_cap = kDefaultTurnCap;
  PlayerId first_mover = PlayerId::A;
  int grid_size = 9;
};

struct GameResult {
  std::optional<PlayerId> winner;
  int turns = 0;
  GameLog log;
  GameState final_state;
};

/// Seeds are keyed by move order (first or second mover), not by seat, so
/// swapping seats together with the first mover yields the mirrored game.
GameResult self_play(BotKind bot_a, BotKind bot_b, std::uint64_t seed,
                     const SelfPlayOptions& options = {});

struct TournamentSummary {
  BotKind bot_a = BotKind::Random;
  BotKind bot_b = BotKind::Random;
  int games = 0;
  int wins_a = 0;
  int wins_b = 0;
  int draws = 0;
  double mean_turns = 0;
  std::uint64_t seed = 0;
};

/// Game i uses seed derive_seed({seed, i}); the first mover alternates.
TournamentSummary tournament(BotKind bot_a, BotKind bot_b, int games, std::uint64_t seed,
                             const SelfPlayOptions& options = {}, unsigned threads = 0);

/// `bot_a,bot_b,games,wins_a,wins_b,draws,mean_turns,seed`
void write_tournament_csv(std::ostream& out, const std::vector<TournamentSummary>& rows);

}  // namespace pnd
