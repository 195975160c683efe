#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "pnd/core_model.hpp"
#include "pnd/rng.hpp"
#include "pnd/topology.hpp"

namespace pnd {

// ---------------------------------------------------------------------------
// Setup
// ---------------------------------------------------------------------------

struct CardAssignment {
  AttackType attack;
  int defense;
  friend bool operator==(const CardAssignment&, const CardAssignment&) = default;
};

/// A player's secret configuration: the LAN, where the critical information
/// lives, and the attack/defense card on each of the other seven computers.
struct SetupChoice {
  LanConfig lan;
  std::string critical_computer;
  std::map<std::string, CardAssignment> assignments;

  /// Critical taken from the LAN's flag, cards dealt in the given order onto
  /// the non-critical computers sorted by id.
  static SetupChoice deal(const LanConfig& lan, const std::array<AttackType, 7>& attacks,
                          const std::array<int, 7>& defenses);

  friend bool operator==(const SetupChoice&, const SetupChoice&) = default;
};

/// Setup problems use the LAN violation names plus: DuplicateAttack,
/// MissingAttack, DuplicateDefense, InvalidDefense, CriticalHasCards,
/// MissingAssignment, UnknownComputer, CriticalMismatch, MalformedLan.
struct SetupIssue {
  std::string code;
  std::string subject;
  std::string message;
  friend bool operator==(const SetupIssue&, const SetupIssue&) = default;
};

std::vector<SetupIssue> check_setup(const SetupChoice& setup);

// ---------------------------------------------------------------------------
// Game state
// ---------------------------------------------------------------------------

inline constexpr int kMinGridSize = 5;
inline constexpr int kDefaultTurnCap = 500;
inline constexpr int kWormRingCap = 4;

struct GameConfig {
  int grid_size = 9;
  int turn_cap = kDefaultTurnCap;
  PlayerId first_mover = PlayerId::A;
  /// Seeds the Modification draws; every other transition is deterministic.
  std::uint64_t seed = 0;
  friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

/// Empty when the config is usable.
std::optional<std::string> config_problem(const GameConfig& config);

enum class Phase : std::uint8_t { AwaitingSetup, InPlay, Finished };

std::string_view to_string(Phase p);

struct Ring {
  int id = 0;
  PlayerId owner = PlayerId::A;
  AttackType card = AttackType::Worm;  // the attack card it was spawned from
  AttackType type = AttackType::Worm;  // current behaviour (differs after Modification)
  NodeIndex position = 0;
  bool revealed = false;               // opponent currently knows `type`
  friend bool operator==(const Ring&, const Ring&) = default;
};

/// Facts one player has learned about the other's hidden setup.
struct Knowledge {
  std::map<NodeIndex, int> defenses;                 // computer -> package id
  std::map<NodeIndex, bool> scouted;                 // computer -> is critical
  std::set<std::pair<int, AttackType>> attacks_seen; // (ring id, type) ever revealed
  friend bool operator==(const Knowledge&, const Knowledge&) = default;
};

/// Per-player facts derived once from the setup.
struct SideInfo {
  NodeIndex critical = 0;
  std::map<NodeIndex, CardAssignment> cards;  // computer -> cards
  std::map<AttackType, NodeIndex> origin;     // attack card -> computer
  friend bool operator==(const SideInfo&, const SideInfo&) = default;
};

/// Omniscient game state. Treated as an immutable value: transitions return
/// a new state.
struct GameState {
  Phase phase = Phase::AwaitingSetup;
  GameConfig config;
  std::shared_ptr<const BoardGraph> board;
  std::array<SetupChoice, 2> setups;
  std::array<SideInfo, 2> sides;
  std::vector<Ring> rings;  // ascending id
  std::set<NodeIndex> destroyed;
  std::set<NodeIndex> disabled_mesh;
  std::array<Knowledge, 2> knowledge;  // knowledge[p] = what p knows
  std::set<std::pair<PlayerId, AttackType>> captured;  // (owner, card)
  PlayerId turn = PlayerId::A;
  int turn_count = 0;
  std::optional<PlayerId> winner;
  int next_ring_id = 1;

  const Ring* ring(int id) const;
  bool operator==(const GameState& other) const;
};

// ---------------------------------------------------------------------------
// Moves and events
// ---------------------------------------------------------------------------

struct Move {
  enum class Kind : std::uint8_t { Spawn, Step, Pass };
  Kind kind = Kind::Pass;
  AttackType attack = AttackType::Worm;  // Spawn
  int ring = 0;                          // Step
  std::string to;                        // Step: board node id

  static Move spawn(AttackType a) { return Move{Kind::Spawn, a, 0, {}}; }
  static Move step(int ring, std::string to) {
    return Move{Kind::Step, AttackType::Worm, ring, std::move(to)};
  }
  static Move pass() { return Move{}; }

  bool operator==(const Move& o) const;
};

std::string describe(const Move& m);

enum class EventKind : std::uint8_t {
  Spawned,
  Moved,
  AttackRevealed,
  DefenseRevealed,
  ComputerDestroyed,
  MeshDisabled,
  AttackDestroyed,
  AttackCaptured,
  AttackTransformed,
  AttackReset,
  WormReplicated,
  CriticalScouted,
  GameOver,
};

std::string_view to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view s);

enum class Visibility : std::uint8_t { Both, OwnerOnly };

/// `owner` is the player whose piece the event is about (the ring owner, the
/// computer owner, or the scouting player for CriticalScouted).
struct Event {
  EventKind kind = EventKind::Moved;
  PlayerId owner = PlayerId::A;
  Visibility scope = Visibility::Both;
  int ring = 0;
  std::string node;
  std::string from;
  std::optional<AttackType> attack;
  std::optional<int> package;
  std::optional<bool> critical;
  std::optional<PlayerId> winner;
  friend bool operator==(const Event&, const Event&) = default;
};

/// True when an event's `attack` field is known only to the owner
/// (Spawned, Moved, AttackTransformed, AttackReset).
bool attack_is_private(EventKind k);

/// The event as `viewer` may see it, or nullopt if hidden entirely.
std::optional<Event> filter_event(const Event& e, PlayerId viewer);
std::vector<Event> filter_events(const std::vector<Event>& events, PlayerId viewer);

// ---------------------------------------------------------------------------
// Fog-of-war projection
// ---------------------------------------------------------------------------

struct RingView {
  int id = 0;
  PlayerId owner = PlayerId::A;
  std::string position;
  std::optional<AttackType> type;  // own rings always; opponent rings once revealed
  std::optional<AttackType> card;  // own rings only
  bool revealed = false;           // own rings: opponent knows the type
  friend bool operator==(const RingView&, const RingView&) = default;
};

struct PlayerView {
  PlayerId viewer = PlayerId::A;
  Phase phase = Phase::InPlay;
  PlayerId turn = PlayerId::A;
  int turn_count = 0;
  int turn_cap = kDefaultTurnCap;
  std::optional<PlayerId> winner;
  std::shared_ptr<const BoardGraph> board;  // both LANs are public, minus critical flags
  SetupChoice own_setup;
  std::optional<SetupChoice> opponent_setup;  // only once the game is over
  std::vector<RingView> rings;
  std::map<std::string, int> opponent_defenses;
  std::map<std::string, bool> opponent_scouted;
  std::map<std::string, int> own_defenses_revealed;
  std::set<std::pair<int, AttackType>> attacks_seen;
  std::set<AttackType> own_captured;
  std::set<std::string> destroyed;
  std::set<std::string> disabled_mesh;

  bool operator==(const PlayerView& other) const;
};

PlayerView player_view(const GameState& state, PlayerId viewer);

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class RulesError : public std::runtime_error {
 public:
  enum class Code {
    InvalidSetup,
    InvalidConfig,
    NotYourTurn,
    GameNotInPlay,
    IllegalMove,
    DosOnComputer,
    SamePlayerRings,
  };

  RulesError(Code code, std::string message, std::optional<PlayerId> player = std::nullopt,
             std::vector<SetupIssue> issues = {});

  Code code() const { return code_; }
  std::optional<PlayerId> player() const { return player_; }
  const std::vector<SetupIssue>& issues() const { return issues_; }

 private:
  Code code_;
  std::optional<PlayerId> player_;
  std::vector<SetupIssue> issues_;
};

std::string_view to_string(RulesError::Code c);

// ---------------------------------------------------------------------------
// Transitions
// ---------------------------------------------------------------------------

/// Throws RulesError(InvalidSetup) naming the first offending player, or
/// RulesError(InvalidConfig).
GameState new_game(const SetupChoice& setup_a, const SetupChoice& setup_b,
                   const GameConfig& config = {});

/// Legal moves for the view's owner, computed from public and own data only.
/// Spawns in attack order, then steps by ring id and destination (ordered
/// from the mover's side of the board). A lone Pass when nothing else is
/// legal. Throws GameNotInPlay / NotYourTurn.
std::vector<Move> legal_moves(const PlayerView& view);
std::vector<Move> legal_moves(const GameState& state, PlayerId player);

struct Transition {
  GameState state;
  std::vector<Event> events;
};

/// Throws GameNotInPlay, NotYourTurn or IllegalMove.
Transition apply_move(const GameState& state, PlayerId player, const Move& move);

/// Ends the game in the opponent's favour. Allowed on either player's turn.
Transition resign(const GameState& state, PlayerId player);

// ---------------------------------------------------------------------------
// Combat decision tables
// ---------------------------------------------------------------------------

struct ComputerOutcome {
  bool attack_revealed = false;
  bool defense_revealed = false;
  bool blocked = false;
  bool computer_destroyed = false;
  bool attack_reset = false;      // Virus returns to its origin
  bool worm_replicates = false;
  bool scouts = false;            // Masquerade learns criticality
  bool attack_removed = false;    // destroyed or consumed
  friend bool operator==(const ComputerOutcome&, const ComputerOutcome&) = default;
};

/// `defense` is empty exactly when the target is the critical computer.
/// Throws RulesError(DosOnComputer).
ComputerOutcome resolve_attack_on_computer(AttackType attack,
                                           const std::optional<DefensePackage>& defense);

struct CombatOutcome {
  enum class Result : std::uint8_t {
    MutualDestruction,
    MoverCaptures,         // stationary ring captured, mover (Replay) consumed
    StationaryCaptures,    // mover captured, stationary (Replay) consumed
    MoverTransforms,       // stationary ring changes type, mover consumed
    StationaryTransforms,  // mover changes type, stationary consumed
    PassThrough,           // Masquerade slips past; nothing revealed
  };
  Result result = Result::MutualDestruction;
  bool revealed = true;
  std::optional<AttackType> new_type;
  friend bool operator==(const CombatOutcome&, const CombatOutcome&) = default;
};

/// Replay outranks Modification, which outranks a moving Masquerade; ties go
/// to the mover. `same_player` throws SamePlayerRings.
CombatOutcome resolve_attack_vs_attack(AttackType mover, AttackType stationary, Rng& rng,
                                       bool same_player = false);

/// Uniform draw among the six types other than `current`.
AttackType transformed_type(AttackType current, Rng& rng);

// ---------------------------------------------------------------------------
// Helpers shared with bots and the service
// ---------------------------------------------------------------------------

/// Ordering key that reads the board from `viewer`'s side: own LAN, then the
/// Internet by distance from the viewer's border, then the opposing LAN.
/// Mirror-invariant between seats.
std::tuple<int, int, int, std::string> perspective_key(const BoardGraph& board, NodeIndex node,
                                                       PlayerId viewer);

/// Whether a ring may enter `node` ignoring occupancy (disabled mesh points
/// are closed; Dos rings cannot enter computers).
bool enterable(const BoardGraph& board, const std::set<std::string>& disabled_mesh,
               NodeIndex node, std::optional<AttackType> ring_type);

}  // namespace pnd
