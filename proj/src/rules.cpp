#include "pnd/rules.hpp"

#include <algorithm>
#include <unordered_map>

namespace pnd {
namespace {

using Code = RulesError::Code;

constexpr std::uint64_t kModificationStream = 0x4d6f646966ULL;

bool same_board(const std::shared_ptr<const BoardGraph>& x,
                const std::shared_ptr<const BoardGraph>& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  return x->grid() == y->grid() && x->lan(PlayerId::A) == y->lan(PlayerId::A) &&
         x->lan(PlayerId::B) == y->lan(PlayerId::B);
}

const std::string& node_id(const GameState& s, NodeIndex n) { return s.board->graph().node(n).id; }

std::set<std::string> ids_of(const BoardGraph& board, const std::set<NodeIndex>& nodes) {
  std::set<std::string> out;
  for (auto n : nodes) out.insert(board.graph().node(n).id);
  return out;
}

template <typename V>
std::map<std::string, V> ids_of(const BoardGraph& board, const std::map<NodeIndex, V>& m) {
  std::map<std::string, V> out;
  for (const auto& [n, v] : m) out.emplace(board.graph().node(n).id, v);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Setup
// ---------------------------------------------------------------------------

SetupChoice SetupChoice::deal(const LanConfig& lan, const std::array<AttackType, 7>& attacks,
                              const std::array<int, 7>& defenses) {
  SetupChoice s;
  s.lan = lan;
  s.critical_computer = lan.critical().value_or("");
  std::vector<std::string> others;
  for (const auto& c : lan.computers)
    if (c.id != s.critical_computer) others.push_back(c.id);
  std::sort(others.begin(), others.end());
  for (std::size_t i = 0; i < others.size() && i < 7; ++i)
    s.assignments[others[i]] = CardAssignment{attacks[i], defenses[i]};
  return s;
}

std::vector<SetupIssue> check_setup(const SetupChoice& setup) {
  std::vector<SetupIssue> issues;
  if (auto problem = structural_problem(setup.lan)) {
    issues.push_back({"MalformedLan", "", *problem});
    return issues;
  }
  for (const auto& v : validate_lan(setup.lan).violations)
    issues.push_back({std::string(to_string(v.code)), v.subject, v.message});

  std::set<int> slots;
  for (const auto& r : setup.lan.routers) {
    if (r.anchor_slot < 0 || r.anchor_slot >= kAnchorSlots || !slots.insert(r.anchor_slot).second)
      issues.push_back({"AnchorMismatch", r.id,
                        "router '" + r.id + "' has anchor slot " + std::to_string(r.anchor_slot)});
  }

  const auto is_computer = [&](const std::string& id) {
    return setup.lan.kind_of(id) == PieceKind::Computer;
  };
  if (!is_computer(setup.critical_computer)) {
    issues.push_back({"UnknownComputer", setup.critical_computer,
                      "critical computer '" + setup.critical_computer + "' is not in the LAN"});
  } else if (setup.lan.critical() != setup.critical_computer) {
    issues.push_back({"CriticalMismatch", setup.critical_computer,
                      "LAN critical flag does not match the chosen critical computer"});
  }

  std::set<AttackType> attacks;
  std::set<int> defenses;
  for (const auto& [id, card] : setup.assignments) {
    if (!is_computer(id)) {
      issues.push_back({"UnknownComputer", id, "'" + id + "' is not a computer in the LAN"});
      continue;
    }
    if (id == setup.critical_computer) {
      issues.push_back({"CriticalHasCards", id, "the critical computer holds no cards"});
      continue;
    }
    if (!attacks.insert(card.attack).second)
      issues.push_back({"DuplicateAttack", std::string(to_string(card.attack)),
                        "attack '" + std::string(to_string(card.attack)) + "' dealt twice"});
    if (card.defense < 1 || card.defense > 8)
      issues.push_back({"InvalidDefense", id,
                        "defense package " + std::to_string(card.defense) + " does not exist"});
    else if (!defenses.insert(card.defense).second)
      issues.push_back({"DuplicateDefense", std::to_string(card.defense),
                        "defense package " + std::to_string(card.defense) + " dealt twice"});
  }
  for (const auto& c : setup.lan.computers) {
    if (c.id != setup.critical_computer && !setup.assignments.contains(c.id))
      issues.push_back({"MissingAssignment", c.id, "computer '" + c.id + "' has no cards"});
  }
  for (auto a : kAllAttacks) {
    if (!attacks.contains(a))
      issues.push_back({"MissingAttack", std::string(to_string(a)),
                        "attack '" + std::string(to_string(a)) + "' not dealt"});
  }
  return issues;
}

std::optional<std::string> config_problem(const GameConfig& config) {
  if (config.grid_size < kMinGridSize)
    return "grid_size must be at least " + std::to_string(kMinGridSize);
  if (config.grid_size > 64) return "grid_size must be at most 64";
  if (config.turn_cap < 1) return "turn_cap must be positive";
  return std::nullopt;
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::AwaitingSetup: return "awaiting_setup";
    case Phase::InPlay: return "in_play";
    case Phase::Finished: return "finished";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

const Ring* GameState::ring(int id) const {
  auto it = std::lower_bound(rings.begin(), rings.end(), id,
                             [](const Ring& r, int v) { return r.id < v; });
  return it != rings.end() && it->id == id ? &*it : nullptr;
}

bool GameState::operator==(const GameState& o) const {
  return phase == o.phase && config == o.config && same_board(board, o.board) &&
         setups == o.setups && sides == o.sides && rings == o.rings &&
         destroyed == o.destroyed && disabled_mesh == o.disabled_mesh &&
         knowledge == o.knowledge && captured == o.captured && turn == o.turn &&
         turn_count == o.turn_count && winner == o.winner && next_ring_id == o.next_ring_id;
}

bool PlayerView::operator==(const PlayerView& o) const {
  return viewer == o.viewer && phase == o.phase && turn == o.turn &&
         turn_count == o.turn_count && turn_cap == o.turn_cap && winner == o.winner &&
         same_board(board, o.board) && own_setup == o.own_setup &&
         opponent_setup == o.opponent_setup && rings == o.rings &&
         opponent_defenses == o.opponent_defenses && opponent_scouted == o.opponent_scouted &&
         own_defenses_revealed == o.own_defenses_revealed && attacks_seen == o.attacks_seen &&
         own_captured == o.own_captured && destroyed == o.destroyed &&
         disabled_mesh == o.disabled_mesh;
}

bool Move::operator==(const Move& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Spawn: return attack == o.attack;
    case Kind::Step: return ring == o.ring && to == o.to;
    case Kind::Pass: return true;
  }
  return false;
}

std::string describe(const Move& m) {
  switch (m.kind) {
    case Move::Kind::Spawn: return "spawn " + std::string(to_string(m.attack));
    case Move::Kind::Step: return "step ring " + std::to_string(m.ring) + " to " + m.to;
    case Move::Kind::Pass: return "pass";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

namespace {
constexpr std::array<std::string_view, 13> kEventNames = {
    "spawned",       "moved",          "attack_revealed",    "defense_revealed",
    "computer_destroyed", "mesh_disabled", "attack_destroyed", "attack_captured",
    "attack_transformed", "attack_reset", "worm_replicated",  "critical_scouted",
    "game_over"};
}

std::string_view to_string(EventKind k) { return kEventNames[static_cast<std::size_t>(k)]; }

std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (std::size_t i = 0; i < kEventNames.size(); ++i)
    if (kEventNames[i] == s) return static_cast<EventKind>(i);
  return std::nullopt;
}

bool attack_is_private(EventKind k) {
  return k == EventKind::Spawned || k == EventKind::Moved || k == EventKind::AttackTransformed;
}

std::optional<Event> filter_event(const Event& e, PlayerId viewer) {
  if (e.owner == viewer) return e;
  if (e.scope == Visibility::OwnerOnly) return std::nullopt;
  Event out = e;
  if (attack_is_private(e.kind)) out.attack.reset();
  return out;
}

std::vector<Event> filter_events(const std::vector<Event>& events, PlayerId viewer) {
  std::vector<Event> out;
  for (const auto& e : events)
    if (auto f = filter_event(e, viewer)) out.push_back(std::move(*f));
  return out;
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

RulesError::RulesError(Code code, std::string message, std::optional<PlayerId> player,
                       std::vector<SetupIssue> issues)
    : std::runtime_error(std::move(message)),
      code_(code),
      player_(player),
      issues_(std::move(issues)) {}

std::string_view to_string(RulesError::Code c) {
  switch (c) {
    case Code::InvalidSetup: return "InvalidSetup";
    case Code::InvalidConfig: return "InvalidConfig";
    case Code::NotYourTurn: return "NotYourTurn";
    case Code::GameNotInPlay: return "GameNotInPlay";
    case Code::IllegalMove: return "IllegalMove";
    case Code::DosOnComputer: return "DosOnComputer";
    case Code::SamePlayerRings: return "SamePlayerRings";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Decision tables
// ---------------------------------------------------------------------------

ComputerOutcome resolve_attack_on_computer(AttackType attack,
                                           const std::optional<DefensePackage>& defense) {
  if (attack == AttackType::Dos)
    throw RulesError(Code::DosOnComputer, "dos attacks cannot target computers");
  ComputerOutcome o;
  const bool defended = defense.has_value();
  if (defended && defense->blocks(attack)) {
    o.attack_revealed = true;
    o.defense_revealed = true;
    o.blocked = true;
    o.attack_removed = true;
    return o;
  }
  switch (attack) {
    case AttackType::Masquerade:
      o.scouts = true;
      return o;
    case AttackType::Virus:
      o.computer_destroyed = true;
      o.attack_reset = true;
      break;
    case AttackType::Worm:
      o.computer_destroyed = true;
      o.worm_replicates = true;
      break;
    case AttackType::Trojan:
      o.computer_destroyed = !defended || !defense->blocks(AttackType::Virus);
      o.attack_removed = true;
      break;
    case AttackType::Replay:
    case AttackType::Modification:
      o.attack_removed = true;
      break;
    case AttackType::Dos:
      break;
  }
  o.attack_revealed = true;
  o.defense_revealed = defended;
  return o;
}

AttackType transformed_type(AttackType current, Rng& rng) {
  std::array<AttackType, 6> others{};
  std::size_t n = 0;
  for (auto a : kAllAttacks)
    if (a != current) others[n++] = a;
  return others[uniform_index(rng, others.size())];
}

CombatOutcome resolve_attack_vs_attack(AttackType mover, AttackType stationary, Rng& rng,
                                       bool same_player) {
  if (same_player) throw RulesError(Code::SamePlayerRings, "rings belong to the same player");
  using R = CombatOutcome::Result;
  CombatOutcome o;
  if (mover == AttackType::Replay) {
    o.result = R::MoverCaptures;
  } else if (stationary == AttackType::Replay) {
    o.result = R::StationaryCaptures;
  } else if (mover == AttackType::Modification) {
    o.result = R::MoverTransforms;
    o.new_type = transformed_type(stationary, rng);
  } else if (stationary == AttackType::Modification) {
    o.result = R::StationaryTransforms;
    o.new_type = transformed_type(mover, rng);
  } else if (mover == AttackType::Masquerade) {
    o.result = R::PassThrough;
    o.revealed = false;
  } else {
    o.result = R::MutualDestruction;
  }
  return o;
}

// ---------------------------------------------------------------------------
// Views and move generation
// ---------------------------------------------------------------------------

std::tuple<int, int, int, std::string> perspective_key(const BoardGraph& board, NodeIndex node,
                                                       PlayerId viewer) {
  const auto& info = board.graph().node(node);
  if (!info.owner) {
    const int rows = viewer == PlayerId::A ? board.grid().height - 1 - info.y : info.y;
    return {1, rows, info.x, {}};
  }
  return {*info.owner == viewer ? 0 : 2, 0, 0, info.local_id};
}

bool enterable(const BoardGraph& board, const std::set<std::string>& disabled_mesh,
               NodeIndex node, std::optional<AttackType> ring_type) {
  const auto& info = board.graph().node(node);
  if (info.kind == NodeKind::MeshPoint && disabled_mesh.contains(info.id)) return false;
  if (info.kind == NodeKind::Computer && ring_type == AttackType::Dos) return false;
  return true;
}

PlayerView player_view(const GameState& s, PlayerId viewer) {
  const auto& board = *s.board;
  const auto me = index_of(viewer);
  const auto them = index_of(opponent(viewer));
  PlayerView v;
  v.viewer = viewer;
  v.phase = s.phase;
  v.turn = s.turn;
  v.turn_count = s.turn_count;
  v.turn_cap = s.config.turn_cap;
  v.winner = s.winner;
  v.board = s.board;
  v.own_setup = s.setups[me];
  if (s.phase == Phase::Finished) v.opponent_setup = s.setups[them];
  v.rings.reserve(s.rings.size());
  for (const auto& r : s.rings) {
    RingView rv;
    rv.id = r.id;
    rv.owner = r.owner;
    rv.position = node_id(s, r.position);
    rv.revealed = r.revealed;
    if (r.owner == viewer) {
      rv.type = r.type;
      rv.card = r.card;
    } else if (r.revealed) {
      rv.type = r.type;
    }
    v.rings.push_back(std::move(rv));
  }
  v.opponent_defenses = ids_of(board, s.knowledge[me].defenses);
  v.opponent_scouted = ids_of(board, s.knowledge[me].scouted);
  v.own_defenses_revealed = ids_of(board, s.knowledge[them].defenses);
  v.attacks_seen = s.knowledge[me].attacks_seen;
  for (const auto& [owner, card] : s.captured)
    if (owner == viewer) v.own_captured.insert(card);
  v.destroyed = ids_of(board, s.destroyed);
  v.disabled_mesh = ids_of(board, s.disabled_mesh);
  return v;
}

std::vector<Move> legal_moves(const PlayerView& v) {
  if (v.phase != Phase::InPlay) throw RulesError(Code::GameNotInPlay, "game is not in play");
  if (v.turn != v.viewer)
    throw RulesError(Code::NotYourTurn, "it is not this player's turn", v.viewer);
  const auto& board = *v.board;
  const auto& g = board.graph();

  std::unordered_map<std::string, bool> occupied;  // node id -> friendly ring present
  std::set<AttackType> cards_on_board;
  for (const auto& r : v.rings) {
    auto& f = occupied[r.position];
    f = f || r.owner == v.viewer;
    if (r.owner == v.viewer && r.card) cards_on_board.insert(*r.card);
  }

  std::vector<Move> moves;
  std::map<AttackType, std::string> origin;
  for (const auto& [computer, card] : v.own_setup.assignments) origin[card.attack] = computer;
  for (auto a : kAllAttacks) {
    auto it = origin.find(a);
    if (it == origin.end()) continue;
    const auto node = BoardGraph::lan_node_id(v.viewer, it->second);
    if (v.own_captured.contains(a) || cards_on_board.contains(a) || v.destroyed.contains(node) ||
        occupied.contains(node))
      continue;
    moves.push_back(Move::spawn(a));
  }

  std::vector<NodeIndex> targets;
  for (const auto& r : v.rings) {
    if (r.owner != v.viewer) continue;
    const auto from = g.at(r.position);
    targets.clear();
    for (auto n : g.adjacent(from)) {
      if (!enterable(board, v.disabled_mesh, n, r.type)) continue;
      auto occ = occupied.find(g.node(n).id);
      if (occ != occupied.end() && occ->second) continue;
      targets.push_back(n);
    }
    std::sort(targets.begin(), targets.end(), [&](NodeIndex x, NodeIndex y) {
      return perspective_key(board, x, v.viewer) < perspective_key(board, y, v.viewer);
    });
    for (auto n : targets) moves.push_back(Move::step(r.id, g.node(n).id));
  }

  if (moves.empty()) moves.push_back(Move::pass());
  return moves;
}

std::vector<Move> legal_moves(const GameState& state, PlayerId player) {
  if (state.phase != Phase::InPlay) throw RulesError(Code::GameNotInPlay, "game is not in play");
  if (state.turn != player)
    throw RulesError(Code::NotYourTurn, "it is not this player's turn", player);
  return legal_moves(player_view(state, player));
}

// ---------------------------------------------------------------------------
// Transitions
// ---------------------------------------------------------------------------

GameState new_game(const SetupChoice& setup_a, const SetupChoice& setup_b,
                   const GameConfig& config) {
  if (auto problem = config_problem(config)) throw RulesError(Code::InvalidConfig, *problem);
  for (auto p : kPlayers) {
    const auto& setup = p == PlayerId::A ? setup_a : setup_b;
    auto issues = check_setup(setup);
    if (!issues.empty()) {
      std::string msg = "invalid setup for player " + std::string(to_string(p)) + ": " +
                        issues.front().code;
      if (!issues.front().subject.empty()) msg += " (" + issues.front().subject + ")";
      throw RulesError(Code::InvalidSetup, msg, p, std::move(issues));
    }
  }

  GameState s;
  s.config = config;
  s.board = std::make_shared<const BoardGraph>(
      build_board(setup_a.lan, setup_b.lan, InternetGrid::square(config.grid_size)));
  s.setups = {setup_a, setup_b};
  for (auto p : kPlayers) {
    auto& side = s.sides[index_of(p)];
    const auto& setup = s.setups[index_of(p)];
    side.critical = s.board->node_of(p, setup.critical_computer);
    for (const auto& [computer, card] : setup.assignments) {
      const auto n = s.board->node_of(p, computer);
      side.cards[n] = card;
      side.origin[card.attack] = n;
    }
  }
  s.phase = Phase::InPlay;
  s.turn = config.first_mover;
  return s;
}

namespace {

/// Mutable working copy for one transition.
class Resolver {
 public:
  Resolver(GameState& s, std::vector<Event>& ev) : s_(s), ev_(ev) {}

  Ring& ring(int id) {
    auto it = std::lower_bound(s_.rings.begin(), s_.rings.end(), id,
                               [](const Ring& r, int v) { return r.id < v; });
    return *it;
  }

  void remove(int id) {
    std::erase_if(s_.rings, [id](const Ring& r) { return r.id == id; });
  }

  int add_ring(PlayerId owner, AttackType card, AttackType type, NodeIndex at, bool revealed) {
    Ring r;
    r.id = s_.next_ring_id++;
    r.owner = owner;
    r.card = card;
    r.type = type;
    r.position = at;
    r.revealed = revealed;
    s_.rings.push_back(r);
    return r.id;
  }

  const std::string& id(NodeIndex n) const { return node_id(s_, n); }

  bool ring_at(NodeIndex n) const {
    return std::any_of(s_.rings.begin(), s_.rings.end(),
                       [n](const Ring& r) { return r.position == n; });
  }

  void emit(Event e) { ev_.push_back(std::move(e)); }

  void reveal(int ring_id, const std::string& node, const std::string& from) {
    auto& r = ring(ring_id);
    r.revealed = true;
    s_.knowledge[index_of(opponent(r.owner))].attacks_seen.insert({r.id, r.type});
    Event e;
    e.kind = EventKind::AttackRevealed;
    e.owner = r.owner;
    e.ring = r.id;
    e.node = node;
    e.from = from;
    e.attack = r.type;
    emit(std::move(e));
  }

  void ring_event(EventKind kind, int ring_id, const std::string& node,
                  std::optional<AttackType> attack = std::nullopt, std::string from = {}) {
    const auto& r = ring(ring_id);
    Event e;
    e.kind = kind;
    e.owner = r.owner;
    e.ring = r.id;
    e.node = node;
    e.from = std::move(from);
    e.attack = attack;
    emit(std::move(e));
  }

  void destroy_ring(int ring_id, const std::string& node) {
    ring_event(EventKind::AttackDestroyed, ring_id, node);
    remove(ring_id);
  }

  void capture_ring(int ring_id, const std::string& node) {
    const auto& r = ring(ring_id);
    s_.captured.insert({r.owner, r.card});
    ring_event(EventKind::AttackCaptured, ring_id, node, r.type);
    remove(ring_id);
  }

  void finish(std::optional<PlayerId> winner) {
    s_.phase = Phase::Finished;
    s_.winner = winner;
    Event e;
    e.kind = EventKind::GameOver;
    e.owner = winner.value_or(s_.turn);
    e.winner = winner;
    emit(std::move(e));
  }

  void spawn(PlayerId player, AttackType attack) {
    const auto origin = s_.sides[index_of(player)].origin.at(attack);
    const int id = add_ring(player, attack, attack, origin, false);
    ring_event(EventKind::Spawned, id, this->id(origin), attack);
  }

  void step(PlayerId player, int ring_id, NodeIndex to) {
    const std::string from = id(ring(ring_id).position);
    const std::string& target = id(to);
    bool announced = false;  // a Moved event already placed the ring

    // Fight the lowest-id enemy ring on the target node.
    const Ring* enemy = nullptr;
    for (const auto& r : s_.rings)
      if (r.position == to && r.owner != player) {
        enemy = &r;
        break;
      }
    if (enemy) {
      const int enemy_id = enemy->id;
      auto rng = make_rng({s_.config.seed, static_cast<std::uint64_t>(s_.turn_count),
                           kModificationStream});
      const auto outcome = resolve_attack_vs_attack(ring(ring_id).type, enemy->type, rng);
      using R = CombatOutcome::Result;
      if (outcome.result == R::PassThrough) {
        move_to(ring_id, to, from);
        announced = true;
      } else {
        ring(ring_id).position = to;
        reveal(ring_id, target, from);
        reveal(enemy_id, target, {});
        switch (outcome.result) {
          case R::MoverCaptures:
            capture_ring(enemy_id, target);
            destroy_ring(ring_id, target);
            return;
          case R::StationaryCaptures:
            capture_ring(ring_id, target);
            destroy_ring(enemy_id, target);
            return;
          case R::MoverTransforms:
            transform(enemy_id, *outcome.new_type, target);
            destroy_ring(ring_id, target);
            return;
          case R::StationaryTransforms:
            transform(ring_id, *outcome.new_type, target);
            destroy_ring(enemy_id, target);
            return;
          case R::MutualDestruction:
            destroy_ring(ring_id, target);
            destroy_ring(enemy_id, target);
            return;
          case R::PassThrough:
            break;
        }
      }
    }

    const auto& info = s_.board->graph().node(to);
    const bool enemy_node = info.owner && *info.owner != player;
    if (enemy_node && info.kind == NodeKind::Computer && !s_.destroyed.contains(to)) {
      attack_computer(player, ring_id, to, from, announced);
      return;
    }
    if (enemy_node && info.kind == NodeKind::MeshPoint && ring(ring_id).type == AttackType::Dos) {
      ring(ring_id).position = to;
      reveal(ring_id, target, from);
      s_.disabled_mesh.insert(to);
      Event e;
      e.kind = EventKind::MeshDisabled;
      e.owner = *info.owner;
      e.node = target;
      emit(std::move(e));
      destroy_ring(ring_id, target);
      return;
    }
    if (!announced) move_to(ring_id, to, from);
  }

 private:
  void move_to(int ring_id, NodeIndex to, const std::string& from) {
    auto& r = ring(ring_id);
    r.position = to;
    ring_event(EventKind::Moved, ring_id, id(to), r.type, from);
  }

  void transform(int ring_id, AttackType new_type, const std::string& node) {
    auto& r = ring(ring_id);
    r.type = new_type;
    r.revealed = false;
    ring_event(EventKind::AttackTransformed, ring_id, node, new_type);
  }

  void attack_computer(PlayerId player, int ring_id, NodeIndex to, const std::string& from,
                       bool announced) {
    const PlayerId defender = opponent(player);
    const auto& side = s_.sides[index_of(defender)];
    const bool critical = to == side.critical;
    std::optional<DefensePackage> defense;
    if (!critical) defense = shipped_table().package(side.cards.at(to).defense);

    const std::string& target = id(to);
    const auto type = ring(ring_id).type;
    const auto o = resolve_attack_on_computer(type, defense);

    if (o.scouts) {
      if (!announced) move_to(ring_id, to, from);
      s_.knowledge[index_of(player)].scouted[to] = critical;
      Event e;
      e.kind = EventKind::CriticalScouted;
      e.owner = player;
      e.scope = Visibility::OwnerOnly;
      e.ring = ring_id;
      e.node = target;
      e.critical = critical;
      emit(std::move(e));
      return;
    }

    ring(ring_id).position = to;
    if (o.attack_revealed) reveal(ring_id, target, announced ? std::string() : from);
    if (o.defense_revealed) {
      s_.knowledge[index_of(player)].defenses[to] = defense->id();
      Event e;
      e.kind = EventKind::DefenseRevealed;
      e.owner = defender;
      e.node = target;
      e.package = defense->id();
      emit(std::move(e));
    }
    if (o.computer_destroyed) {
      s_.destroyed.insert(to);
      Event e;
      e.kind = EventKind::ComputerDestroyed;
      e.owner = defender;
      e.node = target;
      e.critical = critical;
      emit(std::move(e));
      if (critical) {
        finish(player);
        return;
      }
    }
    if (o.attack_removed) {
      destroy_ring(ring_id, target);
      return;
    }
    if (o.attack_reset) {
      const auto& r = ring(ring_id);
      const auto origin = s_.sides[index_of(player)].origin.at(r.card);
      Event e;
      e.kind = EventKind::AttackReset;
      e.owner = player;
      e.ring = ring_id;
      e.from = target;
      if (!s_.destroyed.contains(origin) && !ring_at_except(origin, ring_id)) {
        ring(ring_id).position = origin;
        e.node = id(origin);
      } else {
        remove(ring_id);
      }
      emit(std::move(e));
      return;
    }
    if (o.worm_replicates) {
      const auto worm_like = std::count_if(s_.rings.begin(), s_.rings.end(), [&](const Ring& r) {
        return r.owner == player && (r.card == AttackType::Worm || r.type == AttackType::Worm);
      });
      if (worm_like < kWormRingCap) {
        const int replica = add_ring(player, AttackType::Worm, AttackType::Worm, to, true);
        s_.knowledge[index_of(defender)].attacks_seen.insert({replica, AttackType::Worm});
        ring_event(EventKind::WormReplicated, replica, target, AttackType::Worm);
      }
    }
  }

  bool ring_at_except(NodeIndex n, int except) const {
    return std::any_of(s_.rings.begin(), s_.rings.end(),
                       [&](const Ring& r) { return r.position == n && r.id != except; });
  }

  GameState& s_;
  std::vector<Event>& ev_;
};

std::string illegal_reason(const GameState& s, PlayerId player, const Move& move) {
  switch (move.kind) {
    case Move::Kind::Pass: return "pass is only allowed when no other move exists";
    case Move::Kind::Spawn: {
      const auto& side = s.sides[index_of(player)];
      if (s.captured.contains({player, move.attack})) return "attack card was captured";
      const auto origin = side.origin.at(move.attack);
      if (s.destroyed.contains(origin)) return "origin computer is destroyed";
      for (const auto& r : s.rings) {
        if (r.owner == player && r.card == move.attack) return "attack is already on the board";
        if (r.position == origin) return "origin computer is occupied";
      }
      return "spawn not available";
    }
    case Move::Kind::Step: {
      const Ring* r = s.ring(move.ring);
      if (!r) return "unknown ring " + std::to_string(move.ring);
      if (r->owner != player) return "ring belongs to the opponent";
      auto to = s.board->graph().find(move.to);
      if (!to) return "unknown node '" + move.to + "'";
      if (!s.board->graph().has_edge(r->position, *to)) return "destination is not adjacent";
      const auto& info = s.board->graph().node(*to);
      if (info.kind == NodeKind::MeshPoint && s.disabled_mesh.contains(*to))
        return "mesh point is disabled";
      if (info.kind == NodeKind::Computer && r->type == AttackType::Dos)
        return "dos attacks cannot enter computers";
      return "destination is occupied by a friendly ring";
    }
  }
  return "illegal move";
}

}  // namespace

Transition apply_move(const GameState& state, PlayerId player, const Move& move) {
  const auto legal = legal_moves(state, player);
  if (std::find(legal.begin(), legal.end(), move) == legal.end())
    throw RulesError(Code::IllegalMove, illegal_reason(state, player, move), player);

  Transition t{state, {}};
  Resolver res(t.state, t.events);
  switch (move.kind) {
    case Move::Kind::Spawn: res.spawn(player, move.attack); break;
    case Move::Kind::Step: res.step(player, move.ring, t.state.board->graph().at(move.to)); break;
    case Move::Kind::Pass: break;
  }
  auto& s = t.state;
  s.turn = opponent(player);
  s.turn_count += 1;
  if (s.phase == Phase::InPlay && s.turn_count >= s.config.turn_cap) res.finish(std::nullopt);
  return t;
}

Transition resign(const GameState& state, PlayerId player) {
  if (state.phase != Phase::InPlay) throw RulesError(Code::GameNotInPlay, "game is not in play");
  Transition t{state, {}};
  Resolver res(t.state, t.events);
  res.finish(opponent(player));
  return t;
}

}  // namespace pnd
