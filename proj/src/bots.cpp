#include "pnd/bots.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <thread>

#include "pnd/balance_sim.hpp"

namespace pnd {

std::string_view to_string(BotKind k) { return k == BotKind::Random ? "random" : "scout"; }

std::optional<BotKind> parse_bot_kind(std::string_view s) {
  if (s == "random") return BotKind::Random;
  if (s == "scout") return BotKind::Scout;
  return std::nullopt;
}

void BotMemory::observe(const std::vector<Event>& events, PlayerId me) {
  const PlayerId them = opponent(me);
  for (const auto& e : events) {
    switch (e.kind) {
      case EventKind::DefenseRevealed:
        if (e.owner == them && e.package) defenses[e.node] = *e.package;
        break;
      case EventKind::CriticalScouted:
        if (e.owner == me && e.critical) scouted[e.node] = *e.critical;
        break;
      case EventKind::ComputerDestroyed:
        if (e.owner == them) destroyed.insert(e.node);
        break;
      case EventKind::AttackRevealed:
        if (e.owner == me && e.attack && e.node.starts_with(BoardGraph::lan_node_id(them, "")))
          attempted[e.node].insert(*e.attack);
        break;
      default:
        break;
    }
  }
}

Move random_bot_move(const PlayerView& view, Rng& rng) {
  const auto moves = legal_moves(view);
  return moves[uniform_index(rng, moves.size())];
}

namespace {

constexpr std::array<AttackType, 3> kKillers = {AttackType::Virus, AttackType::Worm,
                                                AttackType::Trojan};

bool destructive(AttackType a) {
  return a == AttackType::Virus || a == AttackType::Worm || a == AttackType::Trojan;
}

/// The four attacks that act on computers: Virus, then ascending blocker
/// count. The remaining types follow in attack order.
std::vector<AttackType> probe_order() {
  std::vector<AttackType> order(kAllAttacks.begin(), kAllAttacks.end());
  auto rank = [](AttackType a) {
    if (a == AttackType::Virus) return 0;
    if (destructive(a) || a == AttackType::Masquerade) return 1 + blocker_count(a);
    return 100;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](AttackType x, AttackType y) { return rank(x) < rank(y); });
  return order;
}

/// Destructive attacks first, then Masquerade, then the rest; each group in
/// probe order. Types the package blocks are dropped.
std::vector<AttackType> retarget_order(int package) {
  const auto& pkg = shipped_table().package(package);
  std::vector<AttackType> out;
  const auto base = probe_order();
  for (auto a : base)
    if (destructive(a) && !pkg.blocks(a)) out.push_back(a);
  if (!pkg.blocks(AttackType::Masquerade)) out.push_back(AttackType::Masquerade);
  for (auto a : base)
    if (!destructive(a) && a != AttackType::Masquerade && !pkg.blocks(a)) out.push_back(a);
  return out;
}

class Planner {
 public:
  Planner(const PlayerView& v, const BotMemory& m)
      : v_(v), m_(m), b_(*v.board), g_(b_.graph()), me_(v.viewer), them_(opponent(v.viewer)) {
    for (const auto& id : v.destroyed) destroyed_.insert(g_.at(id));
    for (const auto& id : m.destroyed) destroyed_.insert(g_.at(id));
    for (const auto& id : v.disabled_mesh) disabled_.insert(g_.at(id));
    for (const auto& r : v.rings) {
      if (r.owner == me_) {
        own_.push_back(&r);
      } else {
        enemy_rings_.insert(g_.at(r.position));
      }
    }
    for (const auto& c : b_.lan(them_).computers) enemy_computers_.push_back(b_.node_of(them_, c.id));
    sort_by_key(enemy_computers_);
  }

  const std::vector<const RingView*>& own() const { return own_; }
  NodeIndex node(const std::string& id) const { return g_.at(id); }
  const std::string& id(NodeIndex n) const { return g_.node(n).id; }

  std::vector<NodeIndex> live_enemy_computers() const {
    std::vector<NodeIndex> out;
    for (auto c : enemy_computers_)
      if (!destroyed_.contains(c)) out.push_back(c);
    return out;
  }

  std::optional<int> known_defense(NodeIndex c) const {
    auto it = m_.defenses.find(id(c));
    if (it != m_.defenses.end()) return it->second;
    auto vt = v_.opponent_defenses.find(id(c));
    if (vt != v_.opponent_defenses.end()) return vt->second;
    return std::nullopt;
  }

  std::optional<bool> scouted(NodeIndex c) const {
    auto it = m_.scouted.find(id(c));
    if (it != m_.scouted.end()) return it->second;
    auto vt = v_.opponent_scouted.find(id(c));
    if (vt != v_.opponent_scouted.end()) return vt->second;
    return std::nullopt;
  }

  std::optional<NodeIndex> critical() const {
    std::vector<NodeIndex> candidates;
    for (auto c : live_enemy_computers()) {
      auto s = scouted(c);
      if (s && *s) return c;
      if ((s && !*s) || known_defense(c)) continue;
      candidates.push_back(c);
    }
    if (candidates.size() == 1) return candidates.front();
    return std::nullopt;
  }

  /// Entering this node starts a fight or is impossible for `type`; such
  /// nodes only appear as path endpoints.
  bool closed(NodeIndex n, AttackType type, bool avoid_rings) const {
    if (avoid_rings && enemy_rings_.contains(n)) return true;
    const auto& info = g_.node(n);
    if (info.kind == NodeKind::MeshPoint && disabled_.contains(n)) return true;
    if (info.kind == NodeKind::Computer && type == AttackType::Dos) return true;
    if (info.owner == them_) {
      if (info.kind == NodeKind::Computer && !destroyed_.contains(n)) return true;
      if (info.kind == NodeKind::MeshPoint && type == AttackType::Dos) return true;
    }
    return false;
  }

  /// Goals the ring of `type` should head for.
  std::vector<NodeIndex> goals(AttackType type) const {
    std::vector<NodeIndex> out;
    switch (type) {
      case AttackType::Dos:
        // Disabled mesh points close paths for both sides.
        break;
      case AttackType::Replay:
      case AttackType::Modification:
        // Burn out on a computer to expose its package.
        for (auto c : live_enemy_computers())
          if (!known_defense(c)) out.push_back(c);
        break;
      case AttackType::Masquerade:
        for (auto c : live_enemy_computers()) {
          auto d = known_defense(c);
          if (!scouted(c) && !(d && shipped_table().package(*d).blocks(type))) out.push_back(c);
        }
        break;
      default:
        for (auto c : live_enemy_computers()) {
          auto d = known_defense(c);
          if (!(d && shipped_table().package(*d).blocks(type))) out.push_back(c);
        }
        break;
    }
    return out;
  }

  /// Distances to `goal` walking only through open nodes.
  std::vector<int> distances_to(NodeIndex goal, AttackType type, bool avoid_rings) const {
    return g_.distances_from(goal, [&](NodeIndex n) { return !closed(n, type, avoid_rings); });
  }

  /// Nearest goal from `from`, ties broken by perspective order.
  std::optional<std::pair<NodeIndex, int>> nearest(NodeIndex from, AttackType type,
                                                   const std::vector<NodeIndex>& goal_list) const {
    if (auto n = nearest(from, type, goal_list, true)) return n;
    return nearest(from, type, goal_list, false);
  }

  std::optional<std::pair<NodeIndex, int>> nearest(NodeIndex from, AttackType type,
                                                   const std::vector<NodeIndex>& goal_list,
                                                   bool avoid_rings) const {
    if (goal_list.empty()) return std::nullopt;
    std::vector<int> dist(g_.size(), -1);
    std::deque<NodeIndex> q{from};
    dist[from] = 0;
    while (!q.empty()) {
      const auto u = q.front();
      q.pop_front();
      if (u != from && closed(u, type, avoid_rings)) continue;
      for (auto w : g_.adjacent(u)) {
        if (dist[w] >= 0) continue;
        const bool is_goal = std::find(goal_list.begin(), goal_list.end(), w) != goal_list.end();
        if (closed(w, type, avoid_rings) && !is_goal) continue;
        dist[w] = dist[u] + 1;
        q.push_back(w);
      }
    }
    std::optional<std::pair<NodeIndex, int>> best;
    for (auto goal : goal_list) {
      if (goal == from || dist[goal] < 0) continue;
      if (!best || dist[goal] < best->second ||
          (dist[goal] == best->second && key(goal) < key(best->first)))
        best = std::make_pair(goal, dist[goal]);
    }
    return best;
  }

  /// Best legal step for `ring` toward `goal`, with the remaining distance.
  /// Enemy rings are walked around when another route exists.
  std::optional<std::pair<Move, int>> step_toward(const RingView& ring, NodeIndex goal,
                                                  const std::vector<Move>& legal) const {
    if (auto s = step_toward(ring, goal, legal, true)) return s;
    return step_toward(ring, goal, legal, false);
  }

  std::optional<std::pair<Move, int>> step_toward(const RingView& ring, NodeIndex goal,
                                                  const std::vector<Move>& legal,
                                                  bool avoid_rings) const {
    const auto type = *ring.type;
    const auto dist = distances_to(goal, type, avoid_rings);
    std::optional<std::pair<Move, int>> best;
    std::tuple<int, int, int, std::string> best_key;
    for (const auto& m : legal) {
      if (m.kind != Move::Kind::Step || m.ring != ring.id) continue;
      const auto to = node(m.to);
      const int d = to == goal ? 0 : dist[to];
      if (d < 0) continue;
      const auto k = key(to);
      if (!best || d < best->second || (d == best->second && k < best_key)) {
        best = std::make_pair(m, d);
        best_key = k;
      }
    }
    return best;
  }

  std::tuple<int, int, int, std::string> key(NodeIndex n) const {
    return perspective_key(b_, n, me_);
  }

  void sort_by_key(std::vector<NodeIndex>& nodes) const {
    std::sort(nodes.begin(), nodes.end(), [&](NodeIndex x, NodeIndex y) { return key(x) < key(y); });
  }

  /// Live enemy computer with a revealed defense, nearest our side first.
  std::optional<int> focus_package() const {
    for (auto c : live_enemy_computers())
      if (auto d = known_defense(c)) return d;
    return std::nullopt;
  }

 private:
  const PlayerView& v_;
  const BotMemory& m_;
  const BoardGraph& b_;
  const Graph& g_;
  PlayerId me_;
  PlayerId them_;
  std::set<NodeIndex> destroyed_;
  std::set<NodeIndex> disabled_;
  std::set<NodeIndex> enemy_rings_;
  std::vector<NodeIndex> enemy_computers_;
  std::vector<const RingView*> own_;
};

bool contains(const std::vector<Move>& moves, const Move& m) {
  return std::find(moves.begin(), moves.end(), m) != moves.end();
}

std::optional<Move> first_spawn(const std::vector<Move>& legal, const std::vector<AttackType>& order) {
  for (auto a : order)
    if (contains(legal, Move::spawn(a))) return Move::spawn(a);
  return std::nullopt;
}

constexpr int kProbesInFlight = 4;

Move choose_scout_move(const PlayerView& view, const BotMemory& memory, Rng& rng) {
  const auto legal = legal_moves(view);
  if (legal.size() == 1) return legal.front();
  const Planner plan(view, memory);

  // Endgame: drive a destructive attack at the known critical computer.
  if (auto critical = plan.critical()) {
    std::optional<std::pair<Move, int>> best;
    for (const auto* r : plan.own()) {
      if (!r->type || !destructive(*r->type)) continue;
      auto s = plan.step_toward(*r, *critical, legal);
      if (s && (!best || s->second < best->second)) best = s;
    }
    if (best) return best->first;
    if (auto spawn = first_spawn(legal, {kKillers.begin(), kKillers.end()})) return *spawn;
  }

  if (static_cast<int>(plan.own().size()) < kProbesInFlight) {
    const auto focus = plan.focus_package();
    if (auto spawn = first_spawn(legal, focus ? retarget_order(*focus) : probe_order()))
      return *spawn;
  }

  // Advance whichever probe is closest to something it can hurt.
  std::optional<std::pair<Move, int>> best;
  int best_ring = 0;
  for (const auto* r : plan.own()) {
    if (!r->type) continue;
    const auto target = plan.nearest(plan.node(r->position), *r->type, plan.goals(*r->type));
    if (!target) continue;
    auto s = plan.step_toward(*r, target->first, legal);
    if (!s) continue;
    if (!best || s->second < best->second || (s->second == best->second && r->id < best_ring)) {
      best = s;
      best_ring = r->id;
    }
  }
  if (best) return best->first;

  if (auto spawn = first_spawn(legal, probe_order())) return *spawn;
  return legal[uniform_index(rng, legal.size())];
}

}  // namespace

std::optional<std::string> known_critical(const PlayerView& view, const BotMemory& memory) {
  const Planner plan(view, memory);
  if (auto c = plan.critical()) return plan.id(*c);
  return std::nullopt;
}

std::pair<Move, BotMemory> scout_bot_move(const PlayerView& view, const BotMemory& memory,
                                          Rng& rng) {
  return {choose_scout_move(view, memory, rng), memory};
}

Move bot_move(BotKind kind, const PlayerView& view, BotMemory& memory, Rng& rng) {
  if (kind == BotKind::Random) return random_bot_move(view, rng);
  auto [move, next] = scout_bot_move(view, memory, rng);
  memory = std::move(next);
  return move;
}

SetupChoice random_setup(const LanConfig& lan, Rng& rng) {
  std::array<AttackType, 7> attacks = kAllAttacks;
  shuffle(rng, std::span<AttackType>(attacks));
  std::array<int, 8> packages = {1, 2, 3, 4, 5, 6, 7, 8};
  shuffle(rng, std::span<int>(packages));
  std::array<int, 7> defenses{};
  std::copy_n(packages.begin(), 7, defenses.begin());
  return SetupChoice::deal(lan, attacks, defenses);
}

SetupChoice dual_community_setup(Rng& rng) { return random_setup(fig8_dual_community(), rng); }

namespace {
constexpr std::uint64_t kSetupStream = 0x5e7u;
constexpr std::uint64_t kBotStream = 0xb07u;
constexpr std::uint64_t kGameStream = 0x9a3eu;
}  // namespace

GameResult self_play(BotKind bot_a, BotKind bot_b, std::uint64_t seed,
                     const SelfPlayOptions& options) {
  const PlayerId first = options.first_mover;
  auto role = [&](PlayerId p) -> std::uint64_t { return p == first ? 0 : 1; };

  std::array<SetupChoice, 2> setups;
  std::array<Rng, 2> rngs;
  for (auto p : kPlayers) {
    auto setup_rng = make_rng({seed, role(p), kSetupStream});
    setups[index_of(p)] =
        random_setup(p == PlayerId::A ? options.lan_a : options.lan_b, setup_rng);
    rngs[index_of(p)] = make_rng({seed, role(p), kBotStream});
  }

  GameConfig config;
  config.grid_size = options.grid_size;
  config.turn_cap = options.turn_cap;
  config.first_mover = first;
  config.seed = derive_seed({seed, kGameStream});

  GameResult result;
  result.log.config = config;
  result.log.setups = setups;
  GameState state = new_game(setups[0], setups[1], config);
  std::array<BotMemory, 2> memory;
  const std::array<BotKind, 2> kinds = {bot_a, bot_b};

  while (state.phase == Phase::InPlay) {
    const PlayerId p = state.turn;
    const auto view = player_view(state, p);
    const Move move = bot_move(kinds[index_of(p)], view, memory[index_of(p)], rngs[index_of(p)]);
    auto t = apply_move(state, p, move);
    for (auto q : kPlayers) memory[index_of(q)].observe(filter_events(t.events, q), q);
    result.log.records.push_back(LogRecord{state.turn_count, p, move, std::move(t.events)});
    state = std::move(t.state);
  }
  result.winner = state.winner;
  result.turns = state.turn_count;
  result.final_state = std::move(state);
  return result;
}

TournamentSummary tournament(BotKind bot_a, BotKind bot_b, int games, std::uint64_t seed,
                             const SelfPlayOptions& options, unsigned threads) {
  struct Outcome {
    std::optional<PlayerId> winner;
    int turns = 0;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(std::max(games, 0)));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SelfPlayOptions o = options;
      o.first_mover = i % 2 == 0 ? PlayerId::A : PlayerId::B;
      auto r = self_play(bot_a, bot_b, derive_seed({seed, i}), o);
      outcomes[i] = Outcome{r.winner, r.turns};
    }
  };
  const std::size_t n = outcomes.size();
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  if (threads <= 1 || n <= 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t b = 0; b < n; b += chunk) pool.emplace_back(work, b, std::min(n, b + chunk));
  }

  TournamentSummary s{bot_a, bot_b, games, 0, 0, 0, 0.0, seed};
  long long turns = 0;
  for (const auto& o : outcomes) {
    if (!o.winner) ++s.draws;
    else if (*o.winner == PlayerId::A) ++s.wins_a;
    else ++s.wins_b;
    turns += o.turns;
  }
  s.mean_turns = games > 0 ? static_cast<double>(turns) / games : 0.0;
  return s;
}

void write_tournament_csv(std::ostream& out, const std::vector<TournamentSummary>& rows) {
  out << "bot_a,bot_b,games,wins_a,wins_b,draws,mean_turns,seed\n";
  for (const auto& r : rows)
    out << to_string(r.bot_a) << ',' << to_string(r.bot_b) << ',' << r.games << ',' << r.wins_a
        << ',' << r.wins_b << ',' << r.draws << ',' << format_number(r.mean_turns) << ','
        << r.seed << '\n';
}

}  // namespace pnd
