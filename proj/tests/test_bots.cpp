#include <doctest.h>

#include <sstream>

#include "pnd/bots.hpp"
#include "test_helpers.hpp"

using namespace pnd;
using enum AttackType;

namespace {

GameState fresh() { return new_game(test::ordered_setup(), test::ordered_setup()); }

Move scout(const GameState& s, const BotMemory& m = {}) {
  Rng rng(1);
  return scout_bot_move(player_view(s, s.turn), m, rng).first;
}

}  // namespace

TEST_CASE("scout opens with a virus") {
  CHECK(scout(fresh()) == Move::spawn(Virus));
}

TEST_CASE("scout fills four probes before advancing") {
  GameState s = fresh();
  std::vector<Move> opening;
  for (int i = 0; i < 4; ++i) {
    opening.push_back(scout(s));
    s = apply_move(s, PlayerId::A, opening.back()).state;
    s = apply_move(s, PlayerId::B, legal_moves(s, PlayerId::B).front()).state;
  }
  CHECK(opening == std::vector{Move::spawn(Virus), Move::spawn(Masquerade), Move::spawn(Trojan),
                               Move::spawn(Worm)});
  CHECK(scout(s).kind == Move::Kind::Step);
}

TEST_CASE("a revealed package changes the next spawn") {
  BotMemory m;
  m.defenses["b:c3"] = 3;  // stops Worm, Virus and Trojan
  CHECK(scout(fresh(), m) == Move::spawn(Masquerade));
  m.defenses.clear();
  m.defenses["b:c6"] = 6;  // stops Virus, Replay and Masquerade
  CHECK(scout(fresh(), m) == Move::spawn(Trojan));
  m.destroyed.insert("b:c6");
  CHECK(scout(fresh(), m) == Move::spawn(Virus));
}

TEST_CASE("critical computer from scouting or elimination") {
  const auto s = fresh();
  const auto view = player_view(s, PlayerId::A);
  BotMemory m;
  CHECK_FALSE(known_critical(view, m).has_value());
  m.scouted["b:c5"] = true;
  CHECK(known_critical(view, m) == "b:c5");

  BotMemory e;
  for (int i = 1; i <= 4; ++i) e.defenses["b:c" + std::to_string(i)] = i;
  e.scouted["b:c5"] = false;
  e.destroyed.insert("b:c6");
  CHECK_FALSE(known_critical(view, e).has_value());
  e.destroyed.insert("b:c7");
  CHECK(known_critical(view, e) == "b:c8");
}

TEST_CASE("scout drives a killer at the known critical computer") {
  GameState s = fresh();
  Ring r;
  r.id = s.next_ring_id++;
  r.owner = PlayerId::A;
  r.card = r.type = Virus;
  r.position = s.board->graph().at("b:m4");
  s.rings.push_back(r);
  BotMemory m;
  m.scouted["b:c8"] = true;
  const auto move = scout(s, m);
  CHECK(move == Move::step(r.id, "b:c8"));
  const auto t = apply_move(s, PlayerId::A, move);
  CHECK(t.state.winner == PlayerId::A);
}

TEST_CASE("memory learns only from filtered events") {
  const auto s = fresh();
  GameState g = s;
  Ring r;
  r.id = g.next_ring_id++;
  r.owner = PlayerId::A;
  r.card = r.type = Masquerade;
  r.position = g.board->graph().at("b:m1");
  g.rings.push_back(r);
  const auto t = apply_move(g, PlayerId::A, Move::step(r.id, "b:c2"));
  BotMemory a, b;
  a.observe(filter_events(t.events, PlayerId::A), PlayerId::A);
  b.observe(filter_events(t.events, PlayerId::B), PlayerId::B);
  CHECK(a.scouted == std::map<std::string, bool>{{"b:c2", false}});
  CHECK(b == BotMemory{});

  GameState h = s;
  r.card = r.type = Worm;
  r.position = h.board->graph().at("b:m1");
  h.rings.push_back(r);
  h.next_ring_id = r.id + 1;
  const auto u = apply_move(h, PlayerId::A, Move::step(r.id, "b:c1"));
  a = {};
  a.observe(filter_events(u.events, PlayerId::A), PlayerId::A);
  CHECK(a.defenses == std::map<std::string, int>{{"b:c1", 1}});
  CHECK(a.attempted.at("b:c1") == std::set{Worm});
}

TEST_CASE("random bot picks legal moves") {
  GameState s = fresh();
  Rng rng(4);
  for (int i = 0; i < 200 && s.phase == Phase::InPlay; ++i) {
    const auto view = player_view(s, s.turn);
    const auto m = random_bot_move(view, rng);
    const auto legal = legal_moves(s, s.turn);
    REQUIRE(std::find(legal.begin(), legal.end(), m) != legal.end());
    s = apply_move(s, s.turn, m).state;
  }
}

TEST_CASE("random setups are valid") {
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const auto a = random_setup(fig5_default(), rng);
    CHECK(check_setup(a).empty());
    const auto b = dual_community_setup(rng);
    CHECK(check_setup(b).empty());
    CHECK(b.lan == fig8_dual_community());
    CHECK(b.critical_computer == "c8");
  }
}

TEST_CASE("self-play is deterministic") {
  const auto x = self_play(BotKind::Scout, BotKind::Random, 1234);
  const auto y = self_play(BotKind::Scout, BotKind::Random, 1234);
  CHECK(x.log.records == y.log.records);
  CHECK(x.final_state == y.final_state);
  const auto z = self_play(BotKind::Scout, BotKind::Random, 1235);
  CHECK_FALSE(z.log.records == x.log.records);
}

TEST_CASE("turn cap of one is a draw") {
  const auto r = self_play(BotKind::Random, BotKind::Random, 3, {.turn_cap = 1});
  CHECK_FALSE(r.winner.has_value());
  CHECK(r.turns == 1);
  CHECK(r.log.records.size() == 1);
}

TEST_CASE("swapping seats with the first mover mirrors the game") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    SelfPlayOptions first_a;
    SelfPlayOptions first_b;
    first_b.first_mover = PlayerId::B;
    const auto x = self_play(BotKind::Scout, BotKind::Random, seed, first_a);
    const auto y = self_play(BotKind::Random, BotKind::Scout, seed, first_b);
    CHECK(x.turns == y.turns);
    CHECK(x.winner.has_value() == y.winner.has_value());
    if (x.winner && y.winner) CHECK(*y.winner == opponent(*x.winner));
    REQUIRE(x.log.records.size() == y.log.records.size());
    for (std::size_t i = 0; i < x.log.records.size(); ++i)
      CHECK(y.log.records[i].player == opponent(x.log.records[i].player));
  }
}

TEST_CASE("scout beats random") {
  const auto t = tournament(BotKind::Scout, BotKind::Random, 200, 7);
  CHECK(t.games == 200);
  CHECK(t.wins_a + t.wins_b + t.draws == 200);
  CHECK(t.wins_a > 100);
}

TEST_CASE("tournaments do not depend on the thread count") {
  const SelfPlayOptions o{.turn_cap = 120};
  const auto one = tournament(BotKind::Scout, BotKind::Random, 24, 9, o, 1);
  const auto three = tournament(BotKind::Scout, BotKind::Random, 24, 9, o, 3);
  CHECK(one.wins_a == three.wins_a);
  CHECK(one.wins_b == three.wins_b);
  CHECK(one.mean_turns == three.mean_turns);

  std::ostringstream out;
  write_tournament_csv(out, {one});
  CHECK(out.str().starts_with("bot_a,bot_b,games,wins_a,wins_b,draws,mean_turns,seed\nscout,random,24,"));
}
