#include <doctest.h>

#include <bit>
#include <map>
#include <set>

#include "pnd/core_model.hpp"

using namespace pnd;
using enum AttackType;

namespace {

// Block lists copied from the printed cards, independent of the library table.
const std::map<int, std::set<AttackType>> kCards = {
    {1, {Worm, Replay, Masquerade}}, {2, {Worm, Dos, Modification}},
    {3, {Worm, Virus, Trojan}},      {4, {Worm, Modification, Masquerade}},
    {5, {Worm, Trojan, Dos}},        {6, {Virus, Replay, Masquerade}},
    {7, {Trojan, Replay, Dos}},      {8, {Trojan, Replay, Modification}},
};

}  // namespace

TEST_CASE("shipped table matches the printed cards") {
  for (const auto& [id, blocked] : kCards) {
    const auto& pkg = shipped_table().package(id);
    CHECK(pkg.id() == id);
    for (auto a : kAllAttacks) CHECK(pkg.blocks(a) == blocked.contains(a));
    CHECK(blocks(id, *blocked.begin()));
  }
}

TEST_CASE("blocker counts") {
  const std::map<AttackType, int> expected = {{Worm, 5},       {Virus, 2},    {Trojan, 4},
                                              {Replay, 4},     {Masquerade, 3}, {Dos, 3},
                                              {Modification, 3}};
  int total = 0;
  for (auto a : kAllAttacks) {
    CHECK(blocker_count(a) == expected.at(a));
    total += blocker_count(a);
  }
  CHECK(total == 24);
  for (const auto& p : shipped_table().packages()) CHECK(std::popcount(p.mask()) == 3);
}

TEST_CASE("sample lookups") {
  CHECK(blocks(1, Worm));
  CHECK_FALSE(blocks(6, Worm));
  CHECK(blocks(6, Virus));
  CHECK_FALSE(blocks(6, Trojan));
}

TEST_CASE("package ids outside 1..8 are rejected") {
  CHECK_THROWS_AS(shipped_table().package(0), std::out_of_range);
  CHECK_THROWS_AS(shipped_table().package(9), std::out_of_range);
}

TEST_CASE("four-worm alternative table") {
  const auto& t = four_worm_table();
  CHECK(t.blocker_count(Worm) == 4);
  CHECK(t.blocker_count(Virus) == 2);
  CHECK(t.blocker_count(Masquerade) == 4);
  for (const auto& p : t.packages()) CHECK(std::popcount(p.mask()) == 3);
  for (int id = 1; id <= 8; ++id)
    if (id != 2) CHECK(t.package(id) == shipped_table().package(id));
}

TEST_CASE("names round trip") {
  for (auto a : kAllAttacks) CHECK(parse_attack(to_string(a)) == a);
  for (auto p : kPlayers) CHECK(parse_player(to_string(p)) == p);
  for (auto k : {PieceKind::Computer, PieceKind::MeshPoint, PieceKind::Router, PieceKind::AttackRing})
    CHECK(parse_piece_kind(to_string(k)) == k);
  CHECK_FALSE(parse_attack("ddos").has_value());
  CHECK_FALSE(parse_player("c").has_value());
  CHECK(opponent(PlayerId::A) == PlayerId::B);
  CHECK(opponent(PlayerId::B) == PlayerId::A);
}
