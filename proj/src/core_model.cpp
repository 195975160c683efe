#include "pnd/core_model.hpp"

namespace pnd {
namespace {

constexpr std::uint8_t mask_of(AttackType a, AttackType b, AttackType c) {
  return attack_bit(a) | attack_bit(b) | attack_bit(c);
}

using enum AttackType;

constexpr BlockTable kShipped{{
    DefensePackage{1, mask_of(Worm, Replay, Masquerade)},
    DefensePackage{2, mask_of(Worm, Dos, Modification)},
    DefensePackage{3, mask_of(Worm, Virus, Trojan)},
    DefensePackage{4, mask_of(Worm, Modification, Masquerade)},
    DefensePackage{5, mask_of(Worm, Trojan, Dos)},
    DefensePackage{6, mask_of(Virus, Replay, Masquerade)},
    DefensePackage{7, mask_of(Trojan, Replay, Dos)},
    DefensePackage{8, mask_of(Trojan, Replay, Modification)},
}};

constexpr BlockTable kFourWorm{{
    DefensePackage{1, mask_of(Worm, Replay, Masquerade)},
    DefensePackage{2, mask_of(Masquerade, Dos, Modification)},
    DefensePackage{3, mask_of(Worm, Virus, Trojan)},
    DefensePackage{4, mask_of(Worm, Modification, Masquerade)},
    DefensePackage{5, mask_of(Worm, Trojan, Dos)},
    DefensePackage{6, mask_of(Virus, Replay, Masquerade)},
    DefensePackage{7, mask_of(Trojan, Replay, Dos)},
    DefensePackage{8, mask_of(Trojan, Replay, Modification)},
}};

constexpr std::array<std::string_view, 7> kAttackNames = {
    "worm", "masquerade", "dos", "virus", "replay", "trojan", "modification"};

}  // namespace

const DefensePackage& BlockTable::package(int id) const {
  if (id < 1 || id > 8) throw std::out_of_range("defense package id out of range");
  return packages_[static_cast<std::size_t>(id - 1)];
}

int BlockTable::blocker_count(AttackType a) const {
  int n = 0;
  for (const auto& p : packages_) n += p.blocks(a) ? 1 : 0;
  return n;
}

const BlockTable& shipped_table() { return kShipped; }
const BlockTable& four_worm_table() { return kFourWorm; }

bool blocks(const DefensePackage& package, AttackType attack) {
  return package.blocks(attack);
}

bool blocks(int package_id, AttackType attack) {
  return kShipped.package(package_id).blocks(attack);
}

int blocker_count(AttackType attack) { return kShipped.blocker_count(attack); }

std::string_view to_string(AttackType a) { return kAttackNames[index_of(a)]; }

std::string_view to_string(PlayerId p) { return p == PlayerId::A ? "a" : "b"; }

std::string_view to_string(PieceKind k) {
  switch (k) {
    case PieceKind::Computer: return "computer";
    case PieceKind::MeshPoint: return "mesh_point";
    case PieceKind::Router: return "router";
    case PieceKind::AttackRing: return "attack_ring";
  }
  return "?";
}

std::optional<AttackType> parse_attack(std::string_view s) {
  for (auto a : kAllAttacks)
    if (kAttackNames[index_of(a)] == s) return a;
  return std::nullopt;
}

std::optional<PlayerId> parse_player(std::string_view s) {
  if (s == "a") return PlayerId::A;
  if (s == "b") return PlayerId::B;
  return std::nullopt;
}

std::optional<PieceKind> parse_piece_kind(std::string_view s) {
  for (auto k : {PieceKind::Computer, PieceKind::MeshPoint, PieceKind::Router,
                 PieceKind::AttackRing})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

}  // namespace pnd
