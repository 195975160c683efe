#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pnd {

enum class AttackType : std::uint8_t {
  Worm,
  Masquerade,
  Dos,
  Virus,
  Replay,
  Trojan,
  Modification,
};

inline constexpr std::array<AttackType, 7> kAllAttacks = {
    AttackType::Worm,   AttackType::Masquerade, AttackType::Dos,
    AttackType::Virus,  AttackType::Replay,     AttackType::Trojan,
    AttackType::Modification,
};

enum class PieceKind : std::uint8_t { Computer, MeshPoint, Router, AttackRing };

enum class PlayerId : std::uint8_t { A, B };

inline constexpr std::array<PlayerId, 2> kPlayers = {PlayerId::A, PlayerId::B};

constexpr PlayerId opponent(PlayerId p) {
  return p == PlayerId::A ? PlayerId::B : PlayerId::A;
}

constexpr std::size_t index_of(PlayerId p) { return p == PlayerId::A ? 0 : 1; }

constexpr std::size_t index_of(AttackType a) { return static_cast<std::size_t>(a); }

/// A defense card. Holds its 1-based id and a bitmask over AttackType.
class DefensePackage {
 public:
  constexpr DefensePackage(int id, std::uint8_t mask) : id_(id), mask_(mask) {}

  constexpr int id() const { return id_; }
  constexpr bool blocks(AttackType a) const {
    return (mask_ >> index_of(a)) & 1U;
  }
  constexpr std::uint8_t mask() const { return mask_; }

  friend constexpr bool operator==(const DefensePackage&, const DefensePackage&) = default;

 private:
  int id_;
  std::uint8_t mask_;
};

constexpr std::uint8_t attack_bit(AttackType a) {
  return static_cast<std::uint8_t>(1U << index_of(a));
}

/// Eight packages, each blocking three attack types.
class BlockTable {
 public:
  constexpr explicit BlockTable(std::array<DefensePackage, 8> packages)
      : packages_(packages) {}

  /// Throws std::out_of_range unless 1 <= id <= 8.
  const DefensePackage& package(int id) const;
  const std::array<DefensePackage, 8>& packages() const { return packages_; }

  int blocker_count(AttackType a) const;

 private:
  std::array<DefensePackage, 8> packages_;
};

/// The printed card set: five packages stop worms, two stop viruses.
const BlockTable& shipped_table();

/// Same cards with Package 2 trading its worm block for masquerade, leaving
/// four worm blockers and two virus blockers.
const BlockTable& four_worm_table();

bool blocks(const DefensePackage& package, AttackType attack);
bool blocks(int package_id, AttackType attack);
int blocker_count(AttackType attack);

std::string_view to_string(AttackType a);
std::string_view to_string(PlayerId p);
std::string_view to_string(PieceKind k);

std::optional<AttackType> parse_attack(std::string_view s);
std::optional<PlayerId> parse_player(std::string_view s);
std::optional<PieceKind> parse_piece_kind(std::string_view s);

}  // namespace pnd
