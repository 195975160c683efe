#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace pnd {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Folds a list of keys into one seed. Order matters.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (auto k : keys) h = mix64(h ^ mix64(k));
  return h;
}

inline Rng make_rng(std::initializer_list<std::uint64_t> keys) {
  return Rng(derive_seed(keys));
}

/// Uniform integer in [0, n). The standard distributions are not specified
/// bit-for-bit across library implementations, so results would not be
/// reproducible between toolchains.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n <= 1) return 0;
  const std::uint64_t bound = n;
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

template <typename T>
const T& pick(Rng& rng, std::span<const T> items) {
  return items[uniform_index(rng, items.size())];
}

/// Partial Fisher-Yates: the first k entries become a uniform k-subset.
template <typename T>
void shuffle_prefix(Rng& rng, std::span<T> items, std::size_t k) {
  for (std::size_t i = 0; i < k && i < items.size(); ++i) {
    std::size_t j = i + uniform_index(rng, items.size() - i);
    using std::swap;
    swap(items[i], items[j]);
  }
}

template <typename T>
void shuffle(Rng& rng, std::span<T> items) {
  shuffle_prefix(rng, items, items.size());
}

}  // namespace pnd
