#pragma once

#include <cstdint>
#include <initializer_list>

namespace oamfso {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based seed derivation. Every random stream in the library is
/// identified by a path of integers hanging off the master seed, e.g.
/// (master, kBankStream, realization, screen). Streams never depend on the
/// order in which they are drawn, so any parallel schedule reproduces the
/// sequential result.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = mix64(master);
  for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

// Stream tags. Distinct constants keep schemes from sharing seeds.
inline constexpr std::uint64_t kScreenStackStream = 0x5354ACULL;
inline constexpr std::uint64_t kChannelBankStream = 0x42414EULL;
inline constexpr std::uint64_t kBerStream = 0xBE5ULL;

}  // namespace oamfso
