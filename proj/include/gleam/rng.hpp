#ifndef GLEAM_RNG_HPP
#define GLEAM_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace gleam {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent child seed from a parent seed and a path of keys.
/// Depends only on its arguments, never on call order.
inline std::uint64_t split_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t s = mix64(parent);
  for (auto k : keys) {
    s = mix64(s ^ mix64(k + 0x632be59bd9b4e019ULL));
  }
  return s;
}

/// FNV-1a, used to turn stream labels and scene names into seed keys.
inline std::uint64_t hash_label(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace gleam

#endif  // GLEAM_RNG_HPP
