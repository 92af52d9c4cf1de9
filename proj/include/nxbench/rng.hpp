#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace nxbench {

/// SplitMix64 finalizer. Every stream in the workbench is derived from it,
/// so outputs are identical on every platform.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL));
}

/// 64-bit FNV-1a over bytes.
constexpr std::uint64_t fnv1a(std::string_view bytes,
                              std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Derives a child key from a parent key and a textual tag.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::string_view tag) noexcept {
  return mix64(parent, fnv1a(tag));
}

/// Counter-based generator: the i-th output is mix64(key, i), so any
/// (key, index) pair can be reproduced without replaying earlier draws.
/// Satisfies UniformRandomBitGenerator for use with <random> adaptors, but
/// the helpers below are used instead of std distributions because the
/// latter are not specified bit-exactly across standard libraries.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept { return mix64(key_, counter_++); }

  /// Uniform integer in [0, bound) by rejection, bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

/// Fisher-Yates shuffle driven by CounterRng.
template <typename T>
void shuffle(std::span<T> items, CounterRng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

template <typename T>
void shuffle(std::vector<T>& items, CounterRng& rng) {
  shuffle(std::span<T>(items), rng);
}

/// Permutation of 0..n-1.
std::vector<std::size_t> permutation(std::size_t n, CounterRng& rng);

}  // namespace nxbench
