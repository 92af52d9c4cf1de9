#include "nxbench/rng.hpp"

#include <numeric>

namespace nxbench {

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
  if (bound <= 1) return 0;
  // Reject the tail that would bias the modulo.
  const std::uint64_t limit = max() - max() % bound;
  for (;;) {
    const std::uint64_t v = (*this)();
    if (v < limit) return v % bound;
  }
}

std::int64_t CounterRng::between(std::int64_t lo, std::int64_t hi) noexcept {
  if (hi <= lo) return lo;
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(below(span));
}

std::vector<std::size_t> permutation(std::size_t n, CounterRng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  shuffle(idx, rng);
  return idx;
}

}  // namespace nxbench
