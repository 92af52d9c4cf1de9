#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "nxbench/rng.hpp"

using namespace nxbench;

TEST_CASE("mix64 is a fixed function") {
  CHECK(mix64(0) == mix64(0));
  CHECK(mix64(1) != mix64(2));
  CHECK(mix64(1, 2) != mix64(2, 1));
}

TEST_CASE("derive_key separates tags") {
  CHECK(derive_key(5, "a") != derive_key(5, "b"));
  CHECK(derive_key(5, "a") != derive_key(6, "a"));
  CHECK(derive_key(5, "a") == derive_key(5, "a"));
}

TEST_CASE("CounterRng streams are reproducible") {
  CounterRng a(42), b(42), c(43);
  std::vector<std::uint64_t> va, vb, vc;
  for (int i = 0; i < 16; ++i) {
    va.push_back(a());
    vb.push_back(b());
    vc.push_back(c());
  }
  CHECK(va == vb);
  CHECK(va != vc);
}

TEST_CASE("below stays in range and covers it") {
  CounterRng rng(7);
  std::map<std::uint64_t, int> hist;
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.below(7);
    REQUIRE(v < 7);
    ++hist[v];
  }
  CHECK(hist.size() == 7);
  for (const auto& [v, n] : hist) CHECK(n > 800);
}

TEST_CASE("between is inclusive") {
  CounterRng rng(3);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 500; ++i) {
    const auto v = rng.between(-2, 2);
    REQUIRE(v >= -2);
    REQUIRE(v <= 2);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
}

TEST_CASE("uniform lies in [0, 1)") {
  CounterRng rng(9);
  double lo = 1, hi = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("permutation is a permutation") {
  CounterRng rng(1);
  auto p = permutation(100, rng);
  auto sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
  CounterRng again(1);
  CHECK(permutation(100, again) == p);
}
