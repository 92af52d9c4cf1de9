#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nxbench/class_weights.hpp"
#include "nxbench/error.hpp"
#include "nxbench/rng.hpp"
#include "oracle.hpp"

using namespace nxbench;

TEST_CASE("90/10 with gamma one") {
  const auto t = class_weights({{"a", 90}, {"b", 10}}, 1.0);
  CHECK(t.weight("a") == doctest::Approx(1.11111).epsilon(1e-5));
  CHECK(t.weight("b") == doctest::Approx(10.0).epsilon(1e-15));
}

TEST_CASE("gamma zero is exactly one") {
  const auto t = class_weights({{"a", 1}, {"b", 999999}, {"c", 7}}, 0.0);
  for (const auto& [c, w] : t.weights) CHECK(w == 1.0);
}

TEST_CASE("equal counts give equal weights") {
  const auto t = class_weights({{"a", 100}, {"b", 100}}, 0.3);
  CHECK(t.weight("a") == t.weight("b"));
  CHECK(t.weight("a") == doctest::Approx(1.23114).epsilon(1e-5));
}

TEST_CASE("matches the high-precision oracle") {
  CounterRng rng(77);
  for (int t = 0; t < 200; ++t) {
    std::map<std::string, std::int64_t> counts;
    const auto k = rng.between(1, 12);
    for (std::int64_t i = 0; i < k; ++i) counts["c" + std::to_string(i)] = rng.between(1, 5000000);
    const double gamma = rng.uniform();
    const auto got = class_weights(counts, gamma);
    const auto want = nxtest::weights_oracle(counts, gamma);
    for (const auto& [c, w] : want) {
      const double rel = static_cast<double>(abs((nxtest::Big(got.weight(c)) - w) / w));
      CHECK(rel < 1e-12);
    }
  }
}

TEST_CASE("smaller classes weigh more when gamma is positive") {
  CounterRng rng(5);
  for (int t = 0; t < 100; ++t) {
    std::map<std::string, std::int64_t> counts{{"a", rng.between(1, 1000)}, {"b", rng.between(1, 1000)}};
    const double gamma = 0.05 + 0.95 * rng.uniform();
    const auto w = class_weights(counts, gamma);
    if (counts["a"] < counts["b"]) CHECK(w.weight("a") > w.weight("b"));
    if (counts["a"] > counts["b"]) CHECK(w.weight("a") < w.weight("b"));
  }
}

TEST_CASE("scaling all counts leaves the table unchanged") {
  const std::map<std::string, std::int64_t> base{{"a", 3}, {"b", 17}, {"c", 250}};
  for (std::int64_t k : {2, 10, 1000}) {
    std::map<std::string, std::int64_t> scaled;
    for (const auto& [c, n] : base) scaled[c] = n * k;
    const auto x = class_weights(base, 0.7), y = class_weights(scaled, 0.7);
    for (const auto& [c, w] : x.weights) CHECK(y.weight(c) == doctest::Approx(w).epsilon(1e-14));
  }
}

TEST_CASE("no renormalization") {
  const auto t = class_weights({{"a", 1}, {"b", 3}}, 1.0);
  CHECK(t.weight("a") == 4.0);
  CHECK(t.weight("b") == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(class_weights({{"a", 0}, {"b", 3}}, 0.5), ArgumentError);
  CHECK_THROWS_AS(class_weights({{"a", 1}}, -0.1), ArgumentError);
  CHECK_THROWS_AS(class_weights({{"a", 1}}, 1.1), ArgumentError);
}

TEST_CASE("vector_for follows the class order; unknown classes weigh one") {
  const auto t = class_weights({{"a", 1}, {"b", 3}}, 1.0);
  const auto v = t.vector_for({"b", "zzz", "a"});
  CHECK(v(0) == doctest::Approx(4.0 / 3.0));
  CHECK(v(1) == 1.0);
  CHECK(v(2) == 4.0);
  CHECK(unit_weights({"x", "y"}).vector_for({"x", "y"}) == Eigen::VectorXd::Ones(2));
}
