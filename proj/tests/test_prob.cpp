#include <cmath>

#include "doctest.h"
#include "rda/error.hpp"
#include "rda/prob.hpp"
#include "test_support.hpp"

using namespace rda;

TEST_SUITE("prob") {

TEST_CASE("categorical distribution invariants") {
  CHECK_THROWS_AS(CategoricalDistribution({1.0}), InvalidInput);
  CHECK_THROWS_AS(CategoricalDistribution({0.5, 0.6}), InvalidInput);
  CHECK_THROWS_AS(CategoricalDistribution({-0.1, 1.1}), InvalidInput);
  const CategoricalDistribution p({0.25, 0.75});
  CHECK(p.num_classes() == 2);
  CHECK(p.argmax() == 1);
}

TEST_CASE("softmax of equal logits is uniform") {
  const auto p = softmax(LogitVector({0.0, 0.0, 0.0}));
  for (std::size_t i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("softmax shift invariance and ln2 gap") {
  for (double c : {-1000.0, -3.7, 0.0, 55.0, 1000.0}) {
    const auto p = softmax(LogitVector({c, c + std::log(2.0)}));
    CHECK(p[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("softmax saturates without overflow") {
  const auto p = softmax(LogitVector({1000.0, 0.0}));
  CHECK(std::abs(p[0] - 1.0) < 1e-12);
  CHECK(std::abs(p[1]) < 1e-12);
}

TEST_CASE("softmax rejects non-finite logits") {
  CHECK_THROWS_AS(LogitVector({1.0, std::nan("")}), InvalidInput);
  CHECK_THROWS_AS(LogitVector({1.0, INFINITY}), InvalidInput);
}

TEST_CASE("softmax output is a valid distribution for extreme logits") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> z(5);
    for (double& v : z) v = uniform_in(rng, -1e4, 1e4);
    const auto p = softmax(LogitVector(z));  // constructor revalidates
    double sum = 0.0;
    for (std::size_t i = 0; i < 5; ++i) sum += p[i];
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("softmax(z + c) == softmax(z) elementwise") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> z = test::random_logits(rng, 4, -30.0, 30.0);
    const double c = uniform_in(rng, -50.0, 50.0);
    std::vector<double> shifted = z;
    for (double& v : shifted) v += c;
    const auto p = softmax(LogitVector(z));
    const auto q = softmax(LogitVector(shifted));
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(p[i] - q[i]) <= 1e-12);
  }
}

TEST_CASE("kl identity and closed form") {
  const CategoricalDistribution u({0.5, 0.5});
  CHECK(kl_divergence(u, u) == doctest::Approx(0.0).epsilon(1e-15));
  const CategoricalDistribution point({1.0, 0.0});
  CHECK(kl_divergence(point, u) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("kl support violation is an error unless clamped") {
  const CategoricalDistribution p({0.6, 0.4});
  const CategoricalDistribution q({1.0, 0.0});
  CHECK_THROWS_AS(kl_divergence(p, q), ComputeError);
  const double clamped = kl_divergence(p, q, KlSupport::Clamp);
  CHECK(clamped == doctest::Approx(0.6 * std::log(0.6 / 1.0) + 0.4 * std::log(0.4 / 1e-12)));
}

TEST_CASE("kl matches extended-precision re-summation") {
  Rng rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = test::random_simplex_point(rng, 5);
    const auto q = test::random_simplex_point(rng, 5);
    const double got = kl_divergence(CategoricalDistribution(p), CategoricalDistribution(q));
    CHECK(std::abs(got - test::kl_oracle(p, q)) <= 1e-12);
  }
}

TEST_CASE("kl is zero on equal and nonnegative on random pairs") {
  Rng rng(10);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 2 + uniform_index(rng, 7);
    const auto pv = test::random_simplex_point(rng, k);
    const CategoricalDistribution p(pv);
    CHECK(std::abs(kl_divergence(p, p)) <= 1e-12);
    const CategoricalDistribution q(test::random_simplex_point(rng, k));
    CHECK(kl_divergence(p, q) >= -1e-12);
  }
}

TEST_CASE("kl dimension mismatch") {
  CHECK_THROWS_AS(kl_divergence(CategoricalDistribution({0.5, 0.5}),
                                CategoricalDistribution({0.4, 0.3, 0.3})),
                  InvalidInput);
}

}  // TEST_SUITE
