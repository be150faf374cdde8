#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "rda/credal.hpp"
#include "rda/error.hpp"
#include "test_support.hpp"

using namespace rda;

namespace {

// 1-D oracle for K=2: minimize KL((1-t, t) || p_hat) over the feasible
// alpha-level mass t by ternary search.
double osl_k2_ternary(double alpha, const CategoricalDistribution& p_hat) {
  const auto value = [&](double t) {
    double sum = 0.0;
    if (1.0 - t > 0.0) sum += (1.0 - t) * std::log((1.0 - t) / p_hat[0]);
    if (t > 0.0) sum += t * std::log(t / p_hat[1]);
    return sum;
  };
  double lo = 0.0, hi = alpha;
  for (int it = 0; it < 300; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (value(m1) < value(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return value(0.5 * (lo + hi));
}

}  // namespace

TEST_SUITE("credal") {

TEST_CASE("possibility distribution invariants") {
  CHECK_THROWS_AS(PossibilityDistribution({0.1, 0.1}, 0.1), InvalidInput);   // nothing full
  CHECK_THROWS_AS(PossibilityDistribution({1.0, 0.2}, 0.1), InvalidInput);   // stray level
  CHECK_THROWS_AS(PossibilityDistribution({1.0, 1.0}, 1.0), InvalidInput);   // alpha == 1
  const PossibilityDistribution pi({1.0, 0.1, 0.1}, 0.1);
  CHECK(pi.fully_plausible(0));
  CHECK(pi[1] == 0.1);
}

TEST_CASE("build_possibility thresholds the prediction") {
  const CategoricalDistribution p({0.3, 0.6, 0.1});
  const auto pi = build_possibility(0, p, 0.5, 0.1);
  CHECK(pi[0] == 1.0);  // training label stays fully plausible
  CHECK(pi[1] == 1.0);  // 0.6 >= 0.5
  CHECK(pi[2] == 0.1);
}

TEST_CASE("build_possibility with unattainable threshold reduces to relaxation") {
  const CategoricalDistribution p({0.2, 0.7, 0.1});
  const auto pi = build_possibility(0, p, 1.01, 0.1);
  CHECK(pi[0] == 1.0);
  CHECK(pi[1] == 0.1);
  CHECK(pi[2] == 0.1);
}

TEST_CASE("build_possibility with zero threshold ambiguates everything") {
  const CategoricalDistribution p({0.34, 0.33, 0.33});
  const auto pi = build_possibility(2, p, 0.0, 0.0);
  for (std::size_t y = 0; y < 3; ++y) CHECK(pi[y] == 1.0);
}

TEST_CASE("build_possibility rejects bad inputs") {
  const CategoricalDistribution p({0.5, 0.5});
  CHECK_THROWS_AS(build_possibility(2, p, 0.5, 0.1), InvalidInput);
  CHECK_THROWS_AS(build_possibility(0, p, 1.5, 0.1), InvalidInput);
  CHECK_THROWS_AS(build_possibility(0, p, 0.5, 1.0), InvalidInput);
}

TEST_CASE("membership examples") {
  const PossibilityDistribution pi({1.0, 0.1, 0.1}, 0.1);
  CHECK(credal_membership(CategoricalDistribution({0.95, 0.03, 0.02}), pi));
  CHECK_FALSE(credal_membership(CategoricalDistribution({0.5, 0.4, 0.1}), pi));
  const PossibilityDistribution vacuous({1.0, 1.0, 1.0}, 0.0);
  CHECK(credal_membership(CategoricalDistribution({0.5, 0.4, 0.1}), vacuous));
}

TEST_CASE("membership brute force on degenerate vertices") {
  const PossibilityDistribution pi({1.0, 0.3, 0.3}, 0.3);
  CHECK(credal_membership_bruteforce(CategoricalDistribution({1.0, 0.0, 0.0}), pi));
  CHECK_FALSE(credal_membership_bruteforce(CategoricalDistribution({0.0, 1.0, 0.0}), pi));
}

TEST_CASE("membership brute force capacity") {
  std::vector<std::uint8_t> full(21, 0);
  full[0] = 1;
  const auto pi = PossibilityDistribution::from_level_set(std::move(full), 0.1);
  std::vector<double> probs(21, 0.0);
  probs[0] = 1.0;
  CHECK_THROWS_AS(credal_membership_bruteforce(CategoricalDistribution(probs), pi),
                  InvalidInput);
}

TEST_CASE("fast membership agrees with subset enumeration") {
  Rng rng(11);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t k = 2 + uniform_index(rng, 7);
    const auto p = CategoricalDistribution(test::random_simplex_point(rng, k, 4.0));
    const auto pi = test::random_possibility(rng, k);
    CHECK(credal_membership(p, pi) == credal_membership_bruteforce(p, pi));
  }
}

TEST_CASE("projection splits mass by plausibility level") {
  const PossibilityDistribution pi({1.0, 0.1, 0.1}, 0.1);
  const auto pr = project_to_boundary(CategoricalDistribution({0.5, 0.4, 0.1}), pi);
  CHECK(pr[0] == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(pr[1] == doctest::Approx(0.08).epsilon(1e-14));
  CHECK(pr[2] == doctest::Approx(0.02).epsilon(1e-14));
  // binding constraint holds with equality
  CHECK(pr[1] + pr[2] == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("projection with alpha zero collapses to the one-hot target") {
  const PossibilityDistribution pi({1.0, 0.0, 0.0}, 0.0);
  const auto pr = project_to_boundary(CategoricalDistribution({0.2, 0.5, 0.3}), pi);
  CHECK(pr[0] == 1.0);
  CHECK(pr[1] == 0.0);
  CHECK(pr[2] == 0.0);
}

TEST_CASE("projection keeps equal proportions within each level") {
  const PossibilityDistribution pi({1.0, 1.0, 0.2, 0.2}, 0.2);
  const auto pr = project_to_boundary(CategoricalDistribution({0.25, 0.25, 0.25, 0.25}), pi);
  CHECK(pr[0] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(pr[1] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(pr[2] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(pr[3] == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("projection boundary property on random non-members") {
  Rng rng(12);
  int tested = 0;
  while (tested < 2000) {
    const std::size_t k = 2 + uniform_index(rng, 7);
    const CategoricalDistribution p(test::random_simplex_point(rng, k, 4.0));
    const auto pi = test::random_possibility(rng, k);
    if (credal_membership(p, pi)) continue;
    ++tested;
    const auto pr = project_to_boundary(p, pi);
    double alpha_mass = 0.0;
    for (std::size_t y = 0; y < k; ++y) {
      if (!pi.fully_plausible(y)) alpha_mass += pr[y];
    }
    CHECK(std::abs(alpha_mass - pi.alpha()) <= 1e-12);
    CHECK(credal_membership(pr, pi));
  }
}

TEST_CASE("osl is zero exactly on members") {
  const CategoricalDistribution member({0.3, 0.6, 0.1});
  const PossibilityDistribution pi({1.0, 1.0, 0.1}, 0.1);
  CHECK(osl_kl_loss(pi, member) == 0.0);  // boundary point counts as inside

  Rng rng(13);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 2 + uniform_index(rng, 7);
    const CategoricalDistribution p(test::random_simplex_point(rng, k, 4.0));
    const auto pi2 = test::random_possibility(rng, k);
    const double loss = osl_kl_loss(pi2, p);
    if (credal_membership(p, pi2)) {
      CHECK(loss == 0.0);
    } else {
      CHECK(loss > 0.0);
    }
  }
}

TEST_CASE("osl non-member value matches independent evaluation") {
  const PossibilityDistribution pi({1.0, 0.1, 0.1}, 0.1);
  const CategoricalDistribution p({0.5, 0.4, 0.1});
  const double got = osl_kl_loss(pi, p);
  const double expect = test::kl_oracle({0.9, 0.08, 0.02}, {0.5, 0.4, 0.1});
  CHECK(got == doctest::Approx(expect).epsilon(1e-12));
  CHECK(got == doctest::Approx(0.368).epsilon(1e-3));  // orientation value
}

TEST_CASE("osl with alpha zero reduces to cross-entropy over the plausible set") {
  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pv = test::random_simplex_point(rng, 3);
    const PossibilityDistribution pi({1.0, 0.0, 0.0}, 0.0);
    const double got = osl_kl_loss(pi, CategoricalDistribution(pv));
    CHECK(got == doctest::Approx(-std::log(pv[0])).epsilon(1e-12));
  }
}

TEST_CASE("osl brute force: member minimum is zero on the grid") {
  const PossibilityDistribution pi({1.0, 1.0, 0.1}, 0.1);
  const CategoricalDistribution member({0.3, 0.6, 0.1});
  CHECK(osl_kl_bruteforce(pi, member, 400) <= 5e-3);
}

TEST_CASE("osl brute force rejects bad inputs") {
  const PossibilityDistribution pi({1.0, 0.1}, 0.1);
  const CategoricalDistribution p({0.5, 0.5});
  CHECK_THROWS_AS(osl_kl_bruteforce(pi, p, 10), InvalidInput);
  std::vector<double> p5(5, 0.2);
  std::vector<std::uint8_t> full5(5, 1);
  CHECK_THROWS_AS(osl_kl_bruteforce(PossibilityDistribution::from_level_set(full5, 0.1),
                                    CategoricalDistribution(p5), 100),
                  InvalidInput);
}

TEST_CASE("osl closed form against the grid oracle, K=3") {
  Rng rng(15);
  int tested = 0;
  while (tested < 25) {
    const CategoricalDistribution p(test::random_simplex_point(rng, 3, 3.0));
    const auto pi = test::random_possibility(rng, 3);
    ++tested;
    const double exact = osl_kl_loss(pi, p);
    const double grid = osl_kl_bruteforce(pi, p, 400);
    CHECK(grid >= exact - 1e-9);  // grid minimum cannot beat the true minimum
    CHECK(grid - exact <= 5e-3);
  }
}

TEST_CASE("osl closed form against 1-D ternary search, K=2") {
  Rng rng(16);
  int tested = 0;
  while (tested < 200) {
    const double alpha = uniform_in(rng, 0.01, 0.8);
    const double q = uniform_in(rng, 0.01, 0.99);
    if (1.0 - q <= alpha) continue;  // need a non-member
    ++tested;
    const PossibilityDistribution pi({1.0, alpha}, alpha);
    const CategoricalDistribution p({q, 1.0 - q});
    CHECK(osl_kl_loss(pi, p) == doctest::Approx(osl_k2_ternary(alpha, p)).epsilon(1e-6));
  }
}

TEST_CASE("beta schedule endpoints and midpoint") {
  RdaConfig cfg;
  cfg.beta0 = 0.9;
  cfg.beta1 = 0.3;
  cfg.t_max = 100;
  CHECK(std::abs(beta_at(cfg, 0) - 0.9) <= 1e-12);
  CHECK(std::abs(beta_at(cfg, 100) - 0.3) <= 1e-12);
  CHECK(std::abs(beta_at(cfg, 50) - 0.6) <= 1e-12);
  CHECK_THROWS_AS(beta_at(cfg, -1), InvalidInput);
  CHECK_THROWS_AS(beta_at(cfg, 101), InvalidInput);
  cfg.static_beta = 1.01;
  CHECK(beta_at(cfg, 37) == 1.01);
}

TEST_CASE("beta schedule stays within the endpoint interval") {
  RdaConfig cfg;
  cfg.beta0 = 0.25;
  cfg.beta1 = 0.85;  // increasing schedules are legal too
  cfg.t_max = 17;
  for (int t = 0; t <= 17; ++t) {
    const double b = beta_at(cfg, t);
    CHECK(b >= 0.25 - 1e-12);
    CHECK(b <= 0.85 + 1e-12);
  }
}

TEST_CASE("rda loss reduces to cross-entropy at alpha 0, beta disabled") {
  RdaConfig cfg;
  cfg.alpha = 0.0;
  cfg.static_beta = 1.01;
  cfg.t_max = 1;
  const CategoricalDistribution p({0.2, 0.7, 0.1});
  CHECK(rda_loss(1, p, cfg, 0) == doctest::Approx(-std::log(0.7)).epsilon(1e-12));
}

TEST_CASE("ambiguation lowers the loss on a confidently contradicted label") {
  // Corrupt label 0, prediction confident in class 1 above beta.
  RdaConfig with_ambiguation;
  with_ambiguation.alpha = 0.1;
  with_ambiguation.static_beta = 0.6;
  with_ambiguation.t_max = 1;
  RdaConfig relaxation_only = with_ambiguation;
  relaxation_only.static_beta = 1.01;
  const CategoricalDistribution p({0.15, 0.75, 0.10});
  const double ambiguated = rda_loss(0, p, with_ambiguation, 0);
  const double relaxed = rda_loss(0, p, relaxation_only, 0);
  CHECK(ambiguated < relaxed);
}

TEST_CASE("rda loss is zero on members") {
  RdaConfig cfg;
  cfg.alpha = 0.2;
  cfg.static_beta = 0.5;
  cfg.t_max = 1;
  const CategoricalDistribution p({0.85, 0.1, 0.05});
  CHECK(rda_loss(0, p, cfg, 0) == 0.0);
}

TEST_CASE("rda gradient reduces to softmax minus one-hot") {
  RdaConfig cfg;
  cfg.alpha = 0.0;
  cfg.static_beta = 1.01;
  cfg.t_max = 1;
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto zv = test::random_logits(rng, 4);
    const LogitVector z(zv);
    const std::size_t y = uniform_index(rng, 4);
    const auto grad = rda_gradient(y, z, cfg, 0);
    const auto p = softmax(z);
    for (std::size_t j = 0; j < 4; ++j) {
      const double expect = p[j] - (j == y ? 1.0 : 0.0);
      CHECK(std::abs(grad[j] - expect) <= 1e-9);
    }
  }
}

TEST_CASE("rda gradient vanishes on members") {
  RdaConfig cfg;
  cfg.alpha = 0.3;
  cfg.static_beta = 0.4;
  cfg.t_max = 1;
  const LogitVector z({2.0, 1.5, -3.0});  // both leading classes above beta
  const auto grad = rda_gradient(0, z, cfg, 0);
  for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("rda gradient matches finite differences of the frozen-target surrogate") {
  Rng rng(18);
  int tested = 0;
  while (tested < 300) {
    const std::size_t k = 2 + uniform_index(rng, 5);
    RdaConfig cfg;
    cfg.alpha = uniform_unit(rng) * 0.6;
    cfg.static_beta = uniform_in(rng, 0.3, 1.01);
    cfg.t_max = 1;
    const auto zv = test::random_logits(rng, k, -3.0, 3.0);
    const LogitVector z(zv);
    const std::size_t y = uniform_index(rng, k);
    const CategoricalDistribution p_hat = softmax(z);
    const auto pi = build_possibility(y, p_hat, *cfg.static_beta, cfg.alpha);
    if (credal_membership(p_hat, pi)) continue;
    ++tested;
    const CategoricalDistribution target = project_to_boundary(p_hat, pi);
    const auto fd = test::finite_difference_gradient(
        [&](const std::vector<double>& zz) {
          return kl_divergence(target, softmax(LogitVector(zz)), KlSupport::Clamp);
        },
        zv);
    const auto grad = rda_gradient(y, z, cfg, 0);
    CHECK(test::gradient_rel_error(grad, fd) <= 1e-5);
  }
}

TEST_CASE("osl is convex along random segments") {
  Rng rng(19);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t k = 2 + uniform_index(rng, 9);
    const auto pi = test::random_possibility(rng, k);
    const auto p1 = CategoricalDistribution(test::random_simplex_point(rng, k, 4.0));
    const auto p2 = CategoricalDistribution(test::random_simplex_point(rng, k, 4.0));
    const double lambda = uniform_unit(rng);
    std::vector<double> mixv(k);
    for (std::size_t i = 0; i < k; ++i) mixv[i] = lambda * p1[i] + (1.0 - lambda) * p2[i];
    const double mixed = osl_kl_loss(pi, CategoricalDistribution(mixv));
    const double bound = lambda * osl_kl_loss(pi, p1) + (1.0 - lambda) * osl_kl_loss(pi, p2);
    CHECK(mixed <= bound + 1e-8);
  }
}

TEST_CASE("loss decays to zero approaching the boundary") {
  // Segment from an exterior point toward the boundary of the credal set.
  const PossibilityDistribution pi({1.0, 0.2, 0.2}, 0.2);
  const CategoricalDistribution outside({0.2, 0.5, 0.3});
  const CategoricalDistribution boundary({0.8, 0.125, 0.075});  // alpha mass exactly 0.2
  double previous = osl_kl_loss(pi, outside);
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    std::vector<double> point(3);
    for (std::size_t i = 0; i < 3; ++i) {
      point[i] = boundary[i] + eps * (outside[i] - boundary[i]);
    }
    const double loss = osl_kl_loss(pi, CategoricalDistribution(point));
    CHECK(loss < previous);
    CHECK(loss <= 10.0 * eps);
    CHECK(loss >= 0.0);
    previous = loss;
  }
}

TEST_CASE("lowering beta never shrinks the fully plausible set") {
  Rng rng(20);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + uniform_index(rng, 6);
    const CategoricalDistribution p(test::random_simplex_point(rng, k, 4.0));
    const std::size_t y = uniform_index(rng, k);
    const double beta_high = uniform_in(rng, 0.0, 1.01);
    const double beta_low = uniform_in(rng, 0.0, beta_high);
    const auto pi_high = build_possibility(y, p, beta_high, 0.1);
    const auto pi_low = build_possibility(y, p, beta_low, 0.1);
    for (std::size_t c = 0; c < k; ++c) {
      if (pi_high.fully_plausible(c)) CHECK(pi_low.fully_plausible(c));
    }
  }
}

TEST_CASE("credal size and validity") {
  CHECK(credal_size(PossibilityDistribution({1.0, 0.1, 0.1}, 0.1)) == 1);
  CHECK(credal_size(PossibilityDistribution({1.0, 1.0, 0.1}, 0.1)) == 2);
  CHECK(credal_size(PossibilityDistribution({1.0, 1.0, 1.0}, 0.1)) == 3);
  const PossibilityDistribution pi({1.0, 1.0, 0.1}, 0.1);
  CHECK(is_valid_credal(pi, 1));
  CHECK_FALSE(is_valid_credal(PossibilityDistribution({1.0, 0.1, 0.1}, 0.1), 1));
  CHECK_THROWS_AS(is_valid_credal(pi, 3), InvalidInput);
}

TEST_CASE("the training label is always covered") {
  Rng rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 2 + uniform_index(rng, 8);
    const CategoricalDistribution p(test::random_simplex_point(rng, k, 4.0));
    const std::size_t y = uniform_index(rng, k);
    const auto pi = build_possibility(y, p, uniform_in(rng, 0.0, 1.01), 0.05);
    CHECK(is_valid_credal(pi, y));
  }
}

}  // TEST_SUITE
