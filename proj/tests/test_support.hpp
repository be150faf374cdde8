#pragma once

// Shared generators and independent oracles for the test suites. Everything
// here recomputes results through a route separate from the library code it
// checks.

#include <cmath>
#include <vector>

#include "rda/credal.hpp"
#include "rda/prob.hpp"
#include "rda/rng.hpp"

namespace rda::test {

/// Random interior point of the simplex (normalized exponentials).
inline std::vector<double> random_simplex_point(Rng& rng, std::size_t k, double spread = 2.0) {
  std::vector<double> p(k);
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(spread * (uniform_unit(rng) - 0.5));
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

inline std::vector<double> random_logits(Rng& rng, std::size_t k, double lo = -4.0,
                                         double hi = 4.0) {
  std::vector<double> z(k);
  for (double& v : z) v = uniform_in(rng, lo, hi);
  return z;
}

/// Random two-level possibility distribution; at least one class is fully
/// plausible, each further class with probability `full_prob`.
inline PossibilityDistribution random_possibility(Rng& rng, std::size_t k,
                                                  double full_prob = 0.3) {
  const double alpha = uniform_unit(rng) * 0.8;
  std::vector<std::uint8_t> full(k, 0);
  full[uniform_index(rng, k)] = 1;
  for (auto& f : full) {
    if (uniform_unit(rng) < full_prob) f = 1;
  }
  return PossibilityDistribution::from_level_set(std::move(full), alpha);
}

/// Term-by-term KL re-summation in extended precision.
inline double kl_oracle(const std::vector<double>& p, const std::vector<double>& q) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    sum += static_cast<long double>(p[i]) *
           std::log(static_cast<long double>(p[i]) / static_cast<long double>(q[i]));
  }
  return static_cast<double>(sum);
}

/// Central finite differences of a scalar function of a logit vector.
template <typename F>
std::vector<double> finite_difference_gradient(F&& f, std::vector<double> z,
                                               double step = 1e-6) {
  std::vector<double> grad(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double orig = z[i];
    z[i] = orig + step;
    const double hi = f(z);
    z[i] = orig - step;
    const double lo = f(z);
    z[i] = orig;
    grad[i] = (hi - lo) / (2.0 * step);
  }
  return grad;
}

/// Relative max-norm discrepancy between two gradients.
inline double gradient_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, scale = 1e-8;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  return diff / scale;
}

}  // namespace rda::test
