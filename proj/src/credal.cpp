#include "rda/credal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rda/error.hpp"

namespace rda {

namespace {

// Thresholds above this are treated as "ambiguation disabled". Kept slightly
// above 1 so that beta = 1.0 still admits saturated predictions.
constexpr double kBetaMax = 1.01;

std::vector<double> clamped_probs(const CategoricalDistribution& p) {
  std::vector<double> out(p.probs());
  for (double& v : out) v = std::max(v, kProbClamp);
  return out;
}

}  // namespace

PossibilityDistribution::PossibilityDistribution(std::vector<double> plausibility, double alpha) {
  if (plausibility.size() < 2) {
    throw InvalidInput("possibility distribution needs K >= 2 classes");
  }
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie in [0, 1)");
  }
  full_.resize(plausibility.size());
  bool any_full = false;
  for (std::size_t y = 0; y < plausibility.size(); ++y) {
    if (plausibility[y] == 1.0) {
      full_[y] = 1;
      any_full = true;
    } else if (plausibility[y] == alpha) {
      full_[y] = 0;
    } else {
      throw InvalidInput("plausibility entry must equal alpha or 1");
    }
  }
  if (!any_full) {
    throw InvalidInput("possibility distribution must have a fully plausible class");
  }
  alpha_ = alpha;
}

PossibilityDistribution PossibilityDistribution::from_level_set(
    std::vector<std::uint8_t> fully_plausible, double alpha) {
  if (fully_plausible.size() < 2) {
    throw InvalidInput("possibility distribution needs K >= 2 classes");
  }
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie in [0, 1)");
  }
  if (std::find(fully_plausible.begin(), fully_plausible.end(), 1) == fully_plausible.end()) {
    throw InvalidInput("possibility distribution must have a fully plausible class");
  }
  PossibilityDistribution pi;
  pi.full_ = std::move(fully_plausible);
  pi.alpha_ = alpha;
  return pi;
}

void RdaConfig::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw InvalidInput("RdaConfig: alpha must lie in [0, 1)");
  }
  if (!(beta0 >= 0.0 && beta0 <= kBetaMax) || !(beta1 >= 0.0 && beta1 <= kBetaMax)) {
    throw InvalidInput("RdaConfig: beta0/beta1 must lie in [0, 1.01]");
  }
  if (static_beta && !(*static_beta >= 0.0 && *static_beta <= kBetaMax)) {
    throw InvalidInput("RdaConfig: static_beta must lie in [0, 1.01]");
  }
  if (t_max < 1) {
    throw InvalidInput("RdaConfig: t_max must be >= 1");
  }
}

double beta_at(const RdaConfig& cfg, int epoch) {
  cfg.validate();
  if (epoch < 0 || epoch > cfg.t_max) {
    throw InvalidInput("beta_at: epoch " + std::to_string(epoch) + " outside [0, t_max]");
  }
  if (cfg.static_beta) return *cfg.static_beta;
  const double pi = 3.14159265358979323846;
  const double frac = static_cast<double>(epoch) / static_cast<double>(cfg.t_max);
  return cfg.beta1 + 0.5 * (cfg.beta0 - cfg.beta1) * (1.0 + std::cos(pi * frac));
}

PossibilityDistribution build_possibility(std::size_t y, const CategoricalDistribution& p_hat,
                                          double beta, double alpha) {
  const std::size_t k = p_hat.num_classes();
  if (y >= k) {
    throw InvalidInput("build_possibility: class index out of range");
  }
  if (!(beta >= 0.0 && beta <= kBetaMax)) {
    throw InvalidInput("build_possibility: beta must lie in [0, 1.01]");
  }
  std::vector<std::uint8_t> full(k, 0);
  for (std::size_t c = 0; c < k; ++c) {
    full[c] = (c == y || p_hat[c] >= beta) ? 1 : 0;
  }
  return PossibilityDistribution::from_level_set(std::move(full), alpha);
}

bool credal_membership(const CategoricalDistribution& p, const PossibilityDistribution& pi) {
  if (p.num_classes() != pi.num_classes()) {
    throw InvalidInput("credal_membership: dimension mismatch");
  }
  // Subsets touching a fully plausible class have bound 1 and are vacuous;
  // the binding subset is the full alpha-level set.
  double alpha_mass = 0.0;
  for (std::size_t y = 0; y < p.num_classes(); ++y) {
    if (!pi.fully_plausible(y)) alpha_mass += p[y];
  }
  return alpha_mass <= pi.alpha() + kMembershipTol;
}

bool credal_membership_bruteforce(const CategoricalDistribution& p,
                                  const PossibilityDistribution& pi) {
  const std::size_t k = p.num_classes();
  if (k != pi.num_classes()) {
    throw InvalidInput("credal_membership_bruteforce: dimension mismatch");
  }
  if (k > 20) {
    throw InvalidInput("credal_membership_bruteforce: K > 20 exceeds capacity");
  }
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    double sum = 0.0;
    double bound = 0.0;
    for (std::size_t y = 0; y < k; ++y) {
      if (mask & (1u << y)) {
        sum += p[y];
        bound = std::max(bound, pi[y]);
      }
    }
    if (sum > bound + kMembershipTol) return false;
  }
  return true;
}

CategoricalDistribution project_to_boundary(const CategoricalDistribution& p_hat,
                                            const PossibilityDistribution& pi) {
  const std::size_t k = p_hat.num_classes();
  if (k != pi.num_classes()) {
    throw InvalidInput("project_to_boundary: dimension mismatch");
  }
  const double alpha = pi.alpha();
  double full_mass = 0.0;
  double alpha_mass = 0.0;
  std::size_t alpha_count = 0;
  for (std::size_t y = 0; y < k; ++y) {
    if (pi.fully_plausible(y)) {
      full_mass += p_hat[y];
    } else {
      alpha_mass += p_hat[y];
      ++alpha_count;
    }
  }
  if (full_mass <= 0.0) {
    throw ComputeError("project_to_boundary: zero mass on the fully plausible classes");
  }
  // Empty alpha-level set: the whole simplex face is fully plausible and all
  // unit mass is spread over it.
  const double full_weight = alpha_count == 0 ? 1.0 : 1.0 - alpha;
  std::vector<double> out(k, 0.0);
  for (std::size_t y = 0; y < k; ++y) {
    if (pi.fully_plausible(y)) {
      out[y] = full_weight * p_hat[y] / full_mass;
    } else if (alpha == 0.0) {
      out[y] = 0.0;
    } else {
      if (alpha_mass <= 0.0) {
        throw ComputeError("project_to_boundary: zero mass on the alpha-level classes");
      }
      out[y] = alpha * p_hat[y] / alpha_mass;
    }
  }
  return CategoricalDistribution(std::move(out));
}

double osl_kl_loss(const PossibilityDistribution& pi, const CategoricalDistribution& p_hat) {
  const CategoricalDistribution clamped(clamped_probs(p_hat));
  if (credal_membership(clamped, pi)) return 0.0;
  return kl_divergence(project_to_boundary(clamped, pi), clamped);
}

double osl_kl_bruteforce(const PossibilityDistribution& pi, const CategoricalDistribution& p_hat,
                         int grid_resolution) {
  const std::size_t k = p_hat.num_classes();
  if (k != pi.num_classes()) {
    throw InvalidInput("osl_kl_bruteforce: dimension mismatch");
  }
  if (k > 4) {
    throw InvalidInput("osl_kl_bruteforce: K > 4 exceeds capacity");
  }
  if (grid_resolution < 50) {
    throw InvalidInput("osl_kl_bruteforce: grid resolution must be >= 50");
  }
  const CategoricalDistribution clamped(clamped_probs(p_hat));
  const int r = grid_resolution;
  bool found = false;
  double best = 0.0;
  // Enumerate all compositions of r into k parts.
  std::vector<int> counts(k, 0);
  std::vector<double> point(k, 0.0);
  const auto visit = [&](const auto& self, std::size_t idx, int remaining) -> void {
    if (idx + 1 == k) {
      counts[idx] = remaining;
      for (std::size_t y = 0; y < k; ++y) {
        point[y] = static_cast<double>(counts[y]) / static_cast<double>(r);
      }
      CategoricalDistribution p(point);
      if (!credal_membership_bruteforce(p, pi)) return;
      const double value = kl_divergence(p, clamped);
      if (!found || value < best) {
        best = value;
        found = true;
      }
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[idx] = c;
      self(self, idx + 1, remaining - c);
    }
  };
  visit(visit, 0, r);
  if (!found) {
    throw ComputeError("osl_kl_bruteforce: no grid point inside the credal set; raise resolution");
  }
  return best;
}

double rda_loss(std::size_t y, const CategoricalDistribution& p_hat, const RdaConfig& cfg,
                int epoch) {
  const double beta = beta_at(cfg, epoch);
  const PossibilityDistribution pi = build_possibility(y, p_hat, beta, cfg.alpha);
  return osl_kl_loss(pi, p_hat);
}

std::vector<double> rda_gradient(std::size_t y, const LogitVector& z, const RdaConfig& cfg,
                                 int epoch) {
  const CategoricalDistribution p_hat = softmax(z);
  const double beta = beta_at(cfg, epoch);
  const PossibilityDistribution pi = build_possibility(y, p_hat, beta, cfg.alpha);
  const CategoricalDistribution clamped(clamped_probs(p_hat));
  const std::size_t k = p_hat.num_classes();
  std::vector<double> grad(k, 0.0);
  if (credal_membership(clamped, pi)) return grad;
  const CategoricalDistribution target = project_to_boundary(clamped, pi);
  for (std::size_t c = 0; c < k; ++c) {
    grad[c] = p_hat[c] - target[c];
  }
  return grad;
}

std::size_t credal_size(const PossibilityDistribution& pi) {
  std::size_t n = 0;
  for (std::size_t y = 0; y < pi.num_classes(); ++y) {
    if (pi.fully_plausible(y)) ++n;
  }
  return n;
}

bool is_valid_credal(const PossibilityDistribution& pi, std::size_t y_star) {
  if (y_star >= pi.num_classes()) {
    throw InvalidInput("is_valid_credal: class index out of range");
  }
  return pi.fully_plausible(y_star);
}

}  // namespace rda
