#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rda/prob.hpp"

namespace rda {

// Tolerance used by both credal membership routes. Matches kProbSumTol so
// that a valid distribution always satisfies the vacuous full-set constraint
// and so that boundary projections test as members.
inline constexpr double kMembershipTol = 1e-9;

/// Two-level possibility distribution over K classes: every class is either
/// fully plausible (value 1) or carries the relaxation mass alpha < 1. At
/// least one class is fully plausible.
class PossibilityDistribution {
 public:
  /// From explicit plausibility values; each entry must equal alpha or 1.
  PossibilityDistribution(std::vector<double> plausibility, double alpha);

  /// From the set of fully plausible classes.
  static PossibilityDistribution from_level_set(std::vector<std::uint8_t> fully_plausible,
                                                double alpha);

  std::size_t num_classes() const { return full_.size(); }
  double alpha() const { return alpha_; }
  bool fully_plausible(std::size_t y) const { return full_[y] != 0; }
  double operator[](std::size_t y) const { return full_[y] ? 1.0 : alpha_; }

 private:
  PossibilityDistribution() = default;
  std::vector<std::uint8_t> full_;
  double alpha_ = 0.0;
};

/// Ambiguation threshold schedule and relaxation mass for the RDA loss.
/// beta values above 1 are legal and disable ambiguation entirely.
struct RdaConfig {
  double alpha = 0.1;   // relaxation mass in [0, 1)
  double beta0 = 1.0;   // schedule start
  double beta1 = 0.25;  // schedule end
  int t_max = 100;      // total epochs, >= 1
  std::optional<double> static_beta;  // overrides the schedule when set

  void validate() const;  // throws InvalidInput on violation
};

/// Cosine decay from beta0 to beta1 over t_max epochs; static_beta wins.
double beta_at(const RdaConfig& cfg, int epoch);

/// Confidence-thresholded ambiguation: class y' is fully plausible iff it is
/// the training label or p_hat(y') >= beta; everything else gets alpha.
PossibilityDistribution build_possibility(std::size_t y, const CategoricalDistribution& p_hat,
                                          double beta, double alpha);

/// Membership of p in the credal set induced by pi, via the O(K) reduction:
/// the binding constraint is the total mass on the alpha-level classes.
bool credal_membership(const CategoricalDistribution& p, const PossibilityDistribution& pi);

/// Test oracle: evaluates the membership constraint over all 2^K - 1
/// nonempty subsets. K <= 20.
bool credal_membership_bruteforce(const CategoricalDistribution& p,
                                  const PossibilityDistribution& pi);

/// KL projection of a non-member p_hat onto the boundary of the credal set:
/// mass is renormalized to 1 - alpha on the fully plausible classes and to
/// alpha on the rest, keeping within-level proportions.
CategoricalDistribution project_to_boundary(const CategoricalDistribution& p_hat,
                                            const PossibilityDistribution& pi);

/// Optimistic superset loss with KL base loss: 0 for members, otherwise
/// KL(projection || p_hat). p_hat is floored at kProbClamp throughout.
double osl_kl_loss(const PossibilityDistribution& pi, const CategoricalDistribution& p_hat);

/// Test oracle: minimizes KL(p || p_hat) over the simplex grid of the given
/// resolution, filtered by the brute-force membership check. K <= 4.
double osl_kl_bruteforce(const PossibilityDistribution& pi, const CategoricalDistribution& p_hat,
                         int grid_resolution);

/// Full RDA loss: threshold from the schedule, ambiguated target, OSL value.
double rda_loss(std::size_t y, const CategoricalDistribution& p_hat, const RdaConfig& cfg,
                int epoch);

/// Gradient of the RDA loss over logits, with the projected target treated
/// as a constant: softmax(z) - projection for non-members, zero for members.
std::vector<double> rda_gradient(std::size_t y, const LogitVector& z, const RdaConfig& cfg,
                                 int epoch);

/// Number of fully plausible classes, in [1, K].
std::size_t credal_size(const PossibilityDistribution& pi);

/// True iff the ground-truth class is fully plausible.
bool is_valid_credal(const PossibilityDistribution& pi, std::size_t y_star);

}  // namespace rda
