#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rda {

// Tolerance on the sum-to-one invariant of categorical distributions.
inline constexpr double kProbSumTol = 1e-9;

// Floor applied to probabilities inside logarithms when a caller asks for a
// total function instead of the strict support contract.
inline constexpr double kProbClamp = 1e-12;

/// Probability vector over K >= 2 classes. Entries in [0, 1], summing to one
/// within kProbSumTol. Validated on construction.
class CategoricalDistribution {
 public:
  explicit CategoricalDistribution(std::vector<double> probs);

  std::size_t num_classes() const { return probs_.size(); }
  double operator[](std::size_t y) const { return probs_[y]; }
  const std::vector<double>& probs() const { return probs_; }

  /// Index of the largest entry; ties broken toward the lowest index.
  std::size_t argmax() const;
  double max_prob() const;

 private:
  std::vector<double> probs_;
};

/// Pre-activation scores over K >= 2 classes. All entries finite.
class LogitVector {
 public:
  explicit LogitVector(std::vector<double> logits);

  std::size_t num_classes() const { return logits_.size(); }
  double operator[](std::size_t y) const { return logits_[y]; }
  const std::vector<double>& values() const { return logits_; }

 private:
  std::vector<double> logits_;
};

/// Max-shifted softmax. Preserves the argmax, never overflows.
CategoricalDistribution softmax(const LogitVector& z);

/// Softmax over a raw buffer, writing into out (same length). Used by the
/// batched training path; identical arithmetic to the checked overload.
void softmax_inplace(std::span<const double> logits, std::span<double> out);

enum class KlSupport {
  Strict,  // p(y) > 0 with q(y) == 0 raises ComputeError
  Clamp,   // q is floored at kProbClamp inside the logarithm
};

/// Kullback-Leibler divergence sum_y p(y) ln(p(y)/q(y)), with 0 ln(0/.) == 0.
double kl_divergence(const CategoricalDistribution& p, const CategoricalDistribution& q,
                     KlSupport support = KlSupport::Strict);

}  // namespace rda
