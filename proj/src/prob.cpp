#include "rda/prob.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rda/error.hpp"

namespace rda {

CategoricalDistribution::CategoricalDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw InvalidInput("categorical distribution needs K >= 2 classes");
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidInput("probability entry outside [0, 1]: " + std::to_string(p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbSumTol) {
    throw InvalidInput("probabilities sum to " + std::to_string(sum) + ", not 1");
  }
}

std::size_t CategoricalDistribution::argmax() const {
  std::size_t best = 0;
  for (std::size_t y = 1; y < probs_.size(); ++y) {
    if (probs_[y] > probs_[best]) best = y;
  }
  return best;
}

double CategoricalDistribution::max_prob() const { return probs_[argmax()]; }

LogitVector::LogitVector(std::vector<double> logits) : logits_(std::move(logits)) {
  if (logits_.size() < 2) {
    throw InvalidInput("logit vector needs K >= 2 classes");
  }
  for (double z : logits_) {
    if (!std::isfinite(z)) {
      throw InvalidInput("non-finite logit");
    }
  }
}

void softmax_inplace(std::span<const double> logits, std::span<double> out) {
  const double shift = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - shift);
    sum += out[i];
  }
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] /= sum;
  }
}

CategoricalDistribution softmax(const LogitVector& z) {
  std::vector<double> probs(z.num_classes());
  softmax_inplace(z.values(), probs);
  return CategoricalDistribution(std::move(probs));
}

double kl_divergence(const CategoricalDistribution& p, const CategoricalDistribution& q,
                     KlSupport support) {
  if (p.num_classes() != q.num_classes()) {
    throw InvalidInput("KL divergence: dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t y = 0; y < p.num_classes(); ++y) {
    const double py = p[y];
    if (py <= 0.0) continue;  // 0 ln(0/.) == 0
    double qy = q[y];
    if (qy <= 0.0) {
      if (support == KlSupport::Strict) {
        throw ComputeError("KL divergence undefined: p(y) > 0 where q(y) = 0");
      }
      qy = kProbClamp;
    } else if (support == KlSupport::Clamp && qy < kProbClamp) {
      qy = kProbClamp;
    }
    sum += py * std::log(py / qy);
  }
  return sum;
}

}  // namespace rda
