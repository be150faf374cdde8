#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rda/credal.hpp"
#include "rda/prob.hpp"

namespace rda {

enum class LossKind { CE, LS, LR, GCE, NCE, MAE, RDA };

LossKind loss_kind_from_string(const std::string& name);
std::string to_string(LossKind kind);

/// Which loss to train with, plus the parameters that kind requires.
/// q defaults to 0.7 for GCE; that value is a conventional choice, not taken
/// from any reported experiment.
struct LossSpec {
  LossKind kind = LossKind::CE;
  std::optional<double> alpha;  // LS / LR / RDA relaxation mass
  std::optional<double> q;      // GCE exponent in (0, 1]

  void validate() const;  // parameters present iff the kind requires them
};

// Losses take the prediction, gradients take the logits; every gradient is
// the analytic derivative of its loss through softmax. Predictions are
// floored at kProbClamp inside logarithms and powers.

double ce_loss(std::size_t y, const CategoricalDistribution& p_hat);
std::vector<double> ce_grad(std::size_t y, const LogitVector& z);

double ls_loss(std::size_t y, const CategoricalDistribution& p_hat, double alpha);
std::vector<double> ls_grad(std::size_t y, const LogitVector& z, double alpha);

/// Label relaxation: the credal loss with the ambiguation threshold disabled.
double lr_loss(std::size_t y, const CategoricalDistribution& p_hat, double alpha);
std::vector<double> lr_grad(std::size_t y, const LogitVector& z, double alpha);

/// Generalized cross-entropy (1 - p_hat(y)^q) / q.
double gce_loss(std::size_t y, const CategoricalDistribution& p_hat, double q);
std::vector<double> gce_grad(std::size_t y, const LogitVector& z, double q);

/// Normalized cross-entropy -ln p_hat(y) / -sum_k ln p_hat(k), in (0, 1).
double nce_loss(std::size_t y, const CategoricalDistribution& p_hat);
std::vector<double> nce_grad(std::size_t y, const LogitVector& z);

/// Mean absolute error against the one-hot target, 2 (1 - p_hat(y)).
double mae_loss(std::size_t y, const CategoricalDistribution& p_hat);
std::vector<double> mae_grad(std::size_t y, const LogitVector& z);

/// Per-example loss as the trainer sees it: value plus gradient over logits.
class LogitLoss {
 public:
  virtual ~LogitLoss() = default;
  virtual double eval(std::size_t y, const LogitVector& z, int epoch,
                      std::span<double> grad_out) const = 0;
};

/// Factory over LossSpec; RDA and LR take their schedule/relaxation
/// parameters from the RdaConfig.
std::unique_ptr<LogitLoss> make_logit_loss(const LossSpec& spec, const RdaConfig& rda_cfg);

}  // namespace rda
