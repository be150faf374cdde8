#include "rda/losses.hpp"

#include <algorithm>
#include <cmath>

#include "rda/error.hpp"

namespace rda {

namespace {

double clamped(double p) { return std::max(p, kProbClamp); }

void check_class(std::size_t y, std::size_t k, const char* who) {
  if (y >= k) throw InvalidInput(std::string(who) + ": class index out of range");
}

}  // namespace

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "ce") return LossKind::CE;
  if (name == "ls") return LossKind::LS;
  if (name == "lr") return LossKind::LR;
  if (name == "gce") return LossKind::GCE;
  if (name == "nce") return LossKind::NCE;
  if (name == "mae") return LossKind::MAE;
  if (name == "rda") return LossKind::RDA;
  throw InvalidInput("unknown loss kind: " + name);
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::CE: return "ce";
    case LossKind::LS: return "ls";
    case LossKind::LR: return "lr";
    case LossKind::GCE: return "gce";
    case LossKind::NCE: return "nce";
    case LossKind::MAE: return "mae";
    case LossKind::RDA: return "rda";
  }
  throw InvalidInput("unknown loss kind");
}

void LossSpec::validate() const {
  const bool wants_alpha = kind == LossKind::LS || kind == LossKind::LR || kind == LossKind::RDA;
  if (wants_alpha && !alpha) {
    throw InvalidInput("loss '" + to_string(kind) + "' requires alpha");
  }
  if (!wants_alpha && alpha) {
    throw InvalidInput("loss '" + to_string(kind) + "' takes no alpha");
  }
  if (alpha && !(*alpha >= 0.0 && *alpha < 1.0)) {
    throw InvalidInput("alpha must lie in [0, 1)");
  }
  if (kind != LossKind::GCE && q) {
    throw InvalidInput("loss '" + to_string(kind) + "' takes no q");
  }
  if (q && !(*q > 0.0 && *q <= 1.0)) {
    throw InvalidInput("q must lie in (0, 1]");
  }
}

double ce_loss(std::size_t y, const CategoricalDistribution& p_hat) {
  check_class(y, p_hat.num_classes(), "ce_loss");
  return -std::log(clamped(p_hat[y]));
}

std::vector<double> ce_grad(std::size_t y, const LogitVector& z) {
  check_class(y, z.num_classes(), "ce_grad");
  std::vector<double> grad = softmax(z).probs();
  grad[y] -= 1.0;
  return grad;
}

double ls_loss(std::size_t y, const CategoricalDistribution& p_hat, double alpha) {
  const std::size_t k = p_hat.num_classes();
  check_class(y, k, "ls_loss");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidInput("ls_loss: alpha must lie in [0, 1)");
  const double off = alpha / static_cast<double>(k);
  double loss = -(1.0 - alpha + off) * std::log(clamped(p_hat[y]));
  if (off > 0.0) {
    for (std::size_t j = 0; j < k; ++j) {
      if (j != y) loss -= off * std::log(clamped(p_hat[j]));
    }
  }
  return loss;
}

std::vector<double> ls_grad(std::size_t y, const LogitVector& z, double alpha) {
  const std::size_t k = z.num_classes();
  check_class(y, k, "ls_grad");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidInput("ls_grad: alpha must lie in [0, 1)");
  const double off = alpha / static_cast<double>(k);
  std::vector<double> grad = softmax(z).probs();
  for (std::size_t j = 0; j < k; ++j) {
    grad[j] -= (j == y) ? 1.0 - alpha + off : off;
  }
  return grad;
}

namespace {

RdaConfig relaxation_only_config(double alpha) {
  RdaConfig cfg;
  cfg.alpha = alpha;
  cfg.static_beta = 1.01;  // unattainable threshold: no ambiguation
  cfg.t_max = 1;
  return cfg;
}

}  // namespace

double lr_loss(std::size_t y, const CategoricalDistribution& p_hat, double alpha) {
  check_class(y, p_hat.num_classes(), "lr_loss");
  return rda_loss(y, p_hat, relaxation_only_config(alpha), 0);
}

std::vector<double> lr_grad(std::size_t y, const LogitVector& z, double alpha) {
  check_class(y, z.num_classes(), "lr_grad");
  return rda_gradient(y, z, relaxation_only_config(alpha), 0);
}

double gce_loss(std::size_t y, const CategoricalDistribution& p_hat, double q) {
  check_class(y, p_hat.num_classes(), "gce_loss");
  if (!(q > 0.0 && q <= 1.0)) throw InvalidInput("gce_loss: q must lie in (0, 1]");
  return (1.0 - std::pow(clamped(p_hat[y]), q)) / q;
}

std::vector<double> gce_grad(std::size_t y, const LogitVector& z, double q) {
  const std::size_t k = z.num_classes();
  check_class(y, k, "gce_grad");
  if (!(q > 0.0 && q <= 1.0)) throw InvalidInput("gce_grad: q must lie in (0, 1]");
  const CategoricalDistribution p_hat = softmax(z);
  const double scale = std::pow(p_hat[y], q);
  std::vector<double> grad(k);
  for (std::size_t j = 0; j < k; ++j) {
    grad[j] = scale * (p_hat[j] - (j == y ? 1.0 : 0.0));
  }
  return grad;
}

double nce_loss(std::size_t y, const CategoricalDistribution& p_hat) {
  const std::size_t k = p_hat.num_classes();
  check_class(y, k, "nce_loss");
  double denom = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    denom -= std::log(clamped(p_hat[j]));
  }
  return -std::log(clamped(p_hat[y])) / denom;
}

std::vector<double> nce_grad(std::size_t y, const LogitVector& z) {
  const std::size_t k = z.num_classes();
  check_class(y, k, "nce_grad");
  const CategoricalDistribution p_hat = softmax(z);
  double num = -std::log(clamped(p_hat[y]));
  double denom = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    denom -= std::log(clamped(p_hat[j]));
  }
  // d(-ln p_y)/dz_j = p_j - [j == y]; d denom/dz_j = K p_j - 1.
  std::vector<double> grad(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double dnum = p_hat[j] - (j == y ? 1.0 : 0.0);
    const double ddenom = static_cast<double>(k) * p_hat[j] - 1.0;
    grad[j] = (dnum * denom - num * ddenom) / (denom * denom);
  }
  return grad;
}

double mae_loss(std::size_t y, const CategoricalDistribution& p_hat) {
  check_class(y, p_hat.num_classes(), "mae_loss");
  return 2.0 * (1.0 - p_hat[y]);
}

std::vector<double> mae_grad(std::size_t y, const LogitVector& z) {
  const std::size_t k = z.num_classes();
  check_class(y, k, "mae_grad");
  const CategoricalDistribution p_hat = softmax(z);
  std::vector<double> grad(k);
  for (std::size_t j = 0; j < k; ++j) {
    grad[j] = 2.0 * p_hat[y] * (p_hat[j] - (j == y ? 1.0 : 0.0));
  }
  return grad;
}

namespace {

template <typename LossFn, typename GradFn>
class SimpleLoss final : public LogitLoss {
 public:
  SimpleLoss(LossFn loss, GradFn grad) : loss_(loss), grad_(grad) {}
  double eval(std::size_t y, const LogitVector& z, int /*epoch*/,
              std::span<double> grad_out) const override {
    const std::vector<double> g = grad_(y, z);
    std::copy(g.begin(), g.end(), grad_out.begin());
    return loss_(y, softmax(z));
  }

 private:
  LossFn loss_;
  GradFn grad_;
};

template <typename LossFn, typename GradFn>
std::unique_ptr<LogitLoss> make_simple(LossFn loss, GradFn grad) {
  return std::make_unique<SimpleLoss<LossFn, GradFn>>(loss, grad);
}

class RdaLogitLoss final : public LogitLoss {
 public:
  explicit RdaLogitLoss(RdaConfig cfg) : cfg_(cfg) { cfg_.validate(); }
  double eval(std::size_t y, const LogitVector& z, int epoch,
              std::span<double> grad_out) const override {
    const std::vector<double> g = rda_gradient(y, z, cfg_, epoch);
    std::copy(g.begin(), g.end(), grad_out.begin());
    return rda_loss(y, softmax(z), cfg_, epoch);
  }

 private:
  RdaConfig cfg_;
};

}  // namespace

std::unique_ptr<LogitLoss> make_logit_loss(const LossSpec& spec, const RdaConfig& rda_cfg) {
  spec.validate();
  switch (spec.kind) {
    case LossKind::CE:
      return make_simple([](std::size_t y, const CategoricalDistribution& p) { return ce_loss(y, p); },
                         [](std::size_t y, const LogitVector& z) { return ce_grad(y, z); });
    case LossKind::LS: {
      const double a = *spec.alpha;
      return make_simple(
          [a](std::size_t y, const CategoricalDistribution& p) { return ls_loss(y, p, a); },
          [a](std::size_t y, const LogitVector& z) { return ls_grad(y, z, a); });
    }
    case LossKind::LR: {
      const double a = *spec.alpha;
      return make_simple(
          [a](std::size_t y, const CategoricalDistribution& p) { return lr_loss(y, p, a); },
          [a](std::size_t y, const LogitVector& z) { return lr_grad(y, z, a); });
    }
    case LossKind::GCE: {
      const double q = spec.q.value_or(0.7);
      return make_simple(
          [q](std::size_t y, const CategoricalDistribution& p) { return gce_loss(y, p, q); },
          [q](std::size_t y, const LogitVector& z) { return gce_grad(y, z, q); });
    }
    case LossKind::NCE:
      return make_simple([](std::size_t y, const CategoricalDistribution& p) { return nce_loss(y, p); },
                         [](std::size_t y, const LogitVector& z) { return nce_grad(y, z); });
    case LossKind::MAE:
      return make_simple([](std::size_t y, const CategoricalDistribution& p) { return mae_loss(y, p); },
                         [](std::size_t y, const LogitVector& z) { return mae_grad(y, z); });
    case LossKind::RDA: {
      RdaConfig cfg = rda_cfg;
      if (spec.alpha) cfg.alpha = *spec.alpha;
      return std::make_unique<RdaLogitLoss>(cfg);
    }
  }
  throw InvalidInput("unknown loss kind");
}

}  // namespace rda
