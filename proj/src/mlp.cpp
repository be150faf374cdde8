#include "rda/mlp.hpp"

#include <cblas.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "rda/error.hpp"
#include "rda/rng.hpp"

namespace rda {

namespace {

// OpenBLAS must run single-threaded: the training loop owns parallelism and
// threaded reductions would break bit-reproducibility.
struct BlasSetup {
  BlasSetup() { openblas_set_num_threads(1); }
};
const BlasSetup blas_setup;

double activate(double z, Activation a) {
  return a == Activation::ReLU ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

// Derivative expressed through the post-activation value.
double activate_deriv(double act, Activation a) {
  return a == Activation::ReLU ? (act > 0.0 ? 1.0 : 0.0) : 1.0 - act * act;
}

bool all_finite(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += std::abs(x);
  return std::isfinite(acc);
}

// C (m x n) = A (m x k) * B^T, B stored n x k row-major.
void gemm_abt(const double* a, const double* b, double* c, int m, int n, int k) {
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, m, n, k, 1.0, a, k, b, k, 0.0, c, n);
}

// C (m x n) = alpha * A^T (m x k stored k x m) * B (k x n).
void gemm_atb(const double* a, const double* b, double* c, int m, int n, int k, double alpha) {
  cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, m, n, k, alpha, a, m, b, n, 0.0, c, n);
}

// C (m x n) = A (m x k) * B (k x n).
void gemm_ab(const double* a, const double* b, double* c, int m, int n, int k) {
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, m, n, k, 1.0, a, k, b, n, 0.0, c, n);
}

}  // namespace

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::ReLU;
  if (name == "tanh") return Activation::Tanh;
  throw InvalidInput("unknown activation: " + name);
}

std::string to_string(Activation a) { return a == Activation::ReLU ? "relu" : "tanh"; }

void MlpModel::validate() const {
  if (layer_dims.size() < 2) {
    throw InvalidInput("model needs at least input and output dimensions");
  }
  for (std::size_t d : layer_dims) {
    if (d == 0) throw InvalidInput("layer dimensions must be positive");
  }
  if (weights.size() != layer_dims.size() - 1 || biases.size() != weights.size()) {
    throw InvalidInput("parameter count does not match layer dimensions");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].size() != layer_dims[l + 1] * layer_dims[l] ||
        biases[l].size() != layer_dims[l + 1]) {
      throw InvalidInput("parameter shape mismatch at layer " + std::to_string(l));
    }
    if (!all_finite(weights[l]) || !all_finite(biases[l])) {
      throw ComputeError("non-finite model parameters at layer " + std::to_string(l));
    }
  }
}

MlpModel init_model(const std::vector<std::size_t>& layer_dims, Activation activation,
                    std::uint64_t seed) {
  if (layer_dims.size() < 2) {
    throw InvalidInput("init_model: need at least input and output dimensions");
  }
  for (std::size_t d : layer_dims) {
    if (d == 0) throw InvalidInput("init_model: layer dimensions must be positive");
  }
  MlpModel model;
  model.layer_dims = layer_dims;
  model.activation = activation;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const std::size_t fan_in = layer_dims[l];
    const std::size_t fan_out = layer_dims[l + 1];
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::vector<double> w(fan_out * fan_in);
    for (double& v : w) v = uniform_in(rng, -scale, scale);
    model.weights.push_back(std::move(w));
    model.biases.emplace_back(fan_out, 0.0);
  }
  return model;
}

std::span<const double> ForwardResult::penultimate_row(std::size_t i) const {
  const std::vector<double>& acts = layer_inputs.back();
  const std::size_t width = acts.size() / batch;
  return std::span<const double>(acts).subspan(i * width, width);
}

ForwardResult forward_batch(const MlpModel& model, std::span<const double> x, std::size_t batch) {
  const std::size_t d0 = model.input_dim();
  if (batch == 0 || x.size() != batch * d0) {
    throw InvalidInput("forward_batch: input size does not match batch x input_dim");
  }
  ForwardResult result;
  result.batch = batch;
  result.layer_inputs.reserve(model.num_layers());
  result.layer_inputs.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l + 1 < model.num_layers(); ++l) {
    const std::size_t out_dim = model.layer_dims[l + 1];
    std::vector<double> z(batch * out_dim);
    gemm_abt(result.layer_inputs[l].data(), model.weights[l].data(), z.data(),
             static_cast<int>(batch), static_cast<int>(out_dim),
             static_cast<int>(model.layer_dims[l]));
    const double* bias = model.biases[l].data();
    for (std::size_t i = 0; i < batch; ++i) {
      double* row = z.data() + i * out_dim;
      for (std::size_t j = 0; j < out_dim; ++j) {
        row[j] = activate(row[j] + bias[j], model.activation);
      }
    }
    result.layer_inputs.push_back(std::move(z));
  }
  const std::size_t last = model.num_layers() - 1;
  const std::size_t k = model.num_classes();
  result.logits.resize(batch * k);
  gemm_abt(result.layer_inputs[last].data(), model.weights[last].data(), result.logits.data(),
           static_cast<int>(batch), static_cast<int>(k),
           static_cast<int>(model.layer_dims[last]));
  for (std::size_t i = 0; i < batch; ++i) {
    double* row = result.logits.data() + i * k;
    for (std::size_t j = 0; j < k; ++j) row[j] += model.biases[last][j];
  }
  return result;
}

ForwardResult forward(const MlpModel& model, std::span<const double> x) {
  if (!all_finite(x)) throw InvalidInput("forward: non-finite input");
  return forward_batch(model, x, 1);
}

Gradients backward(const MlpModel& model, const ForwardResult& cache,
                   std::span<const double> logit_grads) {
  const std::size_t batch = cache.batch;
  const std::size_t k = model.num_classes();
  if (logit_grads.size() != batch * k) {
    throw InvalidInput("backward: logit gradient shape mismatch");
  }
  if (cache.layer_inputs.size() != model.num_layers()) {
    throw InvalidInput("backward: cache does not match model depth");
  }
  const double inv_batch = 1.0 / static_cast<double>(batch);
  Gradients grads;
  grads.weights.resize(model.num_layers());
  grads.biases.resize(model.num_layers());

  std::vector<double> delta(logit_grads.begin(), logit_grads.end());
  for (std::size_t l = model.num_layers(); l-- > 0;) {
    const std::size_t out_dim = model.layer_dims[l + 1];
    const std::size_t in_dim = model.layer_dims[l];
    grads.weights[l].assign(out_dim * in_dim, 0.0);
    grads.biases[l].assign(out_dim, 0.0);
    // dW = mean over batch of delta_i^T x_i.
    gemm_atb(delta.data(), cache.layer_inputs[l].data(), grads.weights[l].data(),
             static_cast<int>(out_dim), static_cast<int>(in_dim), static_cast<int>(batch),
             inv_batch);
    for (std::size_t i = 0; i < batch; ++i) {
      const double* row = delta.data() + i * out_dim;
      for (std::size_t j = 0; j < out_dim; ++j) grads.biases[l][j] += inv_batch * row[j];
    }
    if (l == 0) break;
    // delta_{l-1} = (delta_l W_l) o act'(a_{l-1}).
    std::vector<double> prev(batch * in_dim);
    gemm_ab(delta.data(), model.weights[l].data(), prev.data(), static_cast<int>(batch),
            static_cast<int>(in_dim), static_cast<int>(out_dim));
    const std::vector<double>& acts = cache.layer_inputs[l];
    for (std::size_t i = 0; i < prev.size(); ++i) {
      prev[i] *= activate_deriv(acts[i], model.activation);
    }
    delta = std::move(prev);
  }
  return grads;
}

SgdState make_sgd_state(const MlpModel& model, double learning_rate, double momentum) {
  if (!(learning_rate > 0.0)) throw InvalidInput("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidInput("momentum must lie in [0, 1)");
  SgdState state;
  state.learning_rate = learning_rate;
  state.momentum = momentum;
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    state.velocity.weights.emplace_back(model.weights[l].size(), 0.0);
    state.velocity.biases.emplace_back(model.biases[l].size(), 0.0);
  }
  return state;
}

void sgd_step(MlpModel& model, const Gradients& grads, SgdState& state) {
  if (grads.weights.size() != model.num_layers()) {
    throw InvalidInput("sgd_step: gradient layer count mismatch");
  }
  const auto update = [&](std::vector<double>& theta, const std::vector<double>& g,
                          std::vector<double>& v) {
    if (g.size() != theta.size() || v.size() != theta.size()) {
      throw InvalidInput("sgd_step: gradient shape mismatch");
    }
    if (!all_finite(g)) throw ComputeError("training diverged: non-finite gradient");
    for (std::size_t i = 0; i < theta.size(); ++i) {
      v[i] = state.momentum * v[i] + g[i];
      theta[i] -= state.learning_rate * v[i];
    }
    if (!all_finite(theta)) throw ComputeError("training diverged: non-finite parameters");
  };
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    update(model.weights[l], grads.weights[l], state.velocity.weights[l]);
    update(model.biases[l], grads.biases[l], state.velocity.biases[l]);
  }
}

std::vector<double> predict_logits(const MlpModel& model, std::span<const double> x,
                                   std::size_t n) {
  const std::size_t d0 = model.input_dim();
  const std::size_t k = model.num_classes();
  if (x.size() != n * d0) throw InvalidInput("predict_logits: input shape mismatch");
  std::vector<double> logits(n * k);
  const std::size_t chunk = 512;
  for (std::size_t start = 0; start < n; start += chunk) {
    const std::size_t b = std::min(chunk, n - start);
    ForwardResult fwd = forward_batch(model, x.subspan(start * d0, b * d0), b);
    std::copy(fwd.logits.begin(), fwd.logits.end(), logits.begin() + start * k);
  }
  return logits;
}

std::vector<CategoricalDistribution> predict(const MlpModel& model, std::span<const double> x,
                                             std::size_t n) {
  const std::size_t k = model.num_classes();
  const std::vector<double> logits = predict_logits(model, x, n);
  std::vector<CategoricalDistribution> out;
  out.reserve(n);
  std::vector<double> probs(k);
  for (std::size_t i = 0; i < n; ++i) {
    softmax_inplace(std::span<const double>(logits).subspan(i * k, k), probs);
    out.emplace_back(probs);
  }
  return out;
}

namespace {

constexpr char kCheckpointMagic[8] = {'R', 'D', 'A', 'C', 'K', 'P', 'T', '1'};

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

void write_doubles(std::ostream& os, std::span<const double> v) {
  for (double x : v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
  }
}

void read_doubles(std::istream& is, std::span<double> v) {
  for (double& x : v) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    x = std::bit_cast<double>(bits);
  }
}

}  // namespace

void save_checkpoint(const MlpModel& model, const std::filesystem::path& path) {
  model.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open checkpoint for writing: " + path.string());
  os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_u32(os, static_cast<std::uint32_t>(model.layer_dims.size()));
  for (std::size_t d : model.layer_dims) write_u32(os, static_cast<std::uint32_t>(d));
  write_u32(os, model.activation == Activation::ReLU ? 0 : 1);
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    write_doubles(os, model.weights[l]);
    write_doubles(os, model.biases[l]);
  }
  if (!os) throw IoError("checkpoint write failed: " + path.string());
}

MlpModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw FormatError("not a checkpoint file: " + path.string());
  }
  const std::uint32_t n_dims = read_u32(is);
  if (!is || n_dims < 2 || n_dims > 64) {
    throw FormatError("checkpoint has implausible layer count");
  }
  MlpModel model;
  model.layer_dims.resize(n_dims);
  for (auto& d : model.layer_dims) d = read_u32(is);
  const std::uint32_t act = read_u32(is);
  if (act > 1) throw FormatError("checkpoint has unknown activation tag");
  model.activation = act == 0 ? Activation::ReLU : Activation::Tanh;
  for (std::size_t l = 0; l + 1 < n_dims; ++l) {
    std::vector<double> w(model.layer_dims[l + 1] * model.layer_dims[l]);
    std::vector<double> b(model.layer_dims[l + 1]);
    read_doubles(is, w);
    read_doubles(is, b);
    model.weights.push_back(std::move(w));
    model.biases.push_back(std::move(b));
  }
  if (!is) throw IoError("checkpoint truncated: " + path.string());
  model.validate();
  return model;
}

}  // namespace rda
