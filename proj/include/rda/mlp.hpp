#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rda/prob.hpp"

namespace rda {

enum class Activation { ReLU, Tanh };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation a);

/// Fully connected classifier. weights[l] maps layer_dims[l] to
/// layer_dims[l+1], stored row-major (out x in); the last layer emits logits.
struct MlpModel {
  std::vector<std::size_t> layer_dims;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  Activation activation = Activation::ReLU;

  std::size_t num_layers() const { return weights.size(); }
  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t num_classes() const { return layer_dims.back(); }

  void validate() const;  // shape consistency and finite parameters
};

/// Seeded init: weights uniform in (-1/sqrt(fan_in), 1/sqrt(fan_in)), biases
/// zero. Identical seeds give bit-identical models.
MlpModel init_model(const std::vector<std::size_t>& layer_dims, Activation activation,
                    std::uint64_t seed);

/// Activations recorded during a forward pass, enough to run backprop.
/// layer_inputs[l] is the batch entering weight layer l (so layer_inputs[0]
/// is the raw input and the last entry is the penultimate activation).
struct ForwardResult {
  std::size_t batch = 0;
  std::vector<std::vector<double>> layer_inputs;
  std::vector<double> logits;  // batch x K, row-major

  std::span<const double> logits_row(std::size_t i, std::size_t k) const {
    return std::span<const double>(logits).subspan(i * k, k);
  }
  /// Penultimate-layer activation of example i (for embedding diagnostics).
  std::span<const double> penultimate_row(std::size_t i) const;
};

/// Forward pass over `batch` row-major examples.
ForwardResult forward_batch(const MlpModel& model, std::span<const double> x, std::size_t batch);

/// Single-example forward; validates finiteness of the input.
ForwardResult forward(const MlpModel& model, std::span<const double> x);

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

/// Backprop from per-example logit gradients (batch x K, row-major) to the
/// mean parameter gradient over the batch.
Gradients backward(const MlpModel& model, const ForwardResult& cache,
                   std::span<const double> logit_grads);

struct SgdState {
  double learning_rate = 0.05;
  double momentum = 0.9;
  Gradients velocity;
};

SgdState make_sgd_state(const MlpModel& model, double learning_rate, double momentum);

/// v <- momentum v + g; theta <- theta - lr v. Raises ComputeError when the
/// gradient or the updated parameters stop being finite.
void sgd_step(MlpModel& model, const Gradients& grads, SgdState& state);

/// Logits for n row-major examples, without keeping activations.
std::vector<double> predict_logits(const MlpModel& model, std::span<const double> x,
                                   std::size_t n);

/// Softmax predictions for n row-major examples.
std::vector<CategoricalDistribution> predict(const MlpModel& model, std::span<const double> x,
                                             std::size_t n);

// Checkpoint file: "RDACKPT1" magic, layer dims, activation tag and raw
// little-endian IEEE-754 parameters. Round-trips are lossless.
void save_checkpoint(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_checkpoint(const std::filesystem::path& path);

}  // namespace rda
