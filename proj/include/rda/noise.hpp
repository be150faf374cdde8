#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rda/dataset.hpp"

namespace rda {

enum class NoiseKind { Symmetric, Asymmetric };

/// Dataset with synthetically corrupted labels plus full provenance: the
/// hidden ground truth and a per-instance corruption mask.
struct CorruptedDataset {
  Dataset base;  // features + training labels y_i (possibly corrupted)
  std::vector<std::int32_t> ground_truth;
  std::vector<std::uint8_t> corrupted_mask;  // mask[i] <=> labels[i] != ground_truth[i]
  double noise_rate = 0.0;
  NoiseKind noise_kind = NoiseKind::Symmetric;

  std::size_t size() const { return base.size(); }
  std::size_t num_corrupted() const;
  void validate() const;
};

struct NoiseOptions {
  // Default replacement draws uniformly over the K-1 other classes, so the
  // nominal rate equals the mislabel rate. allow_self_flip switches to the
  // uniform-over-K convention.
  bool allow_self_flip = false;
  // Selects exactly round(rate N) instances instead of independent
  // Bernoulli(rate) draws.
  bool exact_count = false;
};

/// Wraps a dataset with no corruption at all (rate 0, empty mask).
CorruptedDataset corrupt_none(const Dataset& ds);

CorruptedDataset corrupt_symmetric(const Dataset& ds, double rate, std::uint64_t seed,
                                   const NoiseOptions& options = {});

/// Selected instances of class c are relabeled to mapping[c]; classes mapped
/// to themselves are never corrupted.
CorruptedDataset corrupt_asymmetric(const Dataset& ds, double rate,
                                    const std::vector<std::int32_t>& mapping, std::uint64_t seed,
                                    const NoiseOptions& options = {});

/// K x K row-stochastic matrix T[c][c'] = fraction of ground-truth-c
/// instances carrying training label c'. Every class must occur.
std::vector<std::vector<double>> noise_transition_empirical(const CorruptedDataset& cds);

/// CSV with columns index,ground_truth,training_label,corrupted.
void export_provenance_csv(const CorruptedDataset& cds, const std::filesystem::path& path);

}  // namespace rda
