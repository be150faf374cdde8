#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rda/credal.hpp"
#include "rda/dataset.hpp"
#include "rda/losses.hpp"
#include "rda/metrics.hpp"
#include "rda/mlp.hpp"
#include "rda/noise.hpp"

namespace rda {

/// Where the training data comes from. name selects the source kind:
/// "blobs", "mnist" (directory with the four standard IDX files), "idx"
/// (explicit file pairs) or "cifar10".
struct DatasetSpec {
  std::string name = "blobs";
  std::filesystem::path dir;  // mnist / cifar10
  std::filesystem::path images, labels, test_images, test_labels;  // idx
  std::size_t blob_classes = 4, blob_per_class = 250, blob_dim = 16;
  double blob_separation = 4.0, blob_noise = 1.0;
  double test_fraction = 0.2;  // blobs only: held-out share
  std::uint64_t seed = 0;      // subsample / blob / split seed
  std::vector<std::int32_t> class_filter;
  std::size_t subsample_n = 0;  // 0 keeps everything
  bool standardize = false;

  void validate() const;
};

struct NoiseSpec {
  std::string kind = "none";  // none | symmetric | asymmetric
  double rate = 0.0;
  std::vector<std::int32_t> mapping;  // asymmetric class map
  std::uint64_t seed = 0;             // extra corruption entropy, mixed per run
  bool allow_self_flip = false;
  bool exact_count = false;

  void validate() const;
};

struct ModelSpec {
  std::vector<std::size_t> hidden_dims = {128, 128};
  Activation activation = Activation::ReLU;
};

// Defaults are artifact configuration; no reported experiment pins them.
struct OptimizerSpec {
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t batch_size = 64;
  int epochs = 100;

  void validate() const;
};

struct ExperimentConfig {
  int version = 1;
  DatasetSpec dataset;
  NoiseSpec noise;
  ModelSpec model;
  OptimizerSpec optimizer;
  LossSpec loss;
  RdaConfig rda;  // t_max always equals optimizer.epochs
  std::vector<std::uint64_t> seeds = {1};
  std::filesystem::path output_dir;

  void validate() const;
};

ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Canonical serialization (sorted keys, output_dir excluded); config_hash
/// is FNV-1a over it.
std::string canonical_config_json(const ExperimentConfig& cfg);
std::string config_hash_hex(const ExperimentConfig& cfg);

// Per-run RNG streams, derived from the run seed by fixed indices so that
// changing one stream never perturbs the others.
std::uint64_t corruption_seed_for(const ExperimentConfig& cfg, std::uint64_t run_seed);
std::uint64_t init_seed_for(std::uint64_t run_seed);
std::uint64_t shuffle_seed_for(std::uint64_t run_seed);

/// Train and test splits plus the ambient class count, assembled once and
/// shared read-only across seeds.
struct PreparedData {
  Dataset train;
  Dataset test;
};

PreparedData prepare_dataset(const DatasetSpec& spec);
CorruptedDataset apply_noise(const Dataset& train, const NoiseSpec& spec, std::uint64_t seed);

struct SeedResult {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double final_test_accuracy = 0.0;
  std::vector<EpochMetrics> epochs;
  std::filesystem::path metrics_csv;
  std::filesystem::path checkpoint;
};

struct RunSummary {
  std::string config_hash;
  std::vector<SeedResult> seeds;
  double mean_final_accuracy = 0.0;
  double std_final_accuracy = 0.0;  // unbiased; 0 for a single seed
  std::filesystem::path summary_path;
};

/// Full pipeline for every configured seed: corrupt, train, log per-epoch
/// metrics, checkpoint, aggregate. A diverged seed is recorded as failed
/// and the remaining seeds still run.
RunSummary run_experiment(const ExperimentConfig& cfg);

struct LossComparisonRow {
  std::string loss;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
};

/// Runs configs that share everything but the loss, one table row each.
/// Writes comparison.csv and comparison.txt under the first output dir.
std::vector<LossComparisonRow> compare_losses(const std::vector<ExperimentConfig>& cfgs);

/// Entry point behind the rda binary: train / compare / corrupt /
/// validate-config. Returns the process exit code (2 for usage errors).
int cli_main(int argc, const char* const* argv);

}  // namespace rda
