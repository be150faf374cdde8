#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rda {

/// Feature matrix plus class labels. Features are row-major N x dim; pixel
/// data is scaled to [0, 1]. Labels are dense in [0, num_classes).
struct Dataset {
  std::vector<double> features;
  std::vector<std::int32_t> labels;
  std::size_t dim = 0;
  std::size_t num_classes = 0;
  std::string name;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * dim, dim);
  }

  void validate() const;  // invariant check, throws InvalidInput
};

/// Per-feature affine transform, fit on one dataset and applicable to
/// another (train statistics applied to the test split).
struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> inv_std;  // 1 for constant features

  void apply(Dataset& ds) const;
};

FeatureScaler fit_feature_scaler(const Dataset& ds);

/// Optional per-feature standardization (mean 0, variance 1) in place.
/// Constant features are left centered only.
void standardize_features(Dataset& ds);

// IDX format: big-endian magics 0x00000803 (images) and 0x00000801 (labels).
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path);

/// Re-serializes a dataset into the IDX pair; rows x cols must equal dim.
/// Inverse of load_idx, byte-exact.
void save_idx(const Dataset& ds, const std::filesystem::path& images_path,
              const std::filesystem::path& labels_path, std::size_t rows, std::size_t cols);

struct Cifar10Data {
  Dataset train;  // 50000 x 3072
  Dataset test;   // 10000 x 3072
};

// CIFAR-10 binary batches: 3073-byte records (label byte + RGB planes).
Cifar10Data load_cifar10_binary(const std::filesystem::path& directory);

/// Single batch file of any record count (fixtures, partial data).
Dataset load_cifar10_batch_file(const std::filesystem::path& path);

/// Writes records in the CIFAR-10 binary layout. Inverse of the loader for
/// a single batch file, byte-exact.
void save_cifar10_batch(const Dataset& ds, const std::filesystem::path& path);

/// Gaussian blobs: class centers at seeded random directions scaled by
/// `separation`, points jittered by N(0, noise_scale^2).
Dataset generate_blobs(std::size_t num_classes, std::size_t per_class, std::size_t dim,
                       double separation, double noise_scale, std::uint64_t seed);

/// Seeded uniform subsample without replacement.
Dataset subsample(const Dataset& ds, std::size_t n, std::uint64_t seed);

/// Keeps the listed classes and relabels them densely in list order.
Dataset filter_classes(const Dataset& ds, const std::vector<std::int32_t>& classes);

/// Seeded shuffle-split into ceil(fraction N) and the remainder.
std::pair<Dataset, Dataset> split(const Dataset& ds, double fraction, std::uint64_t seed);

}  // namespace rda
