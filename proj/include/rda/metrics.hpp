#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "rda/credal.hpp"
#include "rda/mlp.hpp"
#include "rda/noise.hpp"
#include "rda/prob.hpp"

namespace rda {

/// One row of the training diagnostics. Fields that are undefined for a run
/// (no corrupted instances, or a loss without an ambiguation schedule) are
/// absent rather than zero and serialize as "nan".
struct EpochMetrics {
  int epoch = 0;
  std::optional<double> beta;
  double test_accuracy = 0.0;
  std::optional<double> frac_correct;    // noisy instances predicted as ground truth
  std::optional<double> frac_memorized;  // predicted as the corrupted training label
  std::optional<double> frac_other;
  std::optional<double> mean_conf_clean;
  std::optional<double> mean_conf_noisy;
  std::optional<double> mean_credal_size_noisy;
  std::optional<double> mean_credal_size_clean;
  std::optional<double> validity;  // noisy credal sets covering the ground truth

  void validate() const;  // partition and range invariants
};

/// Fixed CSV schema for metric rows.
extern const char* const kMetricsCsvHeader;
void write_metrics_csv_header(std::ostream& os);
void write_metrics_csv_row(std::ostream& os, const EpochMetrics& m);

struct NoisyPredictionFractions {
  double frac_correct = 0.0;
  double frac_memorized = 0.0;
  double frac_other = 0.0;
};

/// Fractions over the corrupted instances only; absent when none exist.
/// Argmax ties break toward the lowest class index.
std::optional<NoisyPredictionFractions> classify_noisy_predictions(
    const CorruptedDataset& cds, const std::vector<CategoricalDistribution>& predictions);

struct ConfidenceSplit {
  std::optional<double> mean_conf_clean;
  std::optional<double> mean_conf_noisy;
};

/// Mean max-probability, partitioned by the corruption mask.
ConfidenceSplit confidence_split(const CorruptedDataset& cds,
                                 const std::vector<CategoricalDistribution>& predictions);

struct CredalStats {
  std::optional<double> mean_size_noisy;
  std::optional<double> mean_size_clean;
  std::optional<double> validity;        // over corrupted instances
  std::optional<double> validity_clean;  // trivially 1; regression tripwire
};

/// Builds each instance's possibility distribution from its training label
/// and the epoch's threshold, then averages sizes and validity.
CredalStats credal_statistics(const CorruptedDataset& cds,
                              const std::vector<CategoricalDistribution>& predictions,
                              const RdaConfig& cfg, int epoch);

/// Fraction of argmax-correct predictions on a test set.
double test_accuracy(const MlpModel& model, const Dataset& test_ds);

}  // namespace rda
