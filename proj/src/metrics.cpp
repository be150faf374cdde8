#include "rda/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "rda/error.hpp"

namespace rda {

const char* const kMetricsCsvHeader =
    "epoch,beta,test_accuracy,frac_correct,frac_memorized,frac_other,mean_conf_clean,"
    "mean_conf_noisy,mean_credal_size_noisy,mean_credal_size_clean,validity";

void EpochMetrics::validate() const {
  const auto in_unit = [](const std::optional<double>& v) {
    return !v || (*v >= 0.0 && *v <= 1.0);
  };
  if (epoch < 0) throw InvalidInput("metrics: negative epoch");
  if (!(test_accuracy >= 0.0 && test_accuracy <= 1.0)) {
    throw InvalidInput("metrics: test accuracy outside [0, 1]");
  }
  if (!in_unit(frac_correct) || !in_unit(frac_memorized) || !in_unit(frac_other) ||
      !in_unit(mean_conf_clean) || !in_unit(mean_conf_noisy) || !in_unit(validity)) {
    throw InvalidInput("metrics: fraction outside [0, 1]");
  }
  if (frac_correct.has_value() != frac_memorized.has_value() ||
      frac_correct.has_value() != frac_other.has_value()) {
    throw InvalidInput("metrics: partial noisy-prediction partition");
  }
  if (frac_correct) {
    const double sum = *frac_correct + *frac_memorized + *frac_other;
    if (std::abs(sum - 1.0) > 1e-9) {
      throw InvalidInput("metrics: noisy fractions sum to " + std::to_string(sum));
    }
  }
  for (const auto& size : {mean_credal_size_noisy, mean_credal_size_clean}) {
    if (size && !(*size >= 1.0)) {
      throw InvalidInput("metrics: mean credal size below 1");
    }
  }
}

namespace {

void append_value(std::string& line, const std::optional<double>& v) {
  char buf[40];
  if (v) {
    std::snprintf(buf, sizeof(buf), "%.17g", *v);
  } else {
    std::snprintf(buf, sizeof(buf), "nan");
  }
  line += ',';
  line += buf;
}

}  // namespace

void write_metrics_csv_header(std::ostream& os) { os << kMetricsCsvHeader << '\n'; }

void write_metrics_csv_row(std::ostream& os, const EpochMetrics& m) {
  m.validate();
  std::string line = std::to_string(m.epoch);
  append_value(line, m.beta);
  append_value(line, m.test_accuracy);
  append_value(line, m.frac_correct);
  append_value(line, m.frac_memorized);
  append_value(line, m.frac_other);
  append_value(line, m.mean_conf_clean);
  append_value(line, m.mean_conf_noisy);
  append_value(line, m.mean_credal_size_noisy);
  append_value(line, m.mean_credal_size_clean);
  append_value(line, m.validity);
  os << line << '\n';
}

namespace {

void check_alignment(const CorruptedDataset& cds,
                     const std::vector<CategoricalDistribution>& predictions) {
  if (predictions.size() != cds.size()) {
    throw InvalidInput("metrics: predictions not aligned with dataset");
  }
  if (!predictions.empty() && predictions.front().num_classes() != cds.base.num_classes) {
    throw InvalidInput("metrics: prediction arity does not match dataset classes");
  }
}

}  // namespace

std::optional<NoisyPredictionFractions> classify_noisy_predictions(
    const CorruptedDataset& cds, const std::vector<CategoricalDistribution>& predictions) {
  check_alignment(cds, predictions);
  std::size_t corrupted = 0, correct = 0, memorized = 0;
  for (std::size_t i = 0; i < cds.size(); ++i) {
    if (!cds.corrupted_mask[i]) continue;
    ++corrupted;
    const auto c = static_cast<std::int32_t>(predictions[i].argmax());
    if (c == cds.ground_truth[i]) {
      ++correct;
    } else if (c == cds.base.labels[i]) {
      ++memorized;
    }
  }
  if (corrupted == 0) return std::nullopt;
  const double n = static_cast<double>(corrupted);
  NoisyPredictionFractions f;
  f.frac_correct = static_cast<double>(correct) / n;
  f.frac_memorized = static_cast<double>(memorized) / n;
  f.frac_other = static_cast<double>(corrupted - correct - memorized) / n;
  return f;
}

ConfidenceSplit confidence_split(const CorruptedDataset& cds,
                                 const std::vector<CategoricalDistribution>& predictions) {
  check_alignment(cds, predictions);
  double sum_clean = 0.0, sum_noisy = 0.0;
  std::size_t n_clean = 0, n_noisy = 0;
  for (std::size_t i = 0; i < cds.size(); ++i) {
    const double conf = predictions[i].max_prob();
    if (cds.corrupted_mask[i]) {
      sum_noisy += conf;
      ++n_noisy;
    } else {
      sum_clean += conf;
      ++n_clean;
    }
  }
  ConfidenceSplit out;
  if (n_clean > 0) out.mean_conf_clean = sum_clean / static_cast<double>(n_clean);
  if (n_noisy > 0) out.mean_conf_noisy = sum_noisy / static_cast<double>(n_noisy);
  return out;
}

CredalStats credal_statistics(const CorruptedDataset& cds,
                              const std::vector<CategoricalDistribution>& predictions,
                              const RdaConfig& cfg, int epoch) {
  check_alignment(cds, predictions);
  const double beta = beta_at(cfg, epoch);
  double size_noisy = 0.0, size_clean = 0.0, valid_noisy = 0.0, valid_clean = 0.0;
  std::size_t n_noisy = 0, n_clean = 0;
  for (std::size_t i = 0; i < cds.size(); ++i) {
    const PossibilityDistribution pi = build_possibility(
        static_cast<std::size_t>(cds.base.labels[i]), predictions[i], beta, cfg.alpha);
    const auto size = static_cast<double>(credal_size(pi));
    const bool valid = is_valid_credal(pi, static_cast<std::size_t>(cds.ground_truth[i]));
    if (cds.corrupted_mask[i]) {
      size_noisy += size;
      valid_noisy += valid ? 1.0 : 0.0;
      ++n_noisy;
    } else {
      size_clean += size;
      valid_clean += valid ? 1.0 : 0.0;
      ++n_clean;
    }
  }
  CredalStats out;
  if (n_noisy > 0) {
    out.mean_size_noisy = size_noisy / static_cast<double>(n_noisy);
    out.validity = valid_noisy / static_cast<double>(n_noisy);
  }
  if (n_clean > 0) {
    out.mean_size_clean = size_clean / static_cast<double>(n_clean);
    out.validity_clean = valid_clean / static_cast<double>(n_clean);
  }
  return out;
}

double test_accuracy(const MlpModel& model, const Dataset& test_ds) {
  test_ds.validate();
  if (test_ds.dim != model.input_dim()) {
    throw InvalidInput("test_accuracy: feature dimension does not match model");
  }
  if (test_ds.num_classes != model.num_classes()) {
    throw InvalidInput("test_accuracy: class count does not match model");
  }
  const std::size_t n = test_ds.size();
  const std::size_t k = model.num_classes();
  const std::vector<double> logits = predict_logits(model, test_ds.features, n);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = logits.data() + i * k;
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j) {
      if (row[j] > row[best]) best = j;
    }
    if (static_cast<std::int32_t>(best) == test_ds.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace rda
