#include "rda/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "rda/error.hpp"
#include "rda/rng.hpp"

namespace rda {

std::size_t CorruptedDataset::num_corrupted() const {
  return static_cast<std::size_t>(
      std::count(corrupted_mask.begin(), corrupted_mask.end(), std::uint8_t{1}));
}

void CorruptedDataset::validate() const {
  base.validate();
  if (ground_truth.size() != base.size() || corrupted_mask.size() != base.size()) {
    throw InvalidInput("corrupted dataset: provenance arrays do not match N");
  }
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (ground_truth[i] < 0 ||
        static_cast<std::size_t>(ground_truth[i]) >= base.num_classes) {
      throw InvalidInput("corrupted dataset: ground-truth label out of range");
    }
    const bool differs = base.labels[i] != ground_truth[i];
    if (differs != (corrupted_mask[i] != 0)) {
      throw InvalidInput("corrupted dataset: mask inconsistent with labels");
    }
  }
  if (!(noise_rate >= 0.0 && noise_rate < 1.0)) {
    throw InvalidInput("corrupted dataset: rate must lie in [0, 1)");
  }
}

namespace {

// Instances chosen for relabeling, either Bernoulli(rate) per instance or
// exactly round(rate N) distinct indices.
std::vector<std::uint8_t> select_instances(std::size_t n, double rate, Rng& rng,
                                           bool exact_count) {
  std::vector<std::uint8_t> selected(n, 0);
  if (rate <= 0.0) return selected;
  if (exact_count) {
    const std::size_t count = static_cast<std::size_t>(
        std::llround(rate * static_cast<double>(n)));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + uniform_index(rng, n - i);
      std::swap(idx[i], idx[j]);
      selected[idx[i]] = 1;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      selected[i] = uniform_unit(rng) < rate ? 1 : 0;
    }
  }
  return selected;
}

CorruptedDataset finalize(const Dataset& ds, std::vector<std::int32_t> new_labels, double rate,
                          NoiseKind kind) {
  CorruptedDataset cds;
  cds.base = ds;
  cds.ground_truth = ds.labels;
  cds.base.labels = std::move(new_labels);
  cds.corrupted_mask.resize(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    cds.corrupted_mask[i] = cds.base.labels[i] != cds.ground_truth[i] ? 1 : 0;
  }
  cds.noise_rate = rate;
  cds.noise_kind = kind;
  cds.validate();
  return cds;
}

}  // namespace

CorruptedDataset corrupt_none(const Dataset& ds) {
  ds.validate();
  return finalize(ds, ds.labels, 0.0, NoiseKind::Symmetric);
}

CorruptedDataset corrupt_symmetric(const Dataset& ds, double rate, std::uint64_t seed,
                                   const NoiseOptions& options) {
  ds.validate();
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidInput("corrupt_symmetric: rate not in [0, 1)");
  if (ds.num_classes < 2) throw InvalidInput("corrupt_symmetric: needs K >= 2");
  const auto k = static_cast<std::int32_t>(ds.num_classes);
  Rng rng(seed);
  const std::vector<std::uint8_t> selected =
      select_instances(ds.size(), rate, rng, options.exact_count);
  std::vector<std::int32_t> labels = ds.labels;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (!selected[i]) continue;
    if (options.allow_self_flip) {
      labels[i] = static_cast<std::int32_t>(uniform_index(rng, ds.num_classes));
    } else {
      // Uniform over the K-1 other classes.
      auto draw = static_cast<std::int32_t>(uniform_index(rng, ds.num_classes - 1));
      if (draw >= labels[i]) ++draw;
      labels[i] = draw;
    }
    if (labels[i] >= k) throw ComputeError("corrupt_symmetric: internal draw out of range");
  }
  return finalize(ds, std::move(labels), rate, NoiseKind::Symmetric);
}

CorruptedDataset corrupt_asymmetric(const Dataset& ds, double rate,
                                    const std::vector<std::int32_t>& mapping, std::uint64_t seed,
                                    const NoiseOptions& options) {
  ds.validate();
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidInput("corrupt_asymmetric: rate not in [0, 1)");
  if (mapping.size() != ds.num_classes) {
    throw InvalidInput("corrupt_asymmetric: mapping must cover all K classes");
  }
  for (std::int32_t to : mapping) {
    if (to < 0 || static_cast<std::size_t>(to) >= ds.num_classes) {
      throw InvalidInput("corrupt_asymmetric: mapping target out of range");
    }
  }
  Rng rng(seed);
  const std::vector<std::uint8_t> selected =
      select_instances(ds.size(), rate, rng, options.exact_count);
  std::vector<std::int32_t> labels = ds.labels;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (selected[i]) labels[i] = mapping[labels[i]];
  }
  return finalize(ds, std::move(labels), rate, NoiseKind::Asymmetric);
}

std::vector<std::vector<double>> noise_transition_empirical(const CorruptedDataset& cds) {
  cds.validate();
  const std::size_t k = cds.base.num_classes;
  std::vector<std::vector<std::size_t>> counts(k, std::vector<std::size_t>(k, 0));
  std::vector<std::size_t> totals(k, 0);
  for (std::size_t i = 0; i < cds.size(); ++i) {
    const auto from = static_cast<std::size_t>(cds.ground_truth[i]);
    const auto to = static_cast<std::size_t>(cds.base.labels[i]);
    ++counts[from][to];
    ++totals[from];
  }
  std::vector<std::vector<double>> t(k, std::vector<double>(k, 0.0));
  for (std::size_t c = 0; c < k; ++c) {
    if (totals[c] == 0) {
      throw ComputeError("noise transition undefined: no instances of class " +
                         std::to_string(c));
    }
    for (std::size_t c2 = 0; c2 < k; ++c2) {
      t[c][c2] = static_cast<double>(counts[c][c2]) / static_cast<double>(totals[c]);
    }
  }
  return t;
}

void export_provenance_csv(const CorruptedDataset& cds, const std::filesystem::path& path) {
  cds.validate();
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string());
  os << "index,ground_truth,training_label,corrupted\n";
  for (std::size_t i = 0; i < cds.size(); ++i) {
    os << i << ',' << cds.ground_truth[i] << ',' << cds.base.labels[i] << ','
       << int(cds.corrupted_mask[i]) << '\n';
  }
  if (!os) throw IoError("provenance write failed: " + path.string());
}

}  // namespace rda
