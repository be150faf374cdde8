#include "rda/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "rda/error.hpp"
#include "rda/rng.hpp"

namespace rda {

namespace {

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
constexpr std::size_t kCifarRecordBytes = 3073;
constexpr std::size_t kCifarBatchRecords = 10000;

std::uint32_t read_be_u32(std::istream& is, const std::filesystem::path& path) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw IoError("truncated file: " + path.string());
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
         std::uint32_t(b[3]);
}

void write_be_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::vector<unsigned char> read_exact(std::istream& is, std::size_t n,
                                      const std::filesystem::path& path) {
  std::vector<unsigned char> buf(n);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) {
    throw IoError("truncated file: " + path.string());
  }
  return buf;
}

std::int32_t max_label(const std::vector<std::int32_t>& labels) {
  return *std::max_element(labels.begin(), labels.end());
}

}  // namespace

void Dataset::validate() const {
  if (labels.empty()) throw InvalidInput("dataset is empty");
  if (dim == 0) throw InvalidInput("dataset has zero feature dimension");
  if (features.size() != labels.size() * dim) {
    throw InvalidInput("feature row count does not match label count");
  }
  if (num_classes == 0) throw InvalidInput("dataset has zero classes");
  for (std::int32_t y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
      throw InvalidInput("label out of range: " + std::to_string(y));
    }
  }
  double acc = 0.0;
  for (double v : features) acc += std::abs(v);
  if (!std::isfinite(acc)) throw InvalidInput("dataset contains non-finite features");
}

void FeatureScaler::apply(Dataset& ds) const {
  if (mean.size() != ds.dim || inv_std.size() != ds.dim) {
    throw InvalidInput("feature scaler dimension mismatch");
  }
  const std::size_t n = ds.size();
  for (std::size_t i = 0; i < n; ++i) {
    double* row = ds.features.data() + i * ds.dim;
    for (std::size_t j = 0; j < ds.dim; ++j) {
      row[j] = (row[j] - mean[j]) * inv_std[j];
    }
  }
}

FeatureScaler fit_feature_scaler(const Dataset& ds) {
  ds.validate();
  const std::size_t n = ds.size();
  FeatureScaler scaler;
  scaler.mean.assign(ds.dim, 0.0);
  scaler.inv_std.assign(ds.dim, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = ds.features.data() + i * ds.dim;
    for (std::size_t j = 0; j < ds.dim; ++j) scaler.mean[j] += row[j];
  }
  for (double& m : scaler.mean) m /= static_cast<double>(n);
  std::vector<double> var(ds.dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = ds.features.data() + i * ds.dim;
    for (std::size_t j = 0; j < ds.dim; ++j) {
      const double d = row[j] - scaler.mean[j];
      var[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < ds.dim; ++j) {
    if (var[j] > 0.0) scaler.inv_std[j] = 1.0 / std::sqrt(var[j] / static_cast<double>(n));
  }
  return scaler;
}

void standardize_features(Dataset& ds) { fit_feature_scaler(ds).apply(ds); }

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path) {
  std::ifstream imgs(images_path, std::ios::binary);
  if (!imgs) throw IoError("cannot open " + images_path.string());
  if (read_be_u32(imgs, images_path) != kIdxImageMagic) {
    throw FormatError("bad IDX image magic in " + images_path.string());
  }
  const std::uint32_t n = read_be_u32(imgs, images_path);
  const std::uint32_t rows = read_be_u32(imgs, images_path);
  const std::uint32_t cols = read_be_u32(imgs, images_path);
  if (n == 0 || rows == 0 || cols == 0) {
    throw FormatError("empty IDX image file " + images_path.string());
  }
  const std::vector<unsigned char> pixels =
      read_exact(imgs, std::size_t(n) * rows * cols, images_path);

  std::ifstream lbls(labels_path, std::ios::binary);
  if (!lbls) throw IoError("cannot open " + labels_path.string());
  if (read_be_u32(lbls, labels_path) != kIdxLabelMagic) {
    throw FormatError("bad IDX label magic in " + labels_path.string());
  }
  const std::uint32_t n_labels = read_be_u32(lbls, labels_path);
  if (n_labels != n) {
    throw FormatError("IDX image/label counts disagree: " + std::to_string(n) + " vs " +
                      std::to_string(n_labels));
  }
  const std::vector<unsigned char> raw_labels = read_exact(lbls, n_labels, labels_path);

  Dataset ds;
  ds.dim = std::size_t(rows) * cols;
  ds.name = "idx:" + images_path.filename().string();
  ds.features.resize(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    ds.features[i] = static_cast<double>(pixels[i]) / 255.0;
  }
  ds.labels.assign(raw_labels.begin(), raw_labels.end());
  ds.num_classes = static_cast<std::size_t>(max_label(ds.labels)) + 1;
  ds.validate();
  return ds;
}

void save_idx(const Dataset& ds, const std::filesystem::path& images_path,
              const std::filesystem::path& labels_path, std::size_t rows, std::size_t cols) {
  ds.validate();
  if (rows * cols != ds.dim) throw InvalidInput("save_idx: rows x cols must equal dim");
  if (static_cast<std::size_t>(max_label(ds.labels)) > 255) {
    throw InvalidInput("save_idx: labels exceed one byte");
  }
  std::ofstream imgs(images_path, std::ios::binary);
  if (!imgs) throw IoError("cannot open " + images_path.string());
  write_be_u32(imgs, kIdxImageMagic);
  write_be_u32(imgs, static_cast<std::uint32_t>(ds.size()));
  write_be_u32(imgs, static_cast<std::uint32_t>(rows));
  write_be_u32(imgs, static_cast<std::uint32_t>(cols));
  for (double v : ds.features) {
    const long b = std::lround(v * 255.0);
    imgs.put(static_cast<char>(std::clamp(b, 0L, 255L)));
  }
  std::ofstream lbls(labels_path, std::ios::binary);
  if (!lbls) throw IoError("cannot open " + labels_path.string());
  write_be_u32(lbls, kIdxLabelMagic);
  write_be_u32(lbls, static_cast<std::uint32_t>(ds.size()));
  for (std::int32_t y : ds.labels) lbls.put(static_cast<char>(y));
  if (!imgs || !lbls) throw IoError("IDX write failed");
}

namespace {

Dataset load_cifar_records(const std::filesystem::path& path, Dataset&& into) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  const auto size = std::filesystem::file_size(path);
  if (size == 0 || size % kCifarRecordBytes != 0) {
    throw FormatError("CIFAR-10 batch has wrong size: " + path.string());
  }
  const std::size_t records = size / kCifarRecordBytes;
  const std::vector<unsigned char> raw = read_exact(is, size, path);
  into.dim = kCifarRecordBytes - 1;
  into.num_classes = 10;
  into.features.reserve(into.features.size() + records * into.dim);
  into.labels.reserve(into.labels.size() + records);
  for (std::size_t r = 0; r < records; ++r) {
    const unsigned char* rec = raw.data() + r * kCifarRecordBytes;
    if (rec[0] >= 10) {
      throw FormatError("CIFAR-10 label byte out of range in " + path.string());
    }
    into.labels.push_back(rec[0]);
    for (std::size_t j = 1; j < kCifarRecordBytes; ++j) {
      into.features.push_back(static_cast<double>(rec[j]) / 255.0);
    }
  }
  return std::move(into);
}

}  // namespace

Cifar10Data load_cifar10_binary(const std::filesystem::path& directory) {
  Cifar10Data data;
  data.train.name = "cifar10-train";
  for (int b = 1; b <= 5; ++b) {
    const auto path = directory / ("data_batch_" + std::to_string(b) + ".bin");
    const auto expected = kCifarBatchRecords * kCifarRecordBytes;
    if (!std::filesystem::exists(path)) throw IoError("missing " + path.string());
    if (std::filesystem::file_size(path) != expected) {
      throw FormatError("CIFAR-10 training batch has wrong size: " + path.string());
    }
    data.train = load_cifar_records(path, std::move(data.train));
  }
  data.test.name = "cifar10-test";
  const auto test_path = directory / "test_batch.bin";
  if (!std::filesystem::exists(test_path)) throw IoError("missing " + test_path.string());
  if (std::filesystem::file_size(test_path) != kCifarBatchRecords * kCifarRecordBytes) {
    throw FormatError("CIFAR-10 test batch has wrong size: " + test_path.string());
  }
  data.test = load_cifar_records(test_path, std::move(data.test));
  data.train.validate();
  data.test.validate();
  return data;
}

Dataset load_cifar10_batch_file(const std::filesystem::path& path) {
  Dataset ds;
  ds.name = "cifar10:" + path.filename().string();
  ds = load_cifar_records(path, std::move(ds));
  ds.validate();
  return ds;
}

void save_cifar10_batch(const Dataset& ds, const std::filesystem::path& path) {
  ds.validate();
  if (ds.dim != kCifarRecordBytes - 1) {
    throw InvalidInput("save_cifar10_batch: dim must be 3072");
  }
  if (max_label(ds.labels) > 9) throw InvalidInput("save_cifar10_batch: labels must be < 10");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    os.put(static_cast<char>(ds.labels[i]));
    const auto row = ds.row(i);
    for (double v : row) {
      const long b = std::lround(v * 255.0);
      os.put(static_cast<char>(std::clamp(b, 0L, 255L)));
    }
  }
  if (!os) throw IoError("CIFAR-10 write failed: " + path.string());
}

Dataset generate_blobs(std::size_t num_classes, std::size_t per_class, std::size_t dim,
                       double separation, double noise_scale, std::uint64_t seed) {
  if (num_classes == 0 || per_class == 0 || dim == 0) {
    throw InvalidInput("generate_blobs: sizes must be positive");
  }
  if (!(separation > 0.0)) throw InvalidInput("generate_blobs: separation must be positive");
  if (!(noise_scale >= 0.0)) throw InvalidInput("generate_blobs: noise_scale must be >= 0");
  Rng rng(seed);
  // Centers first so that point noise does not perturb the geometry across
  // per_class values.
  std::vector<double> centers(num_classes * dim);
  for (std::size_t c = 0; c < num_classes; ++c) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double g = gaussian(rng);
        centers[c * dim + j] = g;
        norm2 += g * g;
      }
    } while (norm2 == 0.0);
    const double scale = separation / std::sqrt(norm2);
    for (std::size_t j = 0; j < dim; ++j) centers[c * dim + j] *= scale;
  }
  Dataset ds;
  ds.dim = dim;
  ds.num_classes = num_classes;
  ds.name = "blobs";
  ds.features.resize(num_classes * per_class * dim);
  ds.labels.resize(num_classes * per_class);
  std::size_t i = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (std::size_t p = 0; p < per_class; ++p, ++i) {
      ds.labels[i] = static_cast<std::int32_t>(c);
      for (std::size_t j = 0; j < dim; ++j) {
        ds.features[i * dim + j] = centers[c * dim + j] + noise_scale * gaussian(rng);
      }
    }
  }
  ds.validate();
  return ds;
}

namespace {

Dataset take_rows(const Dataset& ds, std::span<const std::size_t> idx) {
  Dataset out;
  out.dim = ds.dim;
  out.num_classes = ds.num_classes;
  out.name = ds.name;
  out.features.resize(idx.size() * ds.dim);
  out.labels.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto row = ds.row(idx[i]);
    std::copy(row.begin(), row.end(), out.features.begin() + i * ds.dim);
    out.labels[i] = ds.labels[idx[i]];
  }
  out.validate();
  return out;
}

}  // namespace

Dataset subsample(const Dataset& ds, std::size_t n, std::uint64_t seed) {
  ds.validate();
  if (n == 0 || n > ds.size()) throw InvalidInput("subsample: n must lie in [1, N]");
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + uniform_index(rng, idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  return take_rows(ds, std::span<const std::size_t>(idx).first(n));
}

Dataset filter_classes(const Dataset& ds, const std::vector<std::int32_t>& classes) {
  ds.validate();
  if (classes.empty()) throw InvalidInput("filter_classes: class list is empty");
  std::vector<std::int32_t> remap(ds.num_classes, -1);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const std::int32_t c = classes[i];
    if (c < 0 || static_cast<std::size_t>(c) >= ds.num_classes) {
      throw InvalidInput("filter_classes: class out of range: " + std::to_string(c));
    }
    if (remap[c] != -1) throw InvalidInput("filter_classes: duplicate class in list");
    remap[c] = static_cast<std::int32_t>(i);
  }
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (remap[ds.labels[i]] != -1) idx.push_back(i);
  }
  if (idx.empty()) throw InvalidInput("filter_classes: no instances of the listed classes");
  Dataset out = take_rows(ds, idx);
  for (auto& y : out.labels) y = remap[y];
  out.num_classes = classes.size();
  out.validate();
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double fraction, std::uint64_t seed) {
  ds.validate();
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidInput("split: fraction must lie in (0, 1)");
  }
  const std::size_t n1 =
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(ds.size())));
  if (n1 == 0 || n1 >= ds.size()) {
    throw InvalidInput("split: fraction leaves an empty part");
  }
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
    const std::size_t j = i + uniform_index(rng, idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  const std::span<const std::size_t> all(idx);
  return {take_rows(ds, all.first(n1)), take_rows(ds, all.subspan(n1))};
}

}  // namespace rda
