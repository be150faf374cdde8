#include "rda/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rda/error.hpp"
#include "rda/rng.hpp"

namespace rda {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config validation
// ---------------------------------------------------------------------------

void DatasetSpec::validate() const {
  if (name != "blobs" && name != "mnist" && name != "idx" && name != "cifar10") {
    throw InvalidInput("dataset.name must be blobs, mnist, idx or cifar10");
  }
  if (name == "blobs") {
    if (blob_classes < 2 || blob_per_class == 0 || blob_dim == 0) {
      throw InvalidInput("dataset: blob sizes must be positive (classes >= 2)");
    }
    if (!(blob_separation > 0.0)) throw InvalidInput("dataset: separation must be positive");
    if (!(blob_noise >= 0.0)) throw InvalidInput("dataset: noise_scale must be >= 0");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
      throw InvalidInput("dataset: test_fraction must lie in (0, 1)");
    }
  }
  if ((name == "mnist" || name == "cifar10") && dir.empty()) {
    throw InvalidInput("dataset: '" + name + "' needs a dir");
  }
  if (name == "idx" &&
      (images.empty() || labels.empty() || test_images.empty() || test_labels.empty())) {
    throw InvalidInput("dataset: 'idx' needs images/labels/test_images/test_labels");
  }
}

void NoiseSpec::validate() const {
  if (kind != "none" && kind != "symmetric" && kind != "asymmetric") {
    throw InvalidInput("noise.kind must be none, symmetric or asymmetric");
  }
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidInput("noise.rate must lie in [0, 1)");
  if (kind == "asymmetric" && mapping.empty()) {
    throw InvalidInput("asymmetric noise needs an explicit class mapping");
  }
}

void OptimizerSpec::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidInput("optimizer.learning_rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw InvalidInput("optimizer.momentum must lie in [0, 1)");
  }
  if (batch_size == 0) throw InvalidInput("optimizer.batch_size must be positive");
  if (epochs < 1) throw InvalidInput("optimizer.epochs must be >= 1");
}

void ExperimentConfig::validate() const {
  if (version != 1) throw InvalidInput("config version must be 1");
  dataset.validate();
  noise.validate();
  optimizer.validate();
  loss.validate();
  rda.validate();
  if (rda.t_max != optimizer.epochs) {
    throw InvalidInput("rda schedule length must equal optimizer.epochs");
  }
  for (std::size_t h : model.hidden_dims) {
    if (h == 0) throw InvalidInput("model.hidden_dims entries must be positive");
  }
  if (seeds.empty()) throw InvalidInput("seeds must be nonempty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw InvalidInput("seeds must be distinct");
  }
}

// ---------------------------------------------------------------------------
// JSON parsing
// ---------------------------------------------------------------------------

namespace {

void check_keys(const json& obj, const char* ctx, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw InvalidInput(std::string("config: ") + ctx + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return it.key() == k;
        }) == allowed.end()) {
      throw InvalidInput("config: unknown key '" + it.key() + "' in " + ctx);
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("config: key '") + key + "' has the wrong type");
  }
}

DatasetSpec parse_dataset(const json& j) {
  check_keys(j, "dataset",
             {"name", "dir", "images", "labels", "test_images", "test_labels", "classes",
              "per_class", "dim", "separation", "noise_scale", "test_fraction", "seed",
              "filter_classes", "subsample", "standardize"});
  DatasetSpec spec;
  spec.name = get_or<std::string>(j, "name", spec.name);
  spec.dir = get_or<std::string>(j, "dir", "");
  spec.images = get_or<std::string>(j, "images", "");
  spec.labels = get_or<std::string>(j, "labels", "");
  spec.test_images = get_or<std::string>(j, "test_images", "");
  spec.test_labels = get_or<std::string>(j, "test_labels", "");
  spec.blob_classes = get_or<std::size_t>(j, "classes", spec.blob_classes);
  spec.blob_per_class = get_or<std::size_t>(j, "per_class", spec.blob_per_class);
  spec.blob_dim = get_or<std::size_t>(j, "dim", spec.blob_dim);
  spec.blob_separation = get_or<double>(j, "separation", spec.blob_separation);
  spec.blob_noise = get_or<double>(j, "noise_scale", spec.blob_noise);
  spec.test_fraction = get_or<double>(j, "test_fraction", spec.test_fraction);
  spec.seed = get_or<std::uint64_t>(j, "seed", spec.seed);
  spec.class_filter = get_or<std::vector<std::int32_t>>(j, "filter_classes", {});
  spec.subsample_n = get_or<std::size_t>(j, "subsample", 0);
  spec.standardize = get_or<bool>(j, "standardize", false);
  return spec;
}

NoiseSpec parse_noise(const json& j) {
  check_keys(j, "noise", {"kind", "rate", "mapping", "seed", "allow_self_flip", "exact_count"});
  NoiseSpec spec;
  spec.kind = get_or<std::string>(j, "kind", spec.kind);
  spec.rate = get_or<double>(j, "rate", spec.rate);
  spec.mapping = get_or<std::vector<std::int32_t>>(j, "mapping", {});
  spec.seed = get_or<std::uint64_t>(j, "seed", 0);
  spec.allow_self_flip = get_or<bool>(j, "allow_self_flip", false);
  spec.exact_count = get_or<bool>(j, "exact_count", false);
  return spec;
}

ModelSpec parse_model(const json& j) {
  check_keys(j, "model", {"hidden_dims", "activation"});
  ModelSpec spec;
  spec.hidden_dims = get_or<std::vector<std::size_t>>(j, "hidden_dims", spec.hidden_dims);
  spec.activation = activation_from_string(get_or<std::string>(j, "activation", "relu"));
  return spec;
}

OptimizerSpec parse_optimizer(const json& j) {
  check_keys(j, "optimizer", {"learning_rate", "momentum", "batch_size", "epochs"});
  OptimizerSpec spec;
  spec.learning_rate = get_or<double>(j, "learning_rate", spec.learning_rate);
  spec.momentum = get_or<double>(j, "momentum", spec.momentum);
  spec.batch_size = get_or<std::size_t>(j, "batch_size", spec.batch_size);
  spec.epochs = get_or<int>(j, "epochs", spec.epochs);
  return spec;
}

void parse_loss(const json& j, LossSpec& loss, RdaConfig& rda) {
  check_keys(j, "loss", {"kind", "alpha", "q", "beta0", "beta1", "static_beta"});
  loss.kind = loss_kind_from_string(get_or<std::string>(j, "kind", "ce"));
  if (j.contains("alpha")) loss.alpha = j.at("alpha").get<double>();
  if (j.contains("q")) loss.q = j.at("q").get<double>();
  rda.beta0 = get_or<double>(j, "beta0", rda.beta0);
  rda.beta1 = get_or<double>(j, "beta1", rda.beta1);
  if (j.contains("static_beta")) rda.static_beta = j.at("static_beta").get<double>();
  if (loss.kind == LossKind::RDA && loss.alpha) rda.alpha = *loss.alpha;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"version", "dataset", "noise", "model", "optimizer", "loss", "seeds",
              "output_dir"});
  if (!j.contains("version")) throw InvalidInput("config: missing 'version'");
  ExperimentConfig cfg;
  cfg.version = j.at("version").get<int>();
  if (j.contains("dataset")) cfg.dataset = parse_dataset(j.at("dataset"));
  if (j.contains("noise")) cfg.noise = parse_noise(j.at("noise"));
  if (j.contains("model")) cfg.model = parse_model(j.at("model"));
  if (j.contains("optimizer")) cfg.optimizer = parse_optimizer(j.at("optimizer"));
  if (j.contains("loss")) parse_loss(j.at("loss"), cfg.loss, cfg.rda);
  cfg.rda.t_max = cfg.optimizer.epochs;
  cfg.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", {1});
  cfg.output_dir = get_or<std::string>(j, "output_dir", "");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config: " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_json(buf.str());
}

// ---------------------------------------------------------------------------
// Canonical form and hashing
// ---------------------------------------------------------------------------

namespace {

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["version"] = cfg.version;
  json d;
  d["name"] = cfg.dataset.name;
  d["dir"] = cfg.dataset.dir.string();
  d["images"] = cfg.dataset.images.string();
  d["labels"] = cfg.dataset.labels.string();
  d["test_images"] = cfg.dataset.test_images.string();
  d["test_labels"] = cfg.dataset.test_labels.string();
  d["classes"] = cfg.dataset.blob_classes;
  d["per_class"] = cfg.dataset.blob_per_class;
  d["dim"] = cfg.dataset.blob_dim;
  d["separation"] = cfg.dataset.blob_separation;
  d["noise_scale"] = cfg.dataset.blob_noise;
  d["test_fraction"] = cfg.dataset.test_fraction;
  d["seed"] = cfg.dataset.seed;
  d["filter_classes"] = cfg.dataset.class_filter;
  d["subsample"] = cfg.dataset.subsample_n;
  d["standardize"] = cfg.dataset.standardize;
  j["dataset"] = d;
  json n;
  n["kind"] = cfg.noise.kind;
  n["rate"] = cfg.noise.rate;
  n["mapping"] = cfg.noise.mapping;
  n["seed"] = cfg.noise.seed;
  n["allow_self_flip"] = cfg.noise.allow_self_flip;
  n["exact_count"] = cfg.noise.exact_count;
  j["noise"] = n;
  json m;
  m["hidden_dims"] = cfg.model.hidden_dims;
  m["activation"] = to_string(cfg.model.activation);
  j["model"] = m;
  json o;
  o["learning_rate"] = cfg.optimizer.learning_rate;
  o["momentum"] = cfg.optimizer.momentum;
  o["batch_size"] = cfg.optimizer.batch_size;
  o["epochs"] = cfg.optimizer.epochs;
  j["optimizer"] = o;
  json l;
  l["kind"] = to_string(cfg.loss.kind);
  if (cfg.loss.alpha) l["alpha"] = *cfg.loss.alpha;
  if (cfg.loss.q) l["q"] = *cfg.loss.q;
  if (cfg.loss.kind == LossKind::RDA) {
    l["beta0"] = cfg.rda.beta0;
    l["beta1"] = cfg.rda.beta1;
    if (cfg.rda.static_beta) l["static_beta"] = *cfg.rda.static_beta;
  }
  j["loss"] = l;
  j["seeds"] = cfg.seeds;
  return j;
}

}  // namespace

std::string canonical_config_json(const ExperimentConfig& cfg) {
  return config_to_json(cfg).dump();
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
  const std::string s = canonical_config_json(cfg);
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Data assembly and RNG streams
// ---------------------------------------------------------------------------

std::uint64_t corruption_seed_for(const ExperimentConfig& cfg, std::uint64_t run_seed) {
  return derive_stream_seed(run_seed ^ splitmix64(cfg.noise.seed), 0);
}
std::uint64_t init_seed_for(std::uint64_t run_seed) { return derive_stream_seed(run_seed, 1); }
std::uint64_t shuffle_seed_for(std::uint64_t run_seed) { return derive_stream_seed(run_seed, 2); }

PreparedData prepare_dataset(const DatasetSpec& spec) {
  spec.validate();
  PreparedData data;
  if (spec.name == "blobs") {
    Dataset all = generate_blobs(spec.blob_classes, spec.blob_per_class, spec.blob_dim,
                                 spec.blob_separation, spec.blob_noise, spec.seed);
    auto parts = split(all, 1.0 - spec.test_fraction, derive_stream_seed(spec.seed, 10));
    data.train = std::move(parts.first);
    data.test = std::move(parts.second);
  } else if (spec.name == "mnist") {
    data.train = load_idx(spec.dir / "train-images-idx3-ubyte", spec.dir / "train-labels-idx1-ubyte");
    data.test = load_idx(spec.dir / "t10k-images-idx3-ubyte", spec.dir / "t10k-labels-idx1-ubyte");
  } else if (spec.name == "idx") {
    data.train = load_idx(spec.images, spec.labels);
    data.test = load_idx(spec.test_images, spec.test_labels);
  } else {  // cifar10
    Cifar10Data cifar = load_cifar10_binary(spec.dir);
    data.train = std::move(cifar.train);
    data.test = std::move(cifar.test);
  }
  if (!spec.class_filter.empty()) {
    data.train = filter_classes(data.train, spec.class_filter);
    data.test = filter_classes(data.test, spec.class_filter);
  }
  if (spec.subsample_n > 0) {
    data.train = subsample(data.train, spec.subsample_n, spec.seed);
  }
  if (spec.standardize) {
    const FeatureScaler scaler = fit_feature_scaler(data.train);
    scaler.apply(data.train);
    scaler.apply(data.test);
  }
  if (data.train.num_classes != data.test.num_classes || data.train.dim != data.test.dim) {
    throw InvalidInput("train and test splits disagree on shape");
  }
  return data;
}

CorruptedDataset apply_noise(const Dataset& train, const NoiseSpec& spec, std::uint64_t seed) {
  spec.validate();
  NoiseOptions options;
  options.allow_self_flip = spec.allow_self_flip;
  options.exact_count = spec.exact_count;
  if (spec.kind == "none" || spec.rate == 0.0) return corrupt_none(train);
  if (spec.kind == "symmetric") return corrupt_symmetric(train, spec.rate, seed, options);
  return corrupt_asymmetric(train, spec.rate, spec.mapping, seed, options);
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace {

struct TrainOutput {
  MlpModel model;
  std::vector<EpochMetrics> epochs;
};

EpochMetrics evaluate_epoch(const ExperimentConfig& cfg, const CorruptedDataset& cds,
                            const Dataset& test, const MlpModel& model, int epoch) {
  EpochMetrics m;
  m.epoch = epoch;
  m.test_accuracy = test_accuracy(model, test);
  const std::vector<CategoricalDistribution> preds =
      predict(model, cds.base.features, cds.size());
  if (const auto fractions = classify_noisy_predictions(cds, preds)) {
    m.frac_correct = fractions->frac_correct;
    m.frac_memorized = fractions->frac_memorized;
    m.frac_other = fractions->frac_other;
  }
  const ConfidenceSplit conf = confidence_split(cds, preds);
  m.mean_conf_clean = conf.mean_conf_clean;
  m.mean_conf_noisy = conf.mean_conf_noisy;
  if (cfg.loss.kind == LossKind::RDA) {
    m.beta = beta_at(cfg.rda, epoch);
    const CredalStats stats = credal_statistics(cds, preds, cfg.rda, epoch);
    m.mean_credal_size_noisy = stats.mean_size_noisy;
    m.mean_credal_size_clean = stats.mean_size_clean;
    m.validity = stats.validity;
  }
  return m;
}

TrainOutput train_one_seed(const ExperimentConfig& cfg, const PreparedData& data,
                           std::uint64_t run_seed, std::ostream& csv) {
  const CorruptedDataset cds =
      apply_noise(data.train, cfg.noise, corruption_seed_for(cfg, run_seed));
  const std::size_t n = cds.size();
  const std::size_t dim = data.train.dim;
  const std::size_t k = data.train.num_classes;
  if (k < 2) throw InvalidInput("training needs at least two classes");

  std::vector<std::size_t> dims;
  dims.push_back(dim);
  dims.insert(dims.end(), cfg.model.hidden_dims.begin(), cfg.model.hidden_dims.end());
  dims.push_back(k);
  MlpModel model = init_model(dims, cfg.model.activation, init_seed_for(run_seed));
  SgdState sgd = make_sgd_state(model, cfg.optimizer.learning_rate, cfg.optimizer.momentum);
  const std::unique_ptr<LogitLoss> loss = make_logit_loss(cfg.loss, cfg.rda);

  Rng shuffle_rng(shuffle_seed_for(run_seed));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch_size = std::min<std::size_t>(cfg.optimizer.batch_size, n);
  std::vector<double> batch_x(batch_size * dim);
  std::vector<double> logit_grads(batch_size * k);

  TrainOutput out;
  write_metrics_csv_header(csv);
  for (int epoch = 0; epoch < cfg.optimizer.epochs; ++epoch) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t j = i + uniform_index(shuffle_rng, n - i);
      std::swap(order[i], order[j]);
    }
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t b = std::min(batch_size, n - start);
      for (std::size_t i = 0; i < b; ++i) {
        const auto row = cds.base.row(order[start + i]);
        std::copy(row.begin(), row.end(), batch_x.begin() + i * dim);
      }
      const ForwardResult fwd =
          forward_batch(model, std::span<const double>(batch_x).first(b * dim), b);
      double batch_loss = 0.0;
      for (std::size_t i = 0; i < b; ++i) {
        const auto row = fwd.logits_row(i, k);
        LogitVector z(std::vector<double>(row.begin(), row.end()));
        batch_loss += loss->eval(static_cast<std::size_t>(cds.base.labels[order[start + i]]), z,
                                 epoch, std::span<double>(logit_grads).subspan(i * k, k));
      }
      if (!std::isfinite(batch_loss)) {
        throw ComputeError("training diverged: non-finite loss");
      }
      const Gradients grads =
          backward(model, fwd, std::span<const double>(logit_grads).first(b * k));
      sgd_step(model, grads, sgd);
    }
    EpochMetrics m = evaluate_epoch(cfg, cds, data.test, model, epoch);
    write_metrics_csv_row(csv, m);
    out.epochs.push_back(std::move(m));
  }
  out.model = std::move(model);
  return out;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const PreparedData data = prepare_dataset(cfg.dataset);

  fs::path outdir = cfg.output_dir;
  if (outdir.empty()) {
    const char* env = std::getenv("RDA_OUTPUT_DIR");
    outdir = env && *env ? fs::path(env) : fs::path("rda_out");
  }
  fs::create_directories(outdir);

  RunSummary summary;
  summary.config_hash = config_hash_hex(cfg);
  for (std::uint64_t seed : cfg.seeds) {
    SeedResult result;
    result.seed = seed;
    const fs::path seed_dir = outdir / ("seed_" + std::to_string(seed));
    result.metrics_csv = seed_dir / "metrics.csv";
    result.checkpoint = seed_dir / "model.ckpt";
    try {
      fs::create_directories(seed_dir);
      std::ofstream csv(result.metrics_csv);
      if (!csv) throw IoError("cannot open " + result.metrics_csv.string());
      TrainOutput out = train_one_seed(cfg, data, seed, csv);
      csv.flush();
      if (!csv) throw IoError("metrics write failed: " + result.metrics_csv.string());
      save_checkpoint(out.model, result.checkpoint);
      result.epochs = std::move(out.epochs);
      result.final_test_accuracy = result.epochs.back().test_accuracy;
    } catch (const std::exception& e) {
      result.failed = true;
      result.error = e.what();
    }
    summary.seeds.push_back(std::move(result));
  }

  std::vector<double> finals;
  for (const SeedResult& r : summary.seeds) {
    if (!r.failed) finals.push_back(r.final_test_accuracy);
  }
  if (!finals.empty()) {
    summary.mean_final_accuracy = mean_of(finals);
    summary.std_final_accuracy = stddev_of(finals, summary.mean_final_accuracy);
  }

  json j;
  j["version"] = 1;
  j["config_hash"] = summary.config_hash;
  j["config"] = config_to_json(cfg);
  json seeds = json::array();
  for (const SeedResult& r : summary.seeds) {
    json s;
    s["seed"] = r.seed;
    s["status"] = r.failed ? "failed" : "ok";
    if (r.failed) {
      s["error"] = r.error;
    } else {
      s["final_test_accuracy"] = r.final_test_accuracy;
      s["metrics_csv"] = r.metrics_csv.string();
      s["checkpoint"] = r.checkpoint.string();
    }
    seeds.push_back(std::move(s));
  }
  j["seeds"] = std::move(seeds);
  j["aggregate"] = {{"num_ok", finals.size()},
                    {"mean_final_test_accuracy", summary.mean_final_accuracy},
                    {"std_final_test_accuracy", summary.std_final_accuracy}};
  summary.summary_path = outdir / "summary.json";
  std::ofstream os(summary.summary_path);
  if (!os) throw IoError("cannot open " + summary.summary_path.string());
  os << j.dump(2) << '\n';
  if (!os) throw IoError("summary write failed");
  return summary;
}

// ---------------------------------------------------------------------------
// Loss comparison
// ---------------------------------------------------------------------------

namespace {

std::string loss_label(const ExperimentConfig& cfg) {
  std::string label = to_string(cfg.loss.kind);
  char buf[96];
  if (cfg.loss.kind == LossKind::RDA) {
    if (cfg.rda.static_beta) {
      std::snprintf(buf, sizeof(buf), "(alpha=%g,beta=%g)", cfg.rda.alpha, *cfg.rda.static_beta);
    } else {
      std::snprintf(buf, sizeof(buf), "(alpha=%g,beta0=%g,beta1=%g)", cfg.rda.alpha,
                    cfg.rda.beta0, cfg.rda.beta1);
    }
    label += buf;
  } else if (cfg.loss.alpha) {
    std::snprintf(buf, sizeof(buf), "(alpha=%g)", *cfg.loss.alpha);
    label += buf;
  } else if (cfg.loss.kind == LossKind::GCE) {
    std::snprintf(buf, sizeof(buf), "(q=%g)", cfg.loss.q.value_or(0.7));
    label += buf;
  }
  return label;
}

json shared_part(const ExperimentConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("loss");
  return j;
}

}  // namespace

std::vector<LossComparisonRow> compare_losses(const std::vector<ExperimentConfig>& cfgs) {
  if (cfgs.empty()) throw InvalidInput("compare_losses: no configs given");
  const json base = shared_part(cfgs.front());
  for (const ExperimentConfig& cfg : cfgs) {
    cfg.validate();
    if (shared_part(cfg) != base) {
      throw InvalidInput("compare_losses: configs must differ only in the loss spec");
    }
  }
  fs::path outdir = cfgs.front().output_dir;
  if (outdir.empty()) outdir = "rda_out";
  std::vector<LossComparisonRow> rows;
  for (const ExperimentConfig& cfg : cfgs) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.output_dir = outdir / loss_label(cfg);
    const RunSummary summary = run_experiment(run_cfg);
    rows.push_back({loss_label(cfg), summary.mean_final_accuracy, summary.std_final_accuracy});
  }
  fs::create_directories(outdir);
  std::ofstream csv(outdir / "comparison.csv");
  if (!csv) throw IoError("cannot open comparison.csv");
  csv << "loss,mean_accuracy,std_accuracy\n";
  char buf[64];
  for (const LossComparisonRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", row.mean_accuracy, row.std_accuracy);
    csv << row.loss << ',' << buf << '\n';
  }
  std::ofstream txt(outdir / "comparison.txt");
  if (!txt) throw IoError("cannot open comparison.txt");
  std::size_t width = 4;
  for (const LossComparisonRow& row : rows) width = std::max(width, row.loss.size());
  for (const LossComparisonRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%7.4f +- %.4f", row.mean_accuracy, row.std_accuracy);
    txt << row.loss << std::string(width - row.loss.size() + 2, ' ') << buf << '\n';
  }
  if (!csv || !txt) throw IoError("comparison write failed");
  return rows;
}

}  // namespace rda
