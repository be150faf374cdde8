#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rda/error.hpp"
#include "rda/experiment.hpp"

namespace rda {

namespace {

void print_summary(const RunSummary& summary) {
  for (const SeedResult& r : summary.seeds) {
    if (r.failed) {
      std::cout << "seed " << r.seed << ": FAILED (" << r.error << ")\n";
    } else {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", r.final_test_accuracy);
      std::cout << "seed " << r.seed << ": final test accuracy " << buf << "\n";
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f +- %.4f", summary.mean_final_accuracy,
                summary.std_final_accuracy);
  std::cout << "mean " << buf << "  (summary: " << summary.summary_path.string() << ")\n";
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Robust data ambiguation: noise-robust training experiments"};
  app.require_subcommand(1);

  std::string train_config;
  std::string output_dir;
  CLI::App* train = app.add_subcommand("train", "Train every configured seed and summarize");
  train->add_option("config", train_config, "experiment config (JSON)")->required();
  train->add_option("--output-dir", output_dir, "override the config's output directory");

  std::vector<std::string> compare_configs;
  std::string compare_output;
  CLI::App* compare =
      app.add_subcommand("compare", "Run configs differing only in loss; tabulate accuracies");
  compare->add_option("configs", compare_configs, "experiment configs (JSON)")
      ->required()
      ->expected(-1);
  compare->add_option("--output-dir", compare_output, "override the comparison output directory");

  std::string corrupt_config;
  std::string corrupt_out = "provenance.csv";
  double corrupt_rate = -1.0;
  std::uint64_t corrupt_seed = 0;
  bool corrupt_seed_set = false;
  std::string corrupt_kind;
  std::vector<std::int32_t> corrupt_mapping;
  CLI::App* corrupt =
      app.add_subcommand("corrupt", "Corrupt the configured dataset and emit a provenance CSV");
  corrupt->add_option("config", corrupt_config, "experiment config (JSON)")->required();
  corrupt->add_option("--rate", corrupt_rate, "override noise rate");
  corrupt->add_option("--seed", corrupt_seed, "override noise seed")
      ->each([&](const std::string&) { corrupt_seed_set = true; });
  corrupt->add_option("--kind", corrupt_kind, "override noise kind (symmetric|asymmetric)");
  corrupt->add_option("--mapping", corrupt_mapping, "asymmetric class mapping");
  corrupt->add_option("--out", corrupt_out, "output CSV path");

  std::string validate_config;
  CLI::App* validate = app.add_subcommand("validate-config", "Parse and validate a config");
  validate->add_option("config", validate_config, "experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (train->parsed()) {
      ExperimentConfig cfg = load_config_file(train_config);
      if (!output_dir.empty()) cfg.output_dir = output_dir;
      print_summary(run_experiment(cfg));
    } else if (compare->parsed()) {
      std::vector<ExperimentConfig> cfgs;
      for (const std::string& path : compare_configs) {
        cfgs.push_back(load_config_file(path));
      }
      if (!compare_output.empty()) {
        for (ExperimentConfig& cfg : cfgs) cfg.output_dir = compare_output;
      }
      for (const LossComparisonRow& row : compare_losses(cfgs)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%7.4f +- %.4f", row.mean_accuracy, row.std_accuracy);
        std::cout << row.loss << "  " << buf << "\n";
      }
    } else if (corrupt->parsed()) {
      ExperimentConfig cfg = load_config_file(corrupt_config);
      NoiseSpec spec = cfg.noise;
      if (corrupt_rate >= 0.0) spec.rate = corrupt_rate;
      if (corrupt_seed_set) spec.seed = corrupt_seed;
      if (!corrupt_kind.empty()) spec.kind = corrupt_kind;
      if (!corrupt_mapping.empty()) spec.mapping = corrupt_mapping;
      const PreparedData data = prepare_dataset(cfg.dataset);
      const CorruptedDataset cds = apply_noise(data.train, spec, spec.seed);
      export_provenance_csv(cds, corrupt_out);
      std::cout << "wrote " << corrupt_out << " (" << cds.num_corrupted() << "/" << cds.size()
                << " corrupted)\n";
    } else if (validate->parsed()) {
      load_config_file(validate_config);
      std::cout << "config ok\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace rda
