// Command-line front end: run experiments from a config file, or generate a
// synthetic LIBSVM dataset.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>

#include "ahnag/config.hpp"
#include "ahnag/datasets.hpp"
#include "ahnag/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adam-HNAG optimizer experiments"};
  app.set_version_flag("--version", std::string(ahnag::kVersion));
  app.require_subcommand(1);
  app.footer("Exit status: 0 ok (divergence is recorded, not fatal), 1 a cell failed,\n"
             "2 config or usage error, 3 I/O failure.\n"
             "Run `ahnag run --keys` for the config key reference.");

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string config_path;
  int jobs = 1;
  std::string out_dir;
  std::int64_t seed = -1;
  bool keys = false;
  run->add_option("config", config_path, "Config file (key = value with [section] headers)");
  run->add_option("--jobs,-j", jobs, "Number of cells to run concurrently")->check(CLI::PositiveNumber);
  run->add_option("--out,-o", out_dir, "Output directory (overrides the config's `output`)");
  run->add_option("--seed", seed, "Dataset seed (overrides data.seed)")->check(CLI::NonNegativeNumber);
  run->add_flag("--keys", keys, "Print every config key with its default and exit");

  auto* gen = app.add_subcommand("gen-data", "Write a synthetic logistic-regression dataset in LIBSVM format");
  long n = 500, d = 200;
  double kappa = 20000.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--n", n, "Number of samples")->capture_default_str();
  gen->add_option("--d", d, "Number of features")->capture_default_str();
  gen->add_option("--kappa", kappa, "Condition number of the design matrix")->capture_default_str();
  gen->add_option("--seed", gen_seed, "RNG seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ahnag::kExitConfig;
  }

  if (*run) {
    if (keys) {
      std::cout << ahnag::config_reference();
      return ahnag::kExitOk;
    }
    if (config_path.empty()) {
      std::cerr << "run: a config file is required\n";
      return ahnag::kExitConfig;
    }
    try {
      const auto cfg = ahnag::parse_config(std::filesystem::path(config_path));
      ahnag::RunOptions opts;
      opts.jobs = jobs;
      if (!out_dir.empty()) opts.out = out_dir;
      if (seed >= 0) opts.seed = static_cast<std::uint64_t>(seed);
      const auto report = ahnag::run_experiment(cfg, opts, std::cerr);
      std::cout << report.manifest.string() << '\n';
      return report.exit_code;
    } catch (const ahnag::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return ahnag::kExitConfig;
    } catch (const ahnag::ParseError& e) {
      std::cerr << "data error: " << e.what() << '\n';
      return ahnag::kExitConfig;
    } catch (const ahnag::IoError& e) {
      std::cerr << "io error: " << e.what() << '\n';
      return ahnag::kExitIo;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return ahnag::kExitCellError;
    }
  }

  try {
    const auto data = ahnag::synth_dataset(n, d, kappa, gen_seed);
    ahnag::write_libsvm(data, std::filesystem::path(gen_out));
  } catch (const std::invalid_argument& e) {
    std::cerr << "gen-data: " << e.what() << '\n';
    return ahnag::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "gen-data: " << e.what() << '\n';
    return ahnag::kExitIo;
  }
  return ahnag::kExitOk;
}
