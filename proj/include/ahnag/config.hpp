#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ahnag/flow.hpp"
#include "ahnag/online.hpp"
#include "ahnag/optimizers.hpp"

namespace ahnag {

enum class ExperimentKind { SyntheticLogreg, LibsvmLogreg, FlowDecay, Reddi, UnforcedOracle };

std::string to_string(ExperimentKind k);

/// Thrown for malformed configs; the message names the offending key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataConfig {
  long n = 500;
  long d = 200;
  std::vector<double> kappa{20000.0};
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> path;
  bool fit_bias = true;
};

/// Settings shared by the Adam-HNAG schemes; [adam_hnag] and [adam_hnag_s]
/// each carry their own copy.
struct HnagFamilyConfig {
  GammaMode gamma_mode = GammaMode::Fixed;
  double gamma = 0.05;
  std::optional<double> R;
  bool projection = false;
  bool inner_correction = false;
  double p0 = 1.0;
};

struct AdamConfig {
  std::vector<double> lr{1e-4, 1e-3, 1e-2, 5e-2, 1e-1};
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  bool bias_correction = false;
};

struct FlowConfig {
  std::string problem = "quadratic";  ///< quadratic | logistic
  FlowKind which = FlowKind::AdamHNAGFlow;
  double beta = 1.0;
  double gamma = 0.0;
  double tau1 = 1.0;
  double tau2 = 1.0;
  double T = 10.0;
  double dt = 1e-3;
  double p0_scale = 20.0;  ///< P(0) = p0_scale * L * I
  long stride = 10;
};

struct ReddiConfig {
  OnlineBench bench;
  OnlineParams hnag;
  OnlineAdamParams adam{0.01, 0.9, 0.99, 1e-8, false, false};
  long stride = 100;
};

struct UnforcedConfig {
  double p0 = 1.0;
  double L = 0.5;
  long K = 100000;
  long stride = 100;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::SyntheticLogreg;
  std::vector<std::string> methods;
  long iterations = 2000;
  std::filesystem::path output = "out";
  long stride = 1;
  /// Iteration cap for the first-order fallback used when Newton cannot
  /// pin down f*.
  long presolve_iters = 20000;
  DataConfig data;
  std::map<std::string, HnagFamilyConfig> hnag{{"adam_hnag", {}}, {"adam_hnag_s", {}}};
  AdamConfig adam;
  std::optional<double> amsgrad_box;
  FlowConfig flow;
  ReddiConfig reddi;
  UnforcedConfig unforced;
  /// Normalized `section.key = value` echo for the manifest.
  std::vector<std::pair<std::string, std::string>> echo;
};

/// Line-oriented `key = value` text. `[section]` headers group keys; `#`
/// starts a comment; lists are comma-separated. Unknown keys, bad values and
/// inconsistent combinations throw ConfigError naming the key.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Cross-field checks (also run by parse_config).
void validate(const ExperimentConfig& cfg);

/// Reference text listing every key with its default.
std::string config_reference();

}  // namespace ahnag
