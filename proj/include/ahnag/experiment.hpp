#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ahnag/config.hpp"

namespace ahnag {

inline constexpr const char* kVersion = "0.1.0";

/// Exit statuses of run_experiment and the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitCellError = 1, kExitConfig = 2, kExitIo = 3 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  int jobs = 1;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
};

struct CellReport {
  std::string name;
  std::string file;
  std::string status = "ok";  ///< ok | diverged | error
  std::vector<std::pair<std::string, std::string>> values;
};

struct ExperimentReport {
  std::vector<CellReport> cells;
  /// Problem-level and cross-cell entries (f* provenance, best Adam rate).
  std::vector<std::pair<std::string, std::string>> summary;
  std::filesystem::path manifest;
  int exit_code = kExitOk;
};

/// Runs every cell of the experiment, writes one CSV per cell and
/// `manifest.txt` into the output directory. Cells run on up to `jobs`
/// threads; every cell is sequential and deterministic. Throws IoError when
/// the output directory or the manifest cannot be written.
ExperimentReport run_experiment(ExperimentConfig cfg, const RunOptions& opts, std::ostream& log);

}  // namespace ahnag
