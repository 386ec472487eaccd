#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "ahnag/numkit.hpp"
#include "ahnag/objectives.hpp"

namespace ahnag {

enum class DataSource { Synthetic, File };

/// Dense binary-labelled design matrix. Labels are stored as 0.0 / 1.0.
struct Dataset {
  Matrix X;
  Vector y;
  std::optional<double> kappa;
  DataSource source = DataSource::Synthetic;

  Index n() const { return X.rows(); }
  Index d() const { return X.cols(); }

  LogisticProblem as_logistic(bool fit_bias = true) const { return {X, y, fit_bias}; }
};

/// Thrown by the LIBSVM reader; line is 1-based (0 when not line-specific).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// X = U diag(s) V^T with U (n x d) and V (d x d) orthonormal factors of
/// Gaussian matrices (Householder QR, signs fixed so diag(R) > 0) and s
/// log-spaced from 1 down to 1/kappa. Labels are 1[x_i^T w* + xi_i > 0],
/// w* a unit Gaussian direction, xi_i ~ N(0, 0.1^2). Deterministic in seed.
/// kappa below kMinKappa is rejected: the spread would sit under the 1e-6
/// relative accuracy the condition number is generated to.
inline constexpr double kMinKappa = 1.0 + 1e-6;
Dataset synth_dataset(Index n, Index d, double kappa, std::uint64_t seed);

/// Reads `label idx:val ...` lines (1-based increasing indices, `#` starts
/// a comment). Labels {-1,+1}, {1,2} or {0,1} are mapped to {0,1}. The
/// column count is the largest index seen unless `dim` overrides it.
Dataset parse_libsvm(std::istream& in, std::optional<Index> dim = std::nullopt);
Dataset parse_libsvm(const std::filesystem::path& path, std::optional<Index> dim = std::nullopt);

/// Writes labels as -1/+1 and only the nonzero entries, using shortest
/// round-trip formatting so parse_libsvm recovers the exact values.
void write_libsvm(const Dataset& data, std::ostream& out);
void write_libsvm(const Dataset& data, const std::filesystem::path& path);

}  // namespace ahnag
