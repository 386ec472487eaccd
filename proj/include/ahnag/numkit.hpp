#pragma once

#include <Eigen/Dense>

namespace ahnag {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Positive diagonal matrix. Entries below kFloor (including nonpositive
/// ones) are clamped to kFloor at construction, so every instance is SPD.
class DiagPrecond {
 public:
  static constexpr double kFloor = 1e-12;

  DiagPrecond() = default;  ///< empty (dimension 0)
  explicit DiagPrecond(Vector diag);

  static DiagPrecond Identity(Index dim);
  static DiagPrecond Constant(Index dim, double value);

  const Vector& diag() const { return diag_; }
  Index size() const { return diag_.size(); }
  double operator[](Index i) const { return diag_[i]; }

  /// diag(1/w_i)
  DiagPrecond inverse() const;
  /// diag(w_i^2)
  DiagPrecond squared() const;
  double mean() const { return diag_.mean(); }
  double min() const { return diag_.minCoeff(); }
  double max() const { return diag_.maxCoeff(); }

 private:
  Vector diag_;
};

/// sum_i w_i v_i^2
double weighted_sq_norm(const Vector& v, const DiagPrecond& w);

/// sum_i v_i^2 / w_i^power, i.e. ||v||^2 in the W^{-power} metric. Avoids
/// materializing the inverse (and its floor) for large entries.
double inverse_weighted_sq_norm(const Vector& v, const DiagPrecond& w, int power = 1);

/// (v_i / w_i)_i
Vector inverse_apply(const DiagPrecond& w, const Vector& v);

/// max_i |v_i|; throws on an empty vector.
double inf_norm(const Vector& v);

bool all_finite(const Vector& v);

void require_same_dim(Index a, Index b, const char* what);

}  // namespace ahnag
