#pragma once

#include <memory>
#include <optional>
#include <string>

#include "ahnag/numkit.hpp"

namespace ahnag {

/// What is known about the minimizer of an objective. Lyapunov diagnostics
/// need both x_star and f_star; gap-only diagnostics need f_star.
struct OptimumInfo {
  std::optional<Vector> x_star;
  std::optional<double> f_star;
  std::string provenance;
};

/// Convex, L-smooth, differentiable objective.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual Index dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  /// Lipschitz constant of the gradient in the Euclidean norm.
  virtual double smoothness() const = 0;
  virtual OptimumInfo optimum_hint() const { return {}; }
};

/// f(x) = 1/2 sum_i a_i (x_i - b_i)^2, minimized at b with f* = 0.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(Vector curvature, Vector shift);

  Index dim() const override { return a_.size(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double smoothness() const override { return a_.maxCoeff(); }
  OptimumInfo optimum_hint() const override;

  const Vector& curvature() const { return a_; }
  const Vector& shift() const { return b_; }

 private:
  Vector a_;
  Vector b_;
};

/// Binary logistic regression data. Labels must be 0 or 1.
struct LogisticProblem {
  Matrix X;
  Vector y;
  bool fit_bias = true;

  Index samples() const { return X.rows(); }
  /// Length of the optimizer's parameter vector: d, plus one with a bias.
  Index param_dim() const { return X.cols() + (fit_bias ? 1 : 0); }
};

/// Mean cross-entropy at parameters (w, b) packed as one vector (bias last).
double logistic_value(const LogisticProblem& p, const Vector& w_b);
Vector logistic_gradient(const LogisticProblem& p, const Vector& w_b);
/// lambda_max(X~^T X~) / (4n) with X~ the bias-augmented design.
double logistic_smoothness(const LogisticProblem& p);

/// Largest eigenvalue of A^T A by power iteration. Stops when successive
/// Rayleigh quotients agree to rel_tol; throws std::runtime_error if that
/// does not happen within max_iters or if A^T A vanishes.
double power_iteration_gram(const Matrix& A, double rel_tol = 1e-8, int max_iters = 100000);

class LogisticObjective final : public Objective {
 public:
  explicit LogisticObjective(LogisticProblem problem);

  Index dim() const override { return problem_.param_dim(); }
  double value(const Vector& w_b) const override;
  Vector gradient(const Vector& w_b) const override;
  double smoothness() const override { return L_; }

  const LogisticProblem& problem() const { return problem_; }
  /// Bias-augmented design matrix.
  const Matrix& design() const { return design_; }

 private:
  LogisticProblem problem_;
  Matrix design_;
  double L_;
};

/// Damped Newton from w = 0 with Armijo backtracking. Throws
/// std::runtime_error when the Hessian is singular (e.g. separable or
/// rank-deficient data) or the gradient does not reach ~grad_tol.
OptimumInfo logistic_newton_optimum(const LogisticObjective& f, double grad_tol = 1e-10,
                                    int max_iters = 200);

/// Decorates an objective with a known optimum without touching the original.
class AnchoredObjective final : public Objective {
 public:
  AnchoredObjective(std::shared_ptr<const Objective> base, OptimumInfo optimum);

  Index dim() const override { return base_->dim(); }
  double value(const Vector& x) const override { return base_->value(x); }
  Vector gradient(const Vector& x) const override { return base_->gradient(x); }
  double smoothness() const override { return base_->smoothness(); }
  OptimumInfo optimum_hint() const override { return optimum_; }

  const Objective& base() const { return *base_; }

 private:
  std::shared_ptr<const Objective> base_;
  OptimumInfo optimum_;
};

/// D_f(y, x) = f(y) - f(x) - <grad f(x), y - x>
double bregman(const Objective& f, const Vector& y, const Vector& x);

}  // namespace ahnag
