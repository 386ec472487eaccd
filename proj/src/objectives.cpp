#include "ahnag/objectives.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ahnag/format.hpp"

namespace ahnag {

namespace {

Matrix augment(const LogisticProblem& p) {
  if (!p.fit_bias) return p.X;
  Matrix A(p.X.rows(), p.X.cols() + 1);
  A.leftCols(p.X.cols()) = p.X;
  A.col(p.X.cols()).setOnes();
  return A;
}

void validate(const LogisticProblem& p) {
  if (p.X.rows() < 1 || p.X.cols() < 1) {
    throw std::invalid_argument("LogisticProblem: need n >= 1 and d >= 1");
  }
  require_same_dim(p.y.size(), p.X.rows(), "LogisticProblem labels");
  for (Index i = 0; i < p.y.size(); ++i) {
    if (p.y[i] != 0.0 && p.y[i] != 1.0) {
      throw std::invalid_argument("LogisticProblem: label at row " + std::to_string(i) +
                                  " is not 0 or 1");
    }
  }
}

// log(1 + e^{-|z|}) + max(z, 0) - y z
double stable_xent(double z, double y) {
  return std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0) - y * z;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double xent_mean(const Matrix& A, const Vector& y, const Vector& w) {
  const Vector z = A * w;
  double s = 0.0;
  for (Index i = 0; i < z.size(); ++i) s += stable_xent(z[i], y[i]);
  return s / static_cast<double>(z.size());
}

Vector xent_grad(const Matrix& A, const Vector& y, const Vector& w) {
  Vector r = A * w;
  for (Index i = 0; i < r.size(); ++i) r[i] = sigmoid(r[i]) - y[i];
  return A.transpose() * r / static_cast<double>(r.size());
}

}  // namespace

QuadraticObjective::QuadraticObjective(Vector curvature, Vector shift)
    : a_(std::move(curvature)), b_(std::move(shift)) {
  require_same_dim(a_.size(), b_.size(), "QuadraticObjective");
  if (a_.size() == 0) throw std::invalid_argument("QuadraticObjective: empty");
  if ((a_.array() <= 0.0).any()) {
    throw std::invalid_argument("QuadraticObjective: curvature entries must be positive");
  }
}

double QuadraticObjective::value(const Vector& x) const {
  require_same_dim(x.size(), a_.size(), "QuadraticObjective::value");
  return 0.5 * (a_.array() * (x - b_).array().square()).sum();
}

Vector QuadraticObjective::gradient(const Vector& x) const {
  require_same_dim(x.size(), a_.size(), "QuadraticObjective::gradient");
  return (a_.array() * (x - b_).array()).matrix();
}

OptimumInfo QuadraticObjective::optimum_hint() const { return {b_, 0.0, "analytic"}; }

double logistic_value(const LogisticProblem& p, const Vector& w_b) {
  require_same_dim(w_b.size(), p.param_dim(), "logistic_value");
  if (!p.fit_bias) return xent_mean(p.X, p.y, w_b);
  return xent_mean(augment(p), p.y, w_b);
}

Vector logistic_gradient(const LogisticProblem& p, const Vector& w_b) {
  require_same_dim(w_b.size(), p.param_dim(), "logistic_gradient");
  if (!p.fit_bias) return xent_grad(p.X, p.y, w_b);
  return xent_grad(augment(p), p.y, w_b);
}

double power_iteration_gram(const Matrix& A, double rel_tol, int max_iters) {
  if (A.cols() == 0) throw std::invalid_argument("power_iteration_gram: empty matrix");
  // Non-constant start so a symmetric spectrum cannot hide the top direction.
  Vector v(A.cols());
  for (Index j = 0; j < v.size(); ++j) v[j] = 1.0 + 0.5 / static_cast<double>(j + 1);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = A.transpose() * (A * v);
    const double next = v.dot(w);
    const double nw = w.norm();
    if (!(nw > 0.0)) throw std::runtime_error("power_iteration_gram: A^T A annihilates iterate");
    v = w / nw;
    if (it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) return next;
    lambda = next;
  }
  throw std::runtime_error("power_iteration_gram: no convergence within iteration cap");
}

double logistic_smoothness(const LogisticProblem& p) {
  return power_iteration_gram(augment(p)) / (4.0 * static_cast<double>(p.samples()));
}

LogisticObjective::LogisticObjective(LogisticProblem problem)
    : problem_(std::move(problem)), design_(), L_(0.0) {
  validate(problem_);
  design_ = augment(problem_);
  L_ = power_iteration_gram(design_) / (4.0 * static_cast<double>(problem_.samples()));
}

double LogisticObjective::value(const Vector& w_b) const {
  require_same_dim(w_b.size(), design_.cols(), "LogisticObjective::value");
  return xent_mean(design_, problem_.y, w_b);
}

Vector LogisticObjective::gradient(const Vector& w_b) const {
  require_same_dim(w_b.size(), design_.cols(), "LogisticObjective::gradient");
  return xent_grad(design_, problem_.y, w_b);
}

OptimumInfo logistic_newton_optimum(const LogisticObjective& f, double grad_tol, int max_iters) {
  const Matrix& A = f.design();
  const double n = static_cast<double>(A.rows());
  Vector w = Vector::Zero(A.cols());
  double fw = f.value(w);
  Vector g = f.gradient(w);
  int it = 0;
  for (; it < max_iters && g.norm() > grad_tol; ++it) {
    const Vector z = A * w;
    Vector s(z.size());
    for (Index i = 0; i < z.size(); ++i) {
      const double p = sigmoid(z[i]);
      s[i] = p * (1.0 - p);
    }
    const Matrix H = A.transpose() * s.asDiagonal() * A / n;
    const Eigen::LDLT<Matrix> ldlt(H);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw std::runtime_error("logistic_newton_optimum: Hessian is not positive definite");
    }
    const Vector step = ldlt.solve(g);
    if (!step.allFinite()) throw std::runtime_error("logistic_newton_optimum: non-finite Newton step");
    const double slope = g.dot(step);
    double t = 1.0;
    Vector w_new;
    double f_new = fw;
    for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
      w_new = w - t * step;
      f_new = f.value(w_new);
      if (f_new <= fw - 1e-4 * t * slope) break;
    }
    if (!(f_new < fw)) break;  // floating-point resolution reached
    w = std::move(w_new);
    fw = f_new;
    g = f.gradient(w);
  }
  const double gn = g.norm();
  if (!(gn <= 1e3 * grad_tol)) {
    throw std::runtime_error("logistic_newton_optimum: gradient norm " + format_double(gn) +
                             " after " + std::to_string(it) + " iterations");
  }
  // On separable data the loss and gradient both vanish as ||w|| grows, so a
  // small gradient alone proves nothing. At a genuine minimizer the Newton
  // decrement g^T H^{-1} g is negligible next to f; along an escaping ray the
  // two shrink together.
  const Vector z = A * w;
  Vector s(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double p = sigmoid(z[i]);
    s[i] = p * (1.0 - p);
  }
  const Eigen::LDLT<Matrix> ldlt(A.transpose() * s.asDiagonal() * A / n);
  const double decrement = ldlt.info() == Eigen::Success ? g.dot(ldlt.solve(g))
                                                                : std::numeric_limits<double>::infinity();
  if (!(decrement <= 1e-6 * fw)) {
    throw std::runtime_error("logistic_newton_optimum: no finite minimizer (data look separable)");
  }
  return {w, fw, "newton iters=" + std::to_string(it) + " grad_norm=" + format_double(gn)};
}

AnchoredObjective::AnchoredObjective(std::shared_ptr<const Objective> base, OptimumInfo optimum)
    : base_(std::move(base)), optimum_(std::move(optimum)) {
  if (!base_) throw std::invalid_argument("AnchoredObjective: null base objective");
  if (optimum_.x_star) require_same_dim(optimum_.x_star->size(), base_->dim(), "AnchoredObjective");
}

double bregman(const Objective& f, const Vector& y, const Vector& x) {
  require_same_dim(y.size(), x.size(), "bregman");
  require_same_dim(x.size(), f.dim(), "bregman");
  return f.value(y) - f.value(x) - f.gradient(x).dot(y - x);
}

}  // namespace ahnag
