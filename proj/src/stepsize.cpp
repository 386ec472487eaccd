#include "ahnag/stepsize.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ahnag {

StepParams make_step_params(double eta, double alpha, double gamma, Scheme scheme) {
  if (!(eta > 0.0) || !(alpha > 0.0)) {
    throw std::invalid_argument("StepParams: eta and alpha must be positive");
  }
  return {eta, alpha, alpha / (1.0 + alpha), gamma, scheme};
}

double bar_eta(const DiagPrecond& P, const Vector& g, double L) {
  if (!(L > 0.0)) throw std::invalid_argument("bar_eta: L must be positive");
  require_same_dim(g.size(), P.size(), "bar_eta");
  const double num = inverse_weighted_sq_norm(g, P, 1);
  const double den = inverse_weighted_sq_norm(g, P, 2);
  if (!(den > 0.0)) throw std::invalid_argument("bar_eta: zero gradient");
  return num / (den * L);
}

double alpha_from_eta(double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("alpha_from_eta: eta must be positive");
  return std::sqrt(eta / 2.0);
}

double consistency_ratio(double eta_next, double alpha, Scheme scheme) {
  if (!(eta_next > 0.0) || !(alpha > 0.0)) {
    throw std::invalid_argument("consistency_ratio: inputs must be positive");
  }
  const double power = 2.0 - delta_of(scheme);
  return eta_next * std::pow(1.0 + alpha, power) / (2.0 * alpha * alpha);
}

CorrectionResult inner_alpha_correction(double alpha0, const std::function<double(double)>& eval_eta,
                                        Scheme scheme, int max_iters, double tol) {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("inner_alpha_correction: alpha0 must be positive");
  double alpha = alpha0;
  for (int m = 0; m <= max_iters; ++m) {
    const double eta = eval_eta(alpha);
    if (!(eta > 0.0) || !std::isfinite(eta)) {
      throw std::runtime_error("inner_alpha_correction: eta(alpha) is not a finite positive value");
    }
    if (consistency_ratio(eta, alpha, scheme) >= 1.0) return {alpha, m};
    const double next = std::sqrt(eta / 2.0);
    if (std::abs(next - alpha) <= tol) return {next, m + 1};
    alpha = next;
  }
  throw std::runtime_error("inner_alpha_correction: no consistent alpha after " +
                           std::to_string(max_iters) + " iterations");
}

bool gradient_vanishes(const Vector& g, const Vector& x) {
  return g.norm() <= 1e-14 * std::max(1.0, x.norm());
}

}  // namespace ahnag
