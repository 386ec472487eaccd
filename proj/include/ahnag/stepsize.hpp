#pragma once

#include <functional>

#include "ahnag/numkit.hpp"

namespace ahnag {

/// Scheme selector: the semi-implicit method lags the preconditioner by one
/// step (delta = 1); the synchronous method uses the fresh one (delta = 0).
enum class Scheme : int { Synchronous = 0, Lagged = 1 };

inline int delta_of(Scheme s) { return static_cast<int>(s); }

/// Per-step scalars. eta = alpha * beta is the gradient-step size paired
/// with the momentum weight alpha; alpha_tilde = alpha / (1 + alpha).
struct StepParams {
  double eta = 0.0;
  double alpha = 0.0;
  double alpha_tilde = 0.0;
  double gamma = 0.0;
  Scheme scheme = Scheme::Lagged;
};

StepParams make_step_params(double eta, double alpha, double gamma, Scheme scheme);

/// Largest step along -P^{-1} g that keeps the directional descent bound:
/// (1/L) * ||g||^2_{P^{-1}} / ||g||^2_{P^{-2}}. Requires g != 0 and L > 0.
double bar_eta(const DiagPrecond& P, const Vector& g, double L);

/// sqrt(eta / 2)
double alpha_from_eta(double eta);

/// eta_next * (1 + alpha)^(2 - delta) / (2 alpha^2); the step is consistent
/// when this is at least 1.
double consistency_ratio(double eta_next, double alpha, Scheme scheme);

struct CorrectionResult {
  double alpha;
  int iters;
};

/// Fixed-point correction alpha <- sqrt(eta(alpha) / 2), applied while the
/// consistency condition fails. Stops at the first consistent alpha or when
/// successive iterates agree to tol. Throws std::runtime_error when neither
/// happens within max_iters.
CorrectionResult inner_alpha_correction(double alpha0, const std::function<double(double)>& eval_eta,
                                        Scheme scheme, int max_iters = 30, double tol = 1e-12);

/// True when ||g|| <= 1e-14 * max(1, ||x||); bar_eta is 0/0 there.
bool gradient_vanishes(const Vector& g, const Vector& x);

}  // namespace ahnag
