#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "ahnag/diagnostics.hpp"
#include "ahnag/numkit.hpp"
#include "ahnag/objectives.hpp"
#include "ahnag/stepsize.hpp"

namespace ahnag {

enum class Method { GD, HNAG, Adam, AMSGrad, AdamHNAG, AdamHNAGs };

std::string to_string(Method m);
/// Accepts the config spellings: gd, hnag, adam, amsgrad, adam_hnag, adam_hnag_s.
std::optional<Method> parse_method(const std::string& name);

enum class GammaMode {
  Fixed,        ///< gamma_k = cfg.gamma
  Theoretical,  ///< gamma_k = alpha_k / R^2 (lagged) or alpha~_k / R^2 (synchronous)
};

struct AdamParams {
  double eta = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  bool bias_correction = false;
};

struct OptimizerConfig {
  Method method = Method::AdamHNAG;
  GammaMode gamma_mode = GammaMode::Fixed;
  double gamma = 0.05;
  std::optional<double> R;
  /// Clamp y to the box ||y||_inf <= R/2 after each y-update.
  bool projection = false;
  bool inner_correction = false;
  int inner_max_iters = 30;
  double inner_tol = 1e-12;
  AdamParams adam;
  /// Half-width of the feasible box for AMSGrad's x-projection, if any.
  std::optional<double> amsgrad_box;
  long max_iters = 2000;
  /// Stop once ||grad f|| <= grad_tol (0 disables; the vanishing-gradient
  /// guard still applies).
  double grad_tol = 0.0;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// Raised when an iterate stops being finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterate bundle for GD, HNAG and both Adam-HNAG schemes. `step` holds the
/// parameters that the next call will use (alpha_k, eta_k, gamma_k).
struct OptState {
  Vector x;
  Vector x_plus;
  Vector y;
  DiagPrecond P;
  long k = 0;
  StepParams step;
  bool converged = false;
  /// Consistency ratio of the step that produced this state (NaN at k = 0).
  double last_ratio = 0.0;
  /// Alpha actually used by the step that produced this state.
  double last_alpha = 0.0;
  bool last_projected = false;
  /// Gradient at x, cached for the next step and for tracing.
  Vector grad;
};

struct AdamState {
  Vector x;
  Vector m;
  Vector V;
  std::optional<Vector> v_hat;
  long k = 0;
  Vector grad;  ///< gradient at x
};

/// Starting state for the HNAG family. eta_0 = bar_eta(P_0, grad f(x_0)),
/// alpha_0 = sqrt(eta_0 / 2), x_0^+ = x_0 - eta_0 P_0^{-1} grad f(x_0). HNAG
/// ignores P0 and uses its schedule value P_0 = L.
OptState init_state(const Objective& f, const OptimizerConfig& cfg, const Vector& x0, const Vector& y0,
                    const DiagPrecond& P0);

AdamState init_adam_state(const Objective& f, const Vector& x0);

/// Componentwise clamp to [-R/2, R/2]. The box is axis-aligned and the
/// metric diagonal, so this is also the projection in the P-metric.
Vector project_box(const Vector& y_half, double R, const DiagPrecond& P);

/// Lagged scheme:
///   x_{k+1}   = (x_k^+ + alpha_k y_k) / (1 + alpha_k)
///   eta_{k+1} = bar_eta(P_k, g),  g = grad f(x_{k+1})
///   x_{k+1}^+ = x_{k+1} - eta_{k+1} P_k^{-1} g
///   y_{k+1}   = y_k - alpha_k P_k^{-1} g
///   P_{k+1}   = P_k / (1 + alpha_k) + alpha_k gamma_k / (1 + alpha_k) P_k^{-1} G^2
/// then alpha_{k+1} = sqrt(eta_{k+1} / 2).
OptState adam_hnag_step(const OptState& state, const Objective& f, const OptimizerConfig& cfg);

/// Synchronous scheme: same x-update, then
///   P_{k+1} = (1 - a~)/2 P_k + 1/2 sqrt((1 - a~)^2 P_k^2 + 4 a~ gamma_k G^2)
///   y_{k+1} = y_k - a~ P_{k+1}^{-1} g
///   eta_{k+1} = bar_eta(P_{k+1}, g),  x_{k+1}^+ = x_{k+1} - eta_{k+1} P_{k+1}^{-1} g
/// with a~ = alpha_k / (1 + alpha_k).
OptState adam_hnag_s_step(const OptState& state, const Objective& f, const OptimizerConfig& cfg);

/// Closed-form positive root of P^2 - (1 - a~) P_k P - a~ gamma g^2 = 0.
Vector synchronous_precond_update(const Vector& P, const Vector& grad_sq, double alpha_tilde,
                                  double gamma);

Vector gd_step(const Vector& x, const Objective& f);

/// HNAG schedule: alpha_k = 2 / (k + 1), P_k = alpha_k^2 L / (2 + alpha_k).
struct HnagSchedule {
  double alpha;
  double P;
};
HnagSchedule hnag_schedule(long k, double L);

/// Scalar-P, gamma = 0 special case of the lagged scheme driven by the HNAG
/// schedule; the x^+ step is a plain 1/L gradient step.
OptState hnag_step(const OptState& state, const Objective& f);

/// x_{k+1} = x_k - eta (sqrt(V_k) + eps)^{-1} m_k, then m and V absorb the
/// gradient at x_{k+1}.
AdamState adam_step(const AdamState& state, const Objective& f, const OptimizerConfig& cfg);
/// As adam_step with v_hat = running max of V driving the x-update.
AdamState amsgrad_step(const AdamState& state, const Objective& f, const OptimizerConfig& cfg);

/// Iterates cfg.method from (x0, y0, P0) until the gradient tolerance or
/// max_iters, one trace row per iterate. Divergence is flagged in the trace
/// rather than thrown.
Trace run(const Objective& f, const OptimizerConfig& cfg, const Vector& x0, const Vector& y0,
          const DiagPrecond& P0);

/// Convenience overload: y0 = x0, P0 = I.
Trace run(const Objective& f, const OptimizerConfig& cfg, const Vector& x0);

/// Reference optimum for objectives without an analytic one: Adam-HNAG
/// (default settings) from x0 until ||grad|| <= grad_tol or max_iters, keeping
/// the best iterate seen.
OptimumInfo presolve_optimum(const Objective& f, const Vector& x0, double grad_tol = 1e-10,
                             long max_iters = 200000);

}  // namespace ahnag
