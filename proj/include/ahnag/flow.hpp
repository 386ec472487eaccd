#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "ahnag/numkit.hpp"
#include "ahnag/objectives.hpp"

namespace ahnag {

enum class FlowKind {
  AdamHNAGFlow,  ///< x' = y - x - beta P^{-1} g,  y' = -P^{-1} g,  P' = -P + gamma P^{-1} G^2
  AdamFlow,      ///< x' = -m / sqrt(V),  tau1 m' = -m + g,  tau2 V' = -V + G^2
};

/// For AdamFlow, `y` holds m and `P` holds V.
struct FlowState {
  Vector x;
  Vector y;
  DiagPrecond P;
  double t = 0.0;
};

struct FlowParams {
  double beta = 1.0;
  double gamma = 0.0;
  FlowKind which = FlowKind::AdamHNAGFlow;
  double tau1 = 1.0;
  double tau2 = 1.0;

  void validate() const;
};

struct FlowDerivative {
  Vector dx;
  Vector dy;
  Vector dP;
};

FlowDerivative flow_rhs(const FlowState& s, const FlowParams& p, const Objective& f);

struct FlowSample {
  double t;
  double lyapunov;  ///< f(x) - f* + 1/2 ||y - x*||_P^2 (NaN for AdamFlow or unknown optimum)
  double bound;     ///< lyapunov(0) e^{-t}
  double f_gap;
  double y_inf_dist;  ///< ||y - x*||_inf (NaN when x* is unknown)
};

struct FlowResult {
  std::vector<FlowSample> series;
  FlowState final_state;
  /// Time of the first non-finite state, if any.
  std::optional<double> blowup_time;
};

/// Classical RK4 with fixed step dt; P is floored after every step. One sample
/// per step including t = 0. The last step is shortened to land on T.
FlowResult integrate(const FlowState& s0, const FlowParams& p, const Objective& f, double T, double dt);

struct StrongLyapunovReport {
  long violations = 0;
  double max_violation = 0.0;  ///< max of E(t) / (E0 e^{-t}) - 1
  std::optional<double> first_violation_t;
  /// Whether gamma ||y(t) - x*||_inf^2 <= 2 beta held along the whole series.
  bool premise_held = true;
};

StrongLyapunovReport check_strong_lyapunov(const std::vector<FlowSample>& series, const FlowParams& p,
                                           double tol);

/// Columns: t,lyapunov,bound,f_gap,y_inf_dist
void write_flow_csv(const std::vector<FlowSample>& series, std::ostream& out);

}  // namespace ahnag
