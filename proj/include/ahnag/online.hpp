#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ahnag {

/// Linear loss sequence on [lo, hi]: f_t(x) = spike * x when t mod period = 1,
/// base * x otherwise.
struct OnlineBench {
  double lo = -1.0;
  double hi = 1.0;
  long period = 101;
  double spike = 1010.0;
  double base = -10.0;
  long T = 500000;

  void validate() const;
  /// Gradient (the linear coefficient) of f_t.
  double coefficient(long t) const;
  double clamp(double x) const;
};

struct LossEval {
  double value;
  double gradient;
};

/// Throws std::invalid_argument for t < 1.
LossEval reddi_loss(long t, double x, const OnlineBench& bench = {});

struct OnlineParams {
  double eta = 1e-3;
  double beta = 0.01;
  double gamma = 0.1;
  int delta = 1;
  double P0 = 1.0;

  void validate() const;
};

struct OnlineHnagState {
  double x = 0.0;
  double y = 0.0;
  double P = 1.0;
  double alpha = 0.0;  ///< alpha of the previous round
  long t = 0;          ///< rounds played
};

OnlineHnagState online_init(const OnlineParams& params, double x0 = 0.0);

/// Plays x_t against f_t (t = state.t + 1), then updates y and P with the
/// previous alpha, sets alpha_t = eta sqrt(P_ref) with P_ref the old P
/// (delta = 1) or the new one (delta = 0), and moves
///   x_{t+1} = (x_t + alpha_t y - alpha_t beta g / P_ref) / (1 + alpha_t).
/// x and y are clamped to the domain. A zero gradient skips the update.
OnlineHnagState online_step_adam_hnag(const OnlineHnagState& state, const OnlineParams& params,
                                      const OnlineBench& bench = {});

struct OnlineAdamParams {
  double eta = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double eps = 1e-8;
  bool bias_correction = false;
  bool amsgrad = false;

  void validate() const;
};

struct OnlineAdamState {
  double x = 0.0;
  double m = 0.0;
  double v = 0.0;
  double v_hat = 0.0;
  long t = 0;
};

/// Standard online ordering: m and v absorb g_t, then
/// x_{t+1} = clamp(x_t - eta m / (sqrt(v) + eps)) with v replaced by its
/// running max for AMSGrad.
OnlineAdamState online_step_adam(const OnlineAdamState& state, const OnlineAdamParams& params,
                                 const OnlineBench& bench = {});

struct RegretSeries {
  std::vector<double> R;
  std::vector<double> R_over_t;
};

/// R_t = sum_{s<=t} f_s(x_s) - min_{x in domain} sum_{s<=t} f_s(x), the
/// minimum taken exactly at an endpoint of the running linear sum.
RegretSeries regret(const std::vector<double>& losses, const OnlineBench& bench = {});

struct OnlineTrace {
  std::string method;
  std::vector<double> x;     ///< x_t played at round t (index t - 1)
  std::vector<double> loss;  ///< f_t(x_t)
  RegretSeries regret;

  /// Mean of x over the last `fraction` of rounds.
  double tail_mean(double fraction = 0.1) const;
};

OnlineTrace run_online_adam_hnag(const OnlineBench& bench, const OnlineParams& params);
OnlineTrace run_online_adam(const OnlineBench& bench, const OnlineAdamParams& params);

/// Columns: t,x,loss,R_t,R_t_over_t,method. Every `stride`-th round plus the
/// last one are written.
void write_online_csv(const OnlineTrace& trace, std::ostream& out, long stride = 1);

}  // namespace ahnag
