#include "ahnag/online.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ahnag/format.hpp"

namespace ahnag {

void OnlineBench::validate() const {
  if (!(lo < hi)) throw std::invalid_argument("online: domain needs lo < hi");
  if (period < 2) throw std::invalid_argument("online: period must be >= 2");
  if (!(spike + static_cast<double>(period - 1) * base > 0.0)) {
    throw std::invalid_argument("online: one period must have positive net coefficient");
  }
  if (T < 1) throw std::invalid_argument("online: horizon must be >= 1");
}

double OnlineBench::coefficient(long t) const { return t % period == 1 ? spike : base; }

double OnlineBench::clamp(double x) const { return std::clamp(x, lo, hi); }

LossEval reddi_loss(long t, double x, const OnlineBench& bench) {
  if (t < 1) throw std::invalid_argument("reddi_loss: t must be >= 1");
  const double c = bench.coefficient(t);
  return {c * x, c};
}

void OnlineParams::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("online: eta must be positive");
  if (!(beta >= 0.0) || !(gamma >= 0.0)) throw std::invalid_argument("online: beta, gamma must be >= 0");
  if (delta != 0 && delta != 1) throw std::invalid_argument("online: delta must be 0 or 1");
  if (!(P0 > 0.0)) throw std::invalid_argument("online: P0 must be positive");
}

OnlineHnagState online_init(const OnlineParams& params, double x0) {
  params.validate();
  return {x0, x0, params.P0, params.eta * std::sqrt(params.P0), 0};
}

OnlineHnagState online_step_adam_hnag(const OnlineHnagState& s, const OnlineParams& p,
                                      const OnlineBench& bench) {
  OnlineHnagState out = s;
  out.t = s.t + 1;
  const double g = reddi_loss(out.t, s.x, bench).gradient;
  if (g == 0.0) return out;

  const double a = s.alpha;
  double p_ref;
  if (p.delta == 1) {
    out.y = bench.clamp(s.y - a * g / s.P);
    out.P = s.P / (1.0 + a) + a * p.gamma / (1.0 + a) * g * g / s.P;
    p_ref = s.P;
  } else {
    const double at = a / (1.0 + a);
    const double c = (1.0 - at) * s.P;
    out.P = 0.5 * c + 0.5 * std::sqrt(c * c + 4.0 * at * p.gamma * g * g);
    out.y = bench.clamp(s.y - at * g / out.P);
    p_ref = out.P;
  }
  // One dimension: the ratio g^T P^{-1} g / g^T P^{-2} g collapses to P.
  out.alpha = p.eta * std::sqrt(p_ref);
  out.x = bench.clamp((s.x + out.alpha * out.y - out.alpha * p.beta * g / p_ref) / (1.0 + out.alpha));
  return out;
}

void OnlineAdamParams::validate() const {
  if (!(eta > 0.0) || !(eps > 0.0)) throw std::invalid_argument("online adam: eta, eps must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("online adam: beta1, beta2 must lie in [0, 1)");
  }
}

OnlineAdamState online_step_adam(const OnlineAdamState& s, const OnlineAdamParams& p,
                                 const OnlineBench& bench) {
  OnlineAdamState out = s;
  out.t = s.t + 1;
  const double g = reddi_loss(out.t, s.x, bench).gradient;
  out.m = p.beta1 * s.m + (1.0 - p.beta1) * g;
  out.v = p.beta2 * s.v + (1.0 - p.beta2) * g * g;
  out.v_hat = std::max(s.v_hat, out.v);
  double m = out.m;
  double v = p.amsgrad ? out.v_hat : out.v;
  if (p.bias_correction) {
    const auto t = static_cast<double>(out.t);
    m /= 1.0 - std::pow(p.beta1, t);
    v /= 1.0 - std::pow(p.beta2, t);
  }
  out.x = bench.clamp(s.x - p.eta * m / (std::sqrt(v) + p.eps));
  return out;
}

RegretSeries regret(const std::vector<double>& losses, const OnlineBench& bench) {
  RegretSeries r;
  r.R.reserve(losses.size());
  r.R_over_t.reserve(losses.size());
  double played = 0.0;
  double coef = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    played += losses[i];
    coef += bench.coefficient(static_cast<long>(i) + 1);
    const double best = std::min(coef * bench.lo, coef * bench.hi);
    r.R.push_back(played - best);
    r.R_over_t.push_back(r.R.back() / static_cast<double>(i + 1));
  }
  return r;
}

double OnlineTrace::tail_mean(double fraction) const {
  if (x.empty()) throw std::invalid_argument("tail_mean: empty trace");
  const auto n = x.size();
  const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * static_cast<double>(n)));
  double sum = 0.0;
  for (std::size_t i = n - count; i < n; ++i) sum += x[i];
  return sum / static_cast<double>(count);
}

namespace {

template <class State, class Step>
OnlineTrace play(const OnlineBench& bench, State s, Step step, std::string method) {
  bench.validate();
  OnlineTrace tr;
  tr.method = std::move(method);
  tr.x.reserve(static_cast<std::size_t>(bench.T));
  tr.loss.reserve(static_cast<std::size_t>(bench.T));
  for (long t = 1; t <= bench.T; ++t) {
    tr.x.push_back(s.x);
    tr.loss.push_back(reddi_loss(t, s.x, bench).value);
    s = step(s);
  }
  tr.regret = regret(tr.loss, bench);
  return tr;
}

}  // namespace

OnlineTrace run_online_adam_hnag(const OnlineBench& bench, const OnlineParams& params) {
  return play(
      bench, online_init(params),
      [&](const OnlineHnagState& s) { return online_step_adam_hnag(s, params, bench); },
      params.delta == 1 ? "adam_hnag" : "adam_hnag_s");
}

OnlineTrace run_online_adam(const OnlineBench& bench, const OnlineAdamParams& params) {
  params.validate();
  return play(
      bench, OnlineAdamState{},
      [&](const OnlineAdamState& s) { return online_step_adam(s, params, bench); },
      params.amsgrad ? "amsgrad" : "adam");
}

void write_online_csv(const OnlineTrace& trace, std::ostream& out, long stride) {
  if (stride < 1) throw std::invalid_argument("write_online_csv: stride must be >= 1");
  out << "t,x,loss,R_t,R_t_over_t,method\n";
  const auto n = trace.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = static_cast<long>(i) + 1;
    if (t % stride != 0 && t != 1 && i + 1 != n) continue;
    out << t << ',' << format_double(trace.x[i]) << ',' << format_double(trace.loss[i]) << ','
        << format_double(trace.regret.R[i]) << ',' << format_double(trace.regret.R_over_t[i]) << ','
        << trace.method << '\n';
  }
}

}  // namespace ahnag
