#include "ahnag/flow.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "ahnag/format.hpp"

namespace ahnag {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

FlowSample sample(const FlowState& s, const FlowParams& p, const Objective& f, const OptimumInfo& opt,
                  double e0) {
  FlowSample out{s.t, kNaN, kNaN, kNaN, kNaN};
  const double fx = f.value(s.x);
  out.f_gap = fx - opt.f_star.value_or(0.0);
  if (opt.x_star) {
    out.y_inf_dist = inf_norm(s.y - *opt.x_star);
    if (p.which == FlowKind::AdamHNAGFlow && opt.f_star) {
      out.lyapunov = out.f_gap + 0.5 * weighted_sq_norm(s.y - *opt.x_star, s.P);
      const double base = std::isnan(e0) ? out.lyapunov : e0;
      out.bound = base * std::exp(-s.t);
    }
  }
  return out;
}

FlowState advance(const FlowState& s, const FlowDerivative& d, double h) {
  return {s.x + h * d.dx, s.y + h * d.dy, DiagPrecond(s.P.diag() + h * d.dP), s.t + h};
}

}  // namespace

void FlowParams::validate() const {
  if (!(beta >= 0.0)) throw std::invalid_argument("flow: beta must be >= 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("flow: gamma must be >= 0");
  if (which == FlowKind::AdamFlow && (!(tau1 > 0.0) || !(tau2 > 0.0))) {
    throw std::invalid_argument("flow: tau1 and tau2 must be positive");
  }
}

FlowDerivative flow_rhs(const FlowState& s, const FlowParams& p, const Objective& f) {
  require_same_dim(s.x.size(), s.y.size(), "flow_rhs");
  require_same_dim(s.x.size(), s.P.size(), "flow_rhs");
  const Vector g = f.gradient(s.x);
  const Vector g2 = g.array().square().matrix();
  FlowDerivative d;
  if (p.which == FlowKind::AdamHNAGFlow) {
    const Vector pinv_g = inverse_apply(s.P, g);
    d.dx = s.y - s.x - p.beta * pinv_g;
    d.dy = -pinv_g;
    d.dP = -s.P.diag() + p.gamma * inverse_apply(s.P, g2);
  } else {
    d.dx = -(s.y.array() / s.P.diag().array().sqrt()).matrix();
    d.dy = (g - s.y) / p.tau1;
    d.dP = (g2 - s.P.diag()) / p.tau2;
  }
  return d;
}

FlowResult integrate(const FlowState& s0, const FlowParams& p, const Objective& f, double T, double dt) {
  p.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (!(T >= 0.0)) throw std::invalid_argument("integrate: T must be nonnegative");
  const OptimumInfo opt = f.optimum_hint();

  FlowResult res;
  FlowState s = s0;
  s.t = 0.0;
  res.series.push_back(sample(s, p, f, opt, kNaN));
  const double e0 = res.series.front().lyapunov;
  const auto steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  res.series.reserve(static_cast<std::size_t>(steps) + 1);

  for (long i = 0; i < steps; ++i) {
    const double h = std::min(dt, T - s.t);
    if (!(h > 0.0)) break;
    const auto k1 = flow_rhs(s, p, f);
    const auto k2 = flow_rhs(advance(s, k1, h / 2), p, f);
    const auto k3 = flow_rhs(advance(s, k2, h / 2), p, f);
    const auto k4 = flow_rhs(advance(s, k3, h), p, f);
    FlowState next;
    next.x = s.x + h / 6 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
    next.y = s.y + h / 6 * (k1.dy + 2 * k2.dy + 2 * k3.dy + k4.dy);
    const Vector pn = s.P.diag() + h / 6 * (k1.dP + 2 * k2.dP + 2 * k3.dP + k4.dP);
    next.t = (i + 1 == steps) ? T : s.t + h;
    if (!next.x.allFinite() || !next.y.allFinite() || !pn.allFinite()) {
      res.blowup_time = next.t;
      break;
    }
    next.P = DiagPrecond(pn);
    s = std::move(next);
    res.series.push_back(sample(s, p, f, opt, e0));
  }
  res.final_state = s;
  return res;
}

StrongLyapunovReport check_strong_lyapunov(const std::vector<FlowSample>& series, const FlowParams& p,
                                           double tol) {
  StrongLyapunovReport rep;
  if (series.empty()) return rep;
  const double e0 = series.front().lyapunov;
  for (const auto& s : series) {
    if (p.gamma * s.y_inf_dist * s.y_inf_dist > 2.0 * p.beta) rep.premise_held = false;
    const double bound = e0 * std::exp(-(s.t - series.front().t));
    const double excess = bound > 0.0 ? s.lyapunov / bound - 1.0 : (s.lyapunov > 0.0 ? kNaN : 0.0);
    if (std::isnan(excess) || excess > tol) {
      ++rep.violations;
      if (!rep.first_violation_t) rep.first_violation_t = s.t;
    }
    if (!std::isnan(excess)) rep.max_violation = std::max(rep.max_violation, excess);
  }
  return rep;
}

void write_flow_csv(const std::vector<FlowSample>& series, std::ostream& out) {
  out << "t,lyapunov,bound,f_gap,y_inf_dist\n";
  for (const auto& s : series) {
    out << format_double(s.t) << ',' << format_double(s.lyapunov) << ',' << format_double(s.bound) << ','
        << format_double(s.f_gap) << ',' << format_double(s.y_inf_dist) << '\n';
  }
}

}  // namespace ahnag
