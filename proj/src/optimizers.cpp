#include "ahnag/optimizers.hpp"

#include <cmath>
#include <limits>

#include "ahnag/format.hpp"

namespace ahnag {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_finite(const Vector& v, const char* what, long k) {
  if (!v.allFinite()) {
    throw DivergenceError(std::string("non-finite ") + what + " at step " + std::to_string(k));
  }
}

Scheme scheme_of(Method m) { return m == Method::AdamHNAGs ? Scheme::Synchronous : Scheme::Lagged; }

double gamma_for(const OptimizerConfig& cfg, double alpha, Scheme scheme) {
  if (cfg.gamma_mode == GammaMode::Fixed) return cfg.gamma;
  const double a = scheme == Scheme::Synchronous ? alpha / (1.0 + alpha) : alpha;
  return a / (*cfg.R * *cfg.R);
}

StepParams next_params(const OptimizerConfig& cfg, double eta, Scheme scheme) {
  const double alpha = alpha_from_eta(eta);
  return make_step_params(eta, alpha, gamma_for(cfg, alpha, scheme), scheme);
}

// Marks a state as stationary at x: no further steps are taken.
OptState stationary(const OptState& s, Vector x, Vector g) {
  OptState out = s;
  out.x = x;
  out.x_plus = std::move(x);
  out.grad = std::move(g);
  out.k = s.k + 1;
  out.converged = true;
  out.last_ratio = kNaN;
  out.last_alpha = s.step.alpha;
  out.last_projected = false;
  return out;
}

Vector apply_projection(const OptimizerConfig& cfg, const Vector& y_half, const DiagPrecond& P,
                        bool& projected) {
  projected = false;
  if (!cfg.projection) return y_half;
  Vector y = project_box(y_half, *cfg.R, P);
  projected = (y.array() != y_half.array()).any();
  return y;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::GD: return "gd";
    case Method::HNAG: return "hnag";
    case Method::Adam: return "adam";
    case Method::AMSGrad: return "amsgrad";
    case Method::AdamHNAG: return "adam_hnag";
    case Method::AdamHNAGs: return "adam_hnag_s";
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& name) {
  for (Method m : {Method::GD, Method::HNAG, Method::Adam, Method::AMSGrad, Method::AdamHNAG,
                   Method::AdamHNAGs}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

void OptimizerConfig::validate() const {
  if (gamma_mode == GammaMode::Theoretical && !(R && *R > 0.0)) {
    throw std::invalid_argument("theoretical gamma mode requires R > 0");
  }
  if (gamma_mode == GammaMode::Fixed && !(gamma >= 0.0)) {
    throw std::invalid_argument("fixed gamma must be >= 0");
  }
  if (projection && !(R && *R > 0.0)) throw std::invalid_argument("projection requires R > 0");
  if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
  if (inner_max_iters < 1 || !(inner_tol > 0.0)) {
    throw std::invalid_argument("inner correction needs max_iters >= 1 and tol > 0");
  }
  if (method == Method::Adam || method == Method::AMSGrad) {
    if (!(adam.eta > 0.0) || !(adam.eps > 0.0)) throw std::invalid_argument("adam: eta, eps must be > 0");
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
      throw std::invalid_argument("adam: beta1, beta2 must lie in [0, 1)");
    }
  }
  if (amsgrad_box && !(*amsgrad_box > 0.0)) throw std::invalid_argument("amsgrad_box must be > 0");
}

Vector project_box(const Vector& y_half, double R, const DiagPrecond& P) {
  if (!(R > 0.0)) throw std::invalid_argument("project_box: R must be positive");
  require_same_dim(y_half.size(), P.size(), "project_box");
  return y_half.cwiseMax(-R / 2.0).cwiseMin(R / 2.0);
}

Vector synchronous_precond_update(const Vector& P, const Vector& grad_sq, double alpha_tilde,
                                  double gamma) {
  require_same_dim(P.size(), grad_sq.size(), "synchronous_precond_update");
  const double c = 1.0 - alpha_tilde;
  const auto cp = (c * P.array()).eval();
  return (0.5 * cp + 0.5 * (cp.square() + 4.0 * alpha_tilde * gamma * grad_sq.array()).sqrt()).matrix();
}

HnagSchedule hnag_schedule(long k, double L) {
  const double alpha = 2.0 / static_cast<double>(k + 1);
  return {alpha, alpha * alpha * L / (2.0 + alpha)};
}

OptState init_state(const Objective& f, const OptimizerConfig& cfg, const Vector& x0, const Vector& y0,
                    const DiagPrecond& P0) {
  cfg.validate();
  const Index d = f.dim();
  require_same_dim(x0.size(), d, "init_state x0");
  require_same_dim(y0.size(), d, "init_state y0");
  require_same_dim(P0.size(), d, "init_state P0");
  const double L = f.smoothness();

  OptState s{x0, x0, y0, P0, 0, {}, false, kNaN, kNaN, false, f.gradient(x0)};
  check_finite(s.grad, "gradient", 0);

  switch (cfg.method) {
    case Method::GD:
    case Method::Adam:
    case Method::AMSGrad:
      s.step = {1.0 / L, kNaN, kNaN, 0.0, Scheme::Lagged};
      return s;
    case Method::HNAG: {
      const auto sched = hnag_schedule(0, L);
      s.P = DiagPrecond::Constant(d, sched.P);
      s.step = {sched.P / L, sched.alpha, sched.alpha / (1.0 + sched.alpha), 0.0, Scheme::Lagged};
      s.x_plus = x0 - s.grad / L;
      return s;
    }
    case Method::AdamHNAG:
    case Method::AdamHNAGs: {
      if (gradient_vanishes(s.grad, x0)) {
        s.converged = true;
        s.step = {kNaN, kNaN, kNaN, 0.0, scheme_of(cfg.method)};
        return s;
      }
      const double eta0 = bar_eta(P0, s.grad, L);
      s.step = next_params(cfg, eta0, scheme_of(cfg.method));
      s.x_plus = x0 - eta0 * inverse_apply(P0, s.grad);
      return s;
    }
  }
  return s;
}

AdamState init_adam_state(const Objective& f, const Vector& x0) {
  require_same_dim(x0.size(), f.dim(), "init_adam_state");
  const Index d = x0.size();
  return {x0, Vector::Zero(d), Vector::Zero(d), std::nullopt, 0, f.gradient(x0)};
}

OptState adam_hnag_step(const OptState& state, const Objective& f, const OptimizerConfig& cfg) {
  if (state.converged) return state;
  const double L = f.smoothness();
  const DiagPrecond& P = state.P;
  auto x_of = [&](double a) -> Vector { return (state.x_plus + a * state.y) / (1.0 + a); };

  double alpha = state.step.alpha;
  if (cfg.inner_correction) {
    auto eval = [&](double a) {
      const Vector xa = x_of(a);
      const Vector ga = f.gradient(xa);
      check_finite(ga, "gradient", state.k + 1);
      if (gradient_vanishes(ga, xa)) return std::numeric_limits<double>::max();
      return bar_eta(P, ga, L);
    };
    alpha = inner_alpha_correction(alpha, eval, Scheme::Lagged, cfg.inner_max_iters, cfg.inner_tol).alpha;
  }

  Vector x_new = x_of(alpha);
  Vector g = f.gradient(x_new);
  check_finite(x_new, "x", state.k + 1);
  check_finite(g, "gradient", state.k + 1);
  if (gradient_vanishes(g, x_new)) return stationary(state, std::move(x_new), std::move(g));

  const double gamma = gamma_for(cfg, alpha, Scheme::Lagged);
  const double eta_next = bar_eta(P, g, L);
  const Vector pinv_g = inverse_apply(P, g);

  OptState out;
  out.x_plus = x_new - eta_next * pinv_g;
  out.y = apply_projection(cfg, state.y - alpha * pinv_g, P, out.last_projected);
  const Vector p_next = (P.diag() + alpha * gamma * (g.array().square() / P.diag().array()).matrix()) /
                        (1.0 + alpha);
  check_finite(p_next, "preconditioner", state.k + 1);
  out.P = DiagPrecond(p_next);
  out.x = std::move(x_new);
  out.grad = std::move(g);
  out.k = state.k + 1;
  out.last_alpha = alpha;
  out.last_ratio = consistency_ratio(eta_next, alpha, Scheme::Lagged);
  out.step = next_params(cfg, eta_next, Scheme::Lagged);
  check_finite(out.x_plus, "x_plus", out.k);
  check_finite(out.y, "y", out.k);
  return out;
}

OptState adam_hnag_s_step(const OptState& state, const Objective& f, const OptimizerConfig& cfg) {
  if (state.converged) return state;
  const double L = f.smoothness();
  auto x_of = [&](double a) -> Vector { return (state.x_plus + a * state.y) / (1.0 + a); };
  auto precond_of = [&](double a, const Vector& g) {
    const double at = a / (1.0 + a);
    return DiagPrecond(synchronous_precond_update(state.P.diag(), g.array().square().matrix(), at,
                                                  gamma_for(cfg, a, Scheme::Synchronous)));
  };

  double alpha = state.step.alpha;
  if (cfg.inner_correction) {
    auto eval = [&](double a) {
      const Vector xa = x_of(a);
      const Vector ga = f.gradient(xa);
      check_finite(ga, "gradient", state.k + 1);
      if (gradient_vanishes(ga, xa)) return std::numeric_limits<double>::max();
      return bar_eta(precond_of(a, ga), ga, L);
    };
    alpha = inner_alpha_correction(alpha, eval, Scheme::Synchronous, cfg.inner_max_iters, cfg.inner_tol)
                .alpha;
  }

  Vector x_new = x_of(alpha);
  Vector g = f.gradient(x_new);
  check_finite(x_new, "x", state.k + 1);
  check_finite(g, "gradient", state.k + 1);
  if (gradient_vanishes(g, x_new)) return stationary(state, std::move(x_new), std::move(g));

  const double alpha_tilde = alpha / (1.0 + alpha);
  OptState out;
  out.P = precond_of(alpha, g);
  const Vector pinv_g = inverse_apply(out.P, g);
  out.y = apply_projection(cfg, state.y - alpha_tilde * pinv_g, out.P, out.last_projected);
  const double eta_next = bar_eta(out.P, g, L);
  out.x_plus = x_new - eta_next * pinv_g;
  out.x = std::move(x_new);
  out.grad = std::move(g);
  out.k = state.k + 1;
  out.last_alpha = alpha;
  out.last_ratio = consistency_ratio(eta_next, alpha, Scheme::Synchronous);
  out.step = next_params(cfg, eta_next, Scheme::Synchronous);
  check_finite(out.x_plus, "x_plus", out.k);
  check_finite(out.y, "y", out.k);
  return out;
}

Vector gd_step(const Vector& x, const Objective& f) {
  const double L = f.smoothness();
  if (!(L > 0.0)) throw std::invalid_argument("gd_step: L must be positive");
  return x - f.gradient(x) / L;
}

OptState hnag_step(const OptState& state, const Objective& f) {
  if (state.converged) return state;
  const double L = f.smoothness();
  const auto sched = hnag_schedule(state.k, L);
  const double alpha = sched.alpha;

  Vector x_new = (state.x_plus + alpha * state.y) / (1.0 + alpha);
  Vector g = f.gradient(x_new);
  check_finite(g, "gradient", state.k + 1);

  OptState out;
  out.x_plus = x_new - g / L;
  out.y = state.y - (alpha / sched.P) * g;
  const auto next = hnag_schedule(state.k + 1, L);
  out.P = DiagPrecond::Constant(state.P.size(), next.P);
  out.x = std::move(x_new);
  out.grad = std::move(g);
  out.k = state.k + 1;
  out.last_alpha = alpha;
  out.last_ratio = kNaN;
  // eta_{k+1} P_k^{-1} = 1/L fixes eta_{k+1} = P_k / L.
  out.step = {sched.P / L, next.alpha, next.alpha / (1.0 + next.alpha), 0.0, Scheme::Lagged};
  check_finite(out.x_plus, "x_plus", out.k);
  check_finite(out.y, "y", out.k);
  return out;
}

namespace {

AdamState adam_like_step(const AdamState& s, const Objective& f, const OptimizerConfig& cfg, bool ams) {
  const auto& p = cfg.adam;
  const double k = static_cast<double>(s.k);
  Vector m_hat = s.m;
  Vector v_ref = ams && s.v_hat ? *s.v_hat : s.V;
  if (p.bias_correction && s.k >= 1) {
    m_hat /= (1.0 - std::pow(p.beta1, k));
    v_ref /= (1.0 - std::pow(p.beta2, k));
  }
  AdamState out;
  out.x = s.x - p.eta * (m_hat.array() / (v_ref.array().sqrt() + p.eps)).matrix();
  if (ams && cfg.amsgrad_box) out.x = out.x.cwiseMax(-*cfg.amsgrad_box).cwiseMin(*cfg.amsgrad_box);
  check_finite(out.x, "x", s.k + 1);
  out.grad = f.gradient(out.x);
  check_finite(out.grad, "gradient", s.k + 1);
  out.m = p.beta1 * s.m + (1.0 - p.beta1) * out.grad;
  out.V = p.beta2 * s.V + ((1.0 - p.beta2) * out.grad.array().square()).matrix();
  if (ams) out.v_hat = s.v_hat ? s.v_hat->cwiseMax(out.V) : out.V;
  out.k = s.k + 1;
  return out;
}

double opt_gap(const Objective& f, const Vector& x, double f_star) { return f.value(x) - f_star; }

}  // namespace

AdamState adam_step(const AdamState& state, const Objective& f, const OptimizerConfig& cfg) {
  return adam_like_step(state, f, cfg, false);
}

AdamState amsgrad_step(const AdamState& state, const Objective& f, const OptimizerConfig& cfg) {
  return adam_like_step(state, f, cfg, true);
}

Trace run(const Objective& f, const OptimizerConfig& cfg, const Vector& x0, const Vector& y0,
          const DiagPrecond& P0) {
  cfg.validate();
  const OptimumInfo opt = f.optimum_hint();
  const double f_star = opt.f_star.value_or(0.0);
  const bool have_lyap = opt.x_star.has_value() && opt.f_star.has_value();

  Trace tr;
  tr.method = to_string(cfg.method);
  if (!opt.f_star) tr.note = "f* unknown; f_gap reports f";

  auto stop_on_grad = [&](const Vector& g, const Vector& x) {
    return (cfg.grad_tol > 0.0 && g.norm() <= cfg.grad_tol) || gradient_vanishes(g, x);
  };

  if (cfg.method == Method::GD || cfg.method == Method::Adam || cfg.method == Method::AMSGrad) {
    const double eta = cfg.method == Method::GD ? 1.0 / f.smoothness() : cfg.adam.eta;
    AdamState s = init_adam_state(f, x0);
    for (;;) {
      TraceRow row;
      row.k = s.k;
      row.f_gap = opt_gap(f, s.x, f_star);
      row.lyapunov = kNaN;
      row.alpha = kNaN;
      row.eta = eta;
      row.ratio = kNaN;
      row.grad_norm = s.grad.norm();
      tr.rows.push_back(row);
      if (s.k >= cfg.max_iters || stop_on_grad(s.grad, s.x)) break;
      try {
        if (cfg.method == Method::GD) {
          AdamState next = s;
          next.x = s.x - s.grad / f.smoothness();
          check_finite(next.x, "x", s.k + 1);
          next.grad = f.gradient(next.x);
          check_finite(next.grad, "gradient", s.k + 1);
          next.k = s.k + 1;
          s = std::move(next);
        } else if (cfg.method == Method::Adam) {
          s = adam_step(s, f, cfg);
        } else {
          s = amsgrad_step(s, f, cfg);
        }
      } catch (const DivergenceError& e) {
        tr.rows.back().flags |= kDiverged;
        tr.diverged = true;
        tr.note = e.what();
        break;
      }
    }
    return tr;
  }

  OptState s = init_state(f, cfg, x0, y0, P0);
  for (;;) {
    TraceRow row;
    row.k = s.k;
    row.f_gap = opt_gap(f, s.x_plus, f_star);
    row.lyapunov = have_lyap ? lyapunov(s.x_plus, s.y, s.P, f, opt) : kNaN;
    row.alpha = s.step.alpha;
    row.eta = s.step.eta;
    row.ratio = kNaN;
    row.grad_norm = s.grad.norm();
    if (opt.x_star) row.y_inf_dist = inf_norm(s.y - *opt.x_star);
    if (s.last_projected) row.flags |= kProjected;
    row.p_mean = s.P.mean();
    row.gamma = s.step.gamma;
    row.grad_sq_mean = s.grad.squaredNorm() / static_cast<double>(s.grad.size());
    tr.rows.push_back(row);
    if (s.converged || s.k >= cfg.max_iters || stop_on_grad(s.grad, s.x)) break;
    try {
      OptState next = cfg.method == Method::HNAG        ? hnag_step(s, f)
                      : cfg.method == Method::AdamHNAG ? adam_hnag_step(s, f, cfg)
                                                       : adam_hnag_s_step(s, f, cfg);
      auto& prev = tr.rows.back();
      prev.alpha = next.last_alpha;
      prev.ratio = next.last_ratio;
      if (std::isfinite(next.last_ratio) && next.last_ratio < 1.0) prev.flags |= kRatioViolated;
      s = std::move(next);
    } catch (const DivergenceError& e) {
      tr.rows.back().flags |= kDiverged;
      tr.diverged = true;
      tr.note = e.what();
      break;
    }
  }
  return tr;
}

Trace run(const Objective& f, const OptimizerConfig& cfg, const Vector& x0) {
  return run(f, cfg, x0, x0, DiagPrecond::Identity(x0.size()));
}

OptimumInfo presolve_optimum(const Objective& f, const Vector& x0, double grad_tol, long max_iters) {
  OptimizerConfig cfg;
  cfg.method = Method::AdamHNAG;
  OptState s = init_state(f, cfg, x0, x0, DiagPrecond::Identity(x0.size()));
  Vector best = s.x_plus;
  double best_f = f.value(best);
  double last_grad = s.grad.norm();
  while (!s.converged && s.k < max_iters && last_grad > grad_tol) {
    s = adam_hnag_step(s, f, cfg);
    last_grad = s.grad.norm();
    const double fp = f.value(s.x_plus);
    if (fp < best_f) {
      best_f = fp;
      best = s.x_plus;
    }
    if (s.converged) {
      const double fx = f.value(s.x);
      if (fx < best_f) {
        best_f = fx;
        best = s.x;
      }
    }
  }
  OptimumInfo info;
  info.x_star = best;
  info.f_star = best_f;
  info.provenance = "presolve adam_hnag iters=" + std::to_string(s.k) +
                    " grad_norm=" + format_double(last_grad);
  return info;
}

}  // namespace ahnag
