#include "ahnag/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "ahnag/format.hpp"

namespace ahnag {

std::string flags_to_string(std::uint8_t flags) {
  std::string s;
  auto add = [&s](const char* name) {
    if (!s.empty()) s += '|';
    s += name;
  };
  if (flags & kRatioViolated) add("ratio_violated");
  if (flags & kProjected) add("projected");
  if (flags & kDiverged) add("diverged");
  return s;
}

void write_trace_csv(const Trace& trace, std::ostream& out, long stride) {
  if (stride < 1) throw std::invalid_argument("write_trace_csv: stride must be >= 1");
  out << kTraceCsvHeader << '\n';
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const auto& r = trace.rows[i];
    if (r.k % stride != 0 && i + 1 != trace.rows.size()) continue;
    out << r.k << ',' << format_double(r.f_gap) << ',' << format_double(r.lyapunov) << ','
        << format_double(r.alpha) << ',' << format_double(r.eta) << ',' << format_double(r.ratio)
        << ',' << format_double(r.grad_norm) << ','
        << (r.y_inf_dist ? format_double(*r.y_inf_dist) : std::string()) << ','
        << flags_to_string(r.flags) << '\n';
  }
}

double lyapunov(const Vector& x_plus, const Vector& y, const DiagPrecond& P, const Objective& f,
                const OptimumInfo& opt) {
  if (!opt.x_star || !opt.f_star) {
    throw std::invalid_argument("lyapunov: optimum information must provide x* and f*");
  }
  return f.value(x_plus) - *opt.f_star + 0.5 * weighted_sq_norm(y - *opt.x_star, P);
}

std::vector<double> contraction_bound(const std::vector<double>& alphas) {
  std::vector<double> rho;
  rho.reserve(alphas.size());
  double log_rho = 0.0;
  for (double a : alphas) {
    if (!(a > 0.0)) throw std::invalid_argument("contraction_bound: alpha must be positive");
    log_rho -= std::log1p(a);
    rho.push_back(std::exp(log_rho));
  }
  return rho;
}

double rate_fit(const std::vector<std::pair<double, double>>& series, double tail_fraction) {
  if (!(tail_fraction > 0.0) || tail_fraction > 1.0) {
    throw std::invalid_argument("rate_fit: tail fraction must lie in (0, 1]");
  }
  const auto n = series.size();
  const auto count = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
  if (count < 3) throw std::invalid_argument("rate_fit: need at least 3 points in the window");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = n - count; i < n; ++i) {
    const auto [k, v] = series[i];
    if (!(k > 0.0) || !(v > 0.0)) throw std::invalid_argument("rate_fit: needs positive k and values");
    const double lx = std::log(k), ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(count);
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<RecursionSample> unforced_recursion(double p0, double L, long K) {
  if (!(L > 0.0) || p0 < 0.0) throw std::invalid_argument("unforced_recursion: need L > 0, p0 >= 0");
  std::vector<RecursionSample> out;
  out.reserve(static_cast<std::size_t>(std::max(K, 0L)));
  double p = p0;
  double log_rho = 0.0;
  for (long k = 0; k < K; ++k) {
    const double alpha = std::sqrt(p / (2.0 * L));
    log_rho -= std::log1p(alpha);
    out.push_back({k, p, alpha, std::exp(log_rho)});
    p /= (1.0 + alpha);
  }
  return out;
}

std::vector<RecursionSample> forced_recursion(double p0, double L, const std::vector<double>& g) {
  if (!(L > 0.0) || p0 < 0.0) throw std::invalid_argument("forced_recursion: need L > 0, p0 >= 0");
  std::vector<RecursionSample> out;
  out.reserve(g.size());
  double p = p0;
  double log_rho = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double alpha = std::sqrt(p / (2.0 * L));
    log_rho -= std::log1p(alpha);
    out.push_back({static_cast<long>(k), p, alpha, std::exp(log_rho)});
    p = (p + g[k] * g[k] / (2.0 * L)) / (1.0 + alpha);
  }
  return out;
}

BalanceReport forced_balance_check(const std::vector<BalanceSample>& samples) {
  BalanceReport rep;
  rep.ratio.reserve(samples.size());
  for (const auto& s : samples) {
    const double forcing = s.gamma * s.grad_sq / s.p;
    rep.ratio.push_back(forcing > 0.0 ? s.p / forcing : std::numeric_limits<double>::infinity());
  }
  if (rep.ratio.empty()) return rep;
  const std::size_t tail = std::max<std::size_t>(1, rep.ratio.size() / 10);
  std::vector<double> t(rep.ratio.end() - static_cast<std::ptrdiff_t>(tail), rep.ratio.end());
  std::nth_element(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(t.size() / 2), t.end());
  rep.tail_median = t[t.size() / 2];
  if (rep.tail_median > 10.0) {
    rep.regime = BalanceRegime::Unforced;
  } else if (rep.tail_median >= 0.5 && rep.tail_median <= 2.0) {
    rep.regime = BalanceRegime::Forced;
  } else {
    rep.regime = BalanceRegime::Mixed;
  }
  return rep;
}

BalanceReport forced_balance_check(const Trace& trace) {
  std::vector<BalanceSample> s;
  s.reserve(trace.rows.size());
  for (const auto& r : trace.rows) {
    if (std::isfinite(r.alpha) && r.p_mean > 0.0) s.push_back({r.alpha, r.p_mean, r.gamma, r.grad_sq_mean});
  }
  return forced_balance_check(s);
}

std::string to_string(BalanceRegime r) {
  switch (r) {
    case BalanceRegime::Unforced: return "unforced";
    case BalanceRegime::Forced: return "forced";
    case BalanceRegime::Mixed: return "mixed";
  }
  return "mixed";
}

ContractionAudit audit_contraction(const Trace& trace, double step_rel_tol, double cumulative_rel_tol) {
  ContractionAudit a;
  const auto& rows = trace.rows;
  if (rows.empty()) return a;
  const double e0 = rows.front().lyapunov;
  double log_rho = 0.0;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    const auto& cur = rows[k];
    const auto& nxt = rows[k + 1];
    log_rho -= std::log1p(cur.alpha);
    if (!(cur.ratio >= 1.0)) a.all_ratios_consistent = false;
    if (cur.ratio >= 1.0) {
      ++a.steps_checked;
      const double bound = cur.lyapunov / (1.0 + cur.alpha);
      const double excess = cur.lyapunov > 0.0 ? nxt.lyapunov / bound - 1.0 : 0.0;
      a.worst_step_excess = std::max(a.worst_step_excess, excess);
      if (nxt.lyapunov > bound * (1.0 + step_rel_tol)) ++a.step_violations;
    }
    const double cum = e0 * std::exp(log_rho);
    const double cexcess = cum > 0.0 ? nxt.lyapunov / cum - 1.0 : 0.0;
    a.worst_cumulative_excess = std::max(a.worst_cumulative_excess, cexcess);
    if (nxt.lyapunov > cum * (1.0 + cumulative_rel_tol)) ++a.cumulative_violations;
  }
  return a;
}

}  // namespace ahnag
