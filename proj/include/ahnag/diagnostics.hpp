#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ahnag/numkit.hpp"
#include "ahnag/objectives.hpp"

namespace ahnag {

enum TraceFlag : std::uint8_t {
  kRatioViolated = 1u << 0,
  kProjected = 1u << 1,
  kDiverged = 1u << 2,
};

/// One row per iterate. Row k holds the state after k steps together with
/// the parameters of step k (alpha_k, eta_k) and that step's consistency
/// ratio eta_{k+1} (1+alpha_k)^{2-delta} / (2 alpha_k^2). Quantities that
/// do not apply to a method are NaN.
struct TraceRow {
  long k = 0;
  double f_gap = 0.0;
  double lyapunov = 0.0;
  double alpha = 0.0;
  double eta = 0.0;
  double ratio = 0.0;
  double grad_norm = 0.0;
  std::optional<double> y_inf_dist;
  std::uint8_t flags = 0;
  // Not exported; used by forced_balance_check.
  double p_mean = 0.0;
  double gamma = 0.0;
  double grad_sq_mean = 0.0;
};

struct Trace {
  std::string method;
  std::vector<TraceRow> rows;
  bool diverged = false;
  std::string note;
};

/// Exact header of every optimizer trace file.
inline constexpr const char* kTraceCsvHeader =
    "k,f_gap,lyapunov,alpha,eta,ratio,grad_norm,y_inf_dist,flags";

/// Writes rows with k % stride == 0 plus the last row.
void write_trace_csv(const Trace& trace, std::ostream& out, long stride = 1);
std::string flags_to_string(std::uint8_t flags);

/// f(x_plus) - f* + 1/2 ||y - x*||_P^2. Throws std::invalid_argument when the
/// optimum information lacks x* or f*.
double lyapunov(const Vector& x_plus, const Vector& y, const DiagPrecond& P, const Objective& f,
                const OptimumInfo& opt);

/// rho_k = prod_{j<=k} (1 + alpha_j)^{-1}, accumulated in log space.
std::vector<double> contraction_bound(const std::vector<double>& alphas);

/// Least-squares slope of log(value) against log(k) over the trailing
/// `tail_fraction` of the points. Needs at least 3 points in the window.
double rate_fit(const std::vector<std::pair<double, double>>& series, double tail_fraction);

struct RecursionSample {
  long k;
  double p;
  double alpha;
  double rho;
};

/// p_{k+1} = p_k / (1 + alpha_k), alpha_k = sqrt(p_k / (2L)); returns
/// k = 0..K-1 with rho_k = prod_{j<=k} (1 + alpha_j)^{-1}.
std::vector<RecursionSample> unforced_recursion(double p0, double L, long K);

/// p_{k+1} - p_k = -alpha_k p_{k+1} + g_{k+1}^2 / (2L) with the same alpha
/// rule, driven by the supplied gradient magnitudes. Used as an oracle for
/// forced_balance_check.
std::vector<RecursionSample> forced_recursion(double p0, double L, const std::vector<double>& g);

enum class BalanceRegime { Unforced, Forced, Mixed };

struct BalanceSample {
  double alpha;
  double p;
  double gamma;
  double grad_sq;
};

struct BalanceReport {
  std::vector<double> ratio;  ///< dissipation / forcing per step (inf when unforced)
  double tail_median = 0.0;
  BalanceRegime regime = BalanceRegime::Mixed;
};

/// Dissipation alpha_k p_k against forcing alpha_k gamma_k g_k^2 / p_k.
/// With gamma_k = alpha_k and alpha_k = sqrt(p_k / 2L) this is the ratio
/// alpha_k p_k / (g_k^2 / 2L). The tail (last 10%) is classified as
/// unforced (median > 10), forced (median in [0.5, 2]) or mixed.
BalanceReport forced_balance_check(const std::vector<BalanceSample>& samples);
BalanceReport forced_balance_check(const Trace& trace);

std::string to_string(BalanceRegime r);

/// Audit of the one-step contraction E_{k+1} <= E_k / (1 + alpha_k) on
/// steps whose recorded ratio is >= 1, and of the cumulative bound
/// E_k <= E_0 rho_{k-1}.
struct ContractionAudit {
  long steps_checked = 0;
  long step_violations = 0;
  double worst_step_excess = 0.0;  ///< max of E_{k+1}(1+alpha_k)/E_k - 1
  long cumulative_violations = 0;
  double worst_cumulative_excess = 0.0;
  bool all_ratios_consistent = true;
};

ContractionAudit audit_contraction(const Trace& trace, double step_rel_tol, double cumulative_rel_tol);

}  // namespace ahnag
