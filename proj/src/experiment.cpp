#include "ahnag/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>

#include "ahnag/datasets.hpp"
#include "ahnag/diagnostics.hpp"
#include "ahnag/flow.hpp"
#include "ahnag/format.hpp"
#include "ahnag/online.hpp"
#include "ahnag/optimizers.hpp"
#include "ahnag/rng.hpp"

namespace ahnag {

namespace {

namespace fs = std::filesystem;

struct Problem {
  std::string label;  ///< e.g. "kappa_20000" or "libsvm"
  std::shared_ptr<const Objective> f;
};

struct Task {
  std::string name;
  std::string group;   ///< problem label
  std::string method;  ///< method name
  std::optional<double> lr;
  std::function<CellReport()> body;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string label_number(double v) {
  std::string s = format_double(v);
  std::replace(s.begin(), s.end(), '.', 'p');
  std::replace(s.begin(), s.end(), '-', 'm');
  std::replace(s.begin(), s.end(), '+', 'p');
  return s;
}

OptimumInfo reference_optimum(const LogisticObjective& f, long presolve_iters, std::ostream& log,
                              const std::string& label) {
  try {
    return logistic_newton_optimum(f);
  } catch (const std::runtime_error& e) {
    log << "[" << label << "] Newton reference failed (" << e.what() << "); first-order presolve\n";
  }
  return presolve_optimum(f, Vector::Zero(f.dim()), 1e-10, presolve_iters);
}

Problem logistic_problem(const Dataset& data, const ExperimentConfig& cfg, const std::string& label,
                         std::ostream& log, std::vector<std::pair<std::string, std::string>>& summary) {
  auto base = std::make_shared<LogisticObjective>(data.as_logistic(cfg.data.fit_bias));
  OptimumInfo opt = reference_optimum(*base, cfg.presolve_iters, log, label);
  summary.emplace_back("problem." + label + ".n", std::to_string(data.n()));
  summary.emplace_back("problem." + label + ".d", std::to_string(data.d()));
  summary.emplace_back("problem." + label + ".L", format_double(base->smoothness()));
  summary.emplace_back("problem." + label + ".f_star", format_double(*opt.f_star));
  summary.emplace_back("problem." + label + ".f_star_provenance", opt.provenance);
  return {label, std::make_shared<AnchoredObjective>(base, std::move(opt))};
}

OptimizerConfig optimizer_config(const ExperimentConfig& cfg, Method m, std::optional<double> lr) {
  OptimizerConfig oc;
  oc.method = m;
  oc.max_iters = cfg.iterations;
  if (m == Method::AdamHNAG || m == Method::AdamHNAGs) {
    const auto& h = cfg.hnag.at(to_string(m));
    oc.gamma_mode = h.gamma_mode;
    oc.gamma = h.gamma;
    oc.R = h.R;
    oc.projection = h.projection;
    oc.inner_correction = h.inner_correction;
  }
  oc.adam = {lr.value_or(1e-3), cfg.adam.beta1, cfg.adam.beta2, cfg.adam.eps, cfg.adam.bias_correction};
  oc.amsgrad_box = cfg.amsgrad_box;
  return oc;
}

CellReport logreg_cell(const ExperimentConfig& cfg, const Problem& prob, Method m, std::optional<double> lr,
                       const fs::path& dir, const std::string& name) {
  const OptimizerConfig oc = optimizer_config(cfg, m, lr);
  const Vector x0 = Vector::Zero(prob.f->dim());
  double p0 = 1.0;
  if (m == Method::AdamHNAG || m == Method::AdamHNAGs) p0 = cfg.hnag.at(to_string(m)).p0;
  const Trace tr = run(*prob.f, oc, x0, x0, DiagPrecond::Constant(x0.size(), p0));

  CellReport rep;
  rep.name = name;
  rep.file = name + ".csv";
  const fs::path path = dir / rep.file;
  auto out = open_out(path);
  write_trace_csv(tr, out, cfg.stride);
  finish(out, path);

  const auto& last = tr.rows.back();
  const double f_star = *prob.f->optimum_hint().f_star;
  if (tr.diverged) rep.status = "diverged";
  rep.values.emplace_back("iterations", std::to_string(last.k));
  rep.values.emplace_back("final_f_gap", format_double(last.f_gap));
  rep.values.emplace_back("final_loss", format_double(last.f_gap + f_star));
  double min_gap = std::numeric_limits<double>::infinity();
  long violations = 0;
  long last_violation = -1;
  for (const auto& r : tr.rows) {
    min_gap = std::min(min_gap, r.f_gap);
    if (r.flags & kRatioViolated) {
      ++violations;
      last_violation = r.k;
    }
  }
  rep.values.emplace_back("min_f_gap", format_double(min_gap));
  if (m == Method::AdamHNAG || m == Method::AdamHNAGs) {
    rep.values.emplace_back("ratio_violations", std::to_string(violations));
    rep.values.emplace_back("last_ratio_violation_k", std::to_string(last_violation));
    const auto bal = forced_balance_check(tr);
    rep.values.emplace_back("balance_tail_median", format_double(bal.tail_median));
    rep.values.emplace_back("balance_regime", to_string(bal.regime));
    rep.values.emplace_back("inner_correction", oc.inner_correction ? "true" : "false");
    rep.values.emplace_back("gamma_mode", oc.gamma_mode == GammaMode::Fixed ? "fixed" : "theoretical");
  }
  if (lr) rep.values.emplace_back("lr", format_double(*lr));
  if (!tr.note.empty()) rep.values.emplace_back("note", tr.note);
  return rep;
}

std::vector<Task> logreg_tasks(const ExperimentConfig& cfg, const std::vector<Problem>& problems,
                               const fs::path& dir) {
  std::vector<Task> tasks;
  for (const auto& prob : problems) {
    for (const auto& name : cfg.methods) {
      const Method m = *parse_method(name);
      const bool grid = m == Method::Adam || m == Method::AMSGrad;
      const std::vector<std::optional<double>> lrs =
          grid ? std::vector<std::optional<double>>(cfg.adam.lr.begin(), cfg.adam.lr.end())
               : std::vector<std::optional<double>>{std::nullopt};
      for (const auto& lr : lrs) {
        std::string cell = name;
        if (lr) cell += "_lr" + label_number(*lr);
        if (problems.size() > 1 || prob.label != "libsvm") cell += "_" + prob.label;
        tasks.push_back({cell, prob.label, name, lr, [&cfg, &prob, m, lr, dir, cell] {
                           return logreg_cell(cfg, prob, m, lr, dir, cell);
                         }});
      }
    }
  }
  return tasks;
}

std::shared_ptr<const Objective> flow_problem(const ExperimentConfig& cfg, std::ostream& log,
                                              std::vector<std::pair<std::string, std::string>>& summary) {
  const double kappa = cfg.data.kappa.front();
  if (cfg.flow.problem == "quadratic") {
    const Index d = cfg.data.d;
    Vector a(d), b(d);
    CounterRng rng(cfg.data.seed);
    for (Index i = 0; i < d; ++i) {
      const double frac = d > 1 ? static_cast<double>(i) / static_cast<double>(d - 1) : 0.0;
      a[i] = std::pow(kappa, -frac);
      b[i] = 2.0 * rng.uniform() - 1.0;
    }
    summary.emplace_back("problem.flow.kind", "quadratic");
    return std::make_shared<QuadraticObjective>(a, b);
  }
  const Dataset data = synth_dataset(cfg.data.n, cfg.data.d, kappa, cfg.data.seed);
  return logistic_problem(data, cfg, "flow", log, summary).f;
}

CellReport flow_cell(const ExperimentConfig& cfg, const Objective& f, const std::string& method,
                     const fs::path& dir) {
  FlowParams p;
  p.beta = cfg.flow.beta;
  p.gamma = cfg.flow.gamma;
  p.tau1 = cfg.flow.tau1;
  p.tau2 = cfg.flow.tau2;
  p.which = method == "adam" ? FlowKind::AdamFlow : FlowKind::AdamHNAGFlow;
  const Index d = f.dim();
  const double p0 = cfg.flow.p0_scale * f.smoothness();
  FlowState s0;
  s0.x = Vector::Zero(d);
  s0.y = p.which == FlowKind::AdamFlow ? Vector::Zero(d) : s0.x;
  s0.P = DiagPrecond::Constant(d, p.which == FlowKind::AdamFlow ? p0 * p0 : p0);
  const FlowResult res = integrate(s0, p, f, cfg.flow.T, cfg.flow.dt);

  CellReport rep;
  rep.name = "flow_" + method;
  rep.file = rep.name + ".csv";
  std::vector<FlowSample> kept;
  for (std::size_t i = 0; i < res.series.size(); ++i) {
    if (i % static_cast<std::size_t>(cfg.flow.stride) == 0 || i + 1 == res.series.size()) {
      kept.push_back(res.series[i]);
    }
  }
  const fs::path path = dir / rep.file;
  auto out = open_out(path);
  write_flow_csv(kept, out);
  finish(out, path);
  if (res.blowup_time) {
    rep.status = "diverged";
    rep.values.emplace_back("blowup_time", format_double(*res.blowup_time));
  }
  rep.values.emplace_back("final_f_gap", format_double(res.series.back().f_gap));
  if (p.which == FlowKind::AdamHNAGFlow) {
    const auto chk = check_strong_lyapunov(res.series, p, 1e-4);
    rep.values.emplace_back("decay_violations", std::to_string(chk.violations));
    rep.values.emplace_back("decay_max_violation", format_double(chk.max_violation));
    rep.values.emplace_back("premise_held", chk.premise_held ? "true" : "false");
  }
  return rep;
}

CellReport reddi_cell(const ExperimentConfig& cfg, const std::string& method, const fs::path& dir) {
  OnlineTrace tr;
  if (method == "adam_hnag" || method == "adam_hnag_s") {
    OnlineParams p = cfg.reddi.hnag;
    p.delta = method == "adam_hnag" ? 1 : 0;
    tr = run_online_adam_hnag(cfg.reddi.bench, p);
  } else {
    OnlineAdamParams p = cfg.reddi.adam;
    p.amsgrad = method == "amsgrad";
    tr = run_online_adam(cfg.reddi.bench, p);
  }
  CellReport rep;
  rep.name = "reddi_" + method;
  rep.file = rep.name + ".csv";
  const fs::path path = dir / rep.file;
  auto out = open_out(path);
  write_online_csv(tr, out, cfg.reddi.stride);
  finish(out, path);
  rep.values.emplace_back("tail_mean_x", format_double(tr.tail_mean(0.1)));
  rep.values.emplace_back("final_x", format_double(tr.x.back()));
  rep.values.emplace_back("R_T_over_T", format_double(tr.regret.R_over_t.back()));
  return rep;
}

CellReport unforced_cell(const ExperimentConfig& cfg, const fs::path& dir) {
  const auto& u = cfg.unforced;
  const auto samples = unforced_recursion(u.p0, u.L, u.K);
  CellReport rep;
  rep.name = "unforced";
  rep.file = "unforced.csv";
  const fs::path path = dir / rep.file;
  auto out = open_out(path);
  out << "k,p,alpha,rho,k_alpha\n";
  std::vector<std::pair<double, double>> ps, rhos;
  double ka_sum = 0.0;
  long ka_count = 0;
  for (const auto& s : samples) {
    const double k = static_cast<double>(s.k + 1);
    if (s.k % u.stride == 0 || s.k + 1 == u.K) {
      out << s.k << ',' << format_double(s.p) << ',' << format_double(s.alpha) << ',' << format_double(s.rho)
          << ',' << format_double(static_cast<double>(s.k) * s.alpha) << '\n';
    }
    ps.emplace_back(k, s.p);
    rhos.emplace_back(k, s.rho);
    if (s.k >= u.K / 10) {
      ka_sum += static_cast<double>(s.k) * s.alpha;
      ++ka_count;
    }
  }
  finish(out, path);
  if (samples.size() >= 30 && u.p0 > 0.0) {
    rep.values.emplace_back("rate_p", format_double(rate_fit(ps, 0.9)));
    rep.values.emplace_back("rate_rho", format_double(rate_fit(rhos, 0.9)));
  }
  if (ka_count > 0) rep.values.emplace_back("mean_k_alpha", format_double(ka_sum / static_cast<double>(ka_count)));
  return rep;
}

void run_pool(std::vector<Task>& tasks, std::vector<CellReport>& reports, int jobs, std::ostream& log) {
  reports.assign(tasks.size(), {});
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  std::exception_ptr io_failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      CellReport rep;
      try {
        rep = tasks[i].body();
      } catch (const IoError&) {
        std::lock_guard lock(log_mu);
        if (!io_failure) io_failure = std::current_exception();
        rep.name = tasks[i].name;
        rep.status = "error";
      } catch (const std::exception& e) {
        rep.name = tasks[i].name;
        rep.status = "error";
        rep.values.emplace_back("error", e.what());
      }
      {
        std::lock_guard lock(log_mu);
        log << "[" << rep.name << "] " << rep.status << '\n';
      }
      reports[i] = std::move(rep);
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (io_failure) std::rethrow_exception(io_failure);
}

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

}  // namespace

ExperimentReport run_experiment(ExperimentConfig cfg, const RunOptions& opts, std::ostream& log) {
  if (opts.seed) cfg.data.seed = *opts.seed;
  if (opts.out) cfg.output = *opts.out;
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = cfg.output;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  ExperimentReport report;
  std::vector<Problem> problems;
  std::shared_ptr<const Objective> flow_f;
  std::vector<Task> tasks;

  switch (cfg.experiment) {
    case ExperimentKind::SyntheticLogreg:
      for (double kappa : cfg.data.kappa) {
        const Dataset data = synth_dataset(cfg.data.n, cfg.data.d, kappa, cfg.data.seed);
        problems.push_back(logistic_problem(data, cfg, "kappa" + label_number(kappa), log, report.summary));
      }
      tasks = logreg_tasks(cfg, problems, dir);
      break;
    case ExperimentKind::LibsvmLogreg: {
      const Dataset data = parse_libsvm(*cfg.data.path);
      problems.push_back(logistic_problem(data, cfg, "libsvm", log, report.summary));
      tasks = logreg_tasks(cfg, problems, dir);
      break;
    }
    case ExperimentKind::FlowDecay:
      flow_f = flow_problem(cfg, log, report.summary);
      for (const auto& m : cfg.methods) {
        tasks.push_back({"flow_" + m, "flow", m, std::nullopt,
                         [&cfg, &flow_f, m, dir] { return flow_cell(cfg, *flow_f, m, dir); }});
      }
      break;
    case ExperimentKind::Reddi:
      for (const auto& m : cfg.methods) {
        tasks.push_back({"reddi_" + m, "reddi", m, std::nullopt, [&cfg, m, dir] { return reddi_cell(cfg, m, dir); }});
      }
      break;
    case ExperimentKind::UnforcedOracle:
      tasks.push_back({"unforced", "unforced", "", std::nullopt, [&cfg, dir] { return unforced_cell(cfg, dir); }});
      break;
  }

  run_pool(tasks, report.cells, opts.jobs, log);

  // Best grid run per (problem, method): lowest final f_gap among finished runs.
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!tasks[i].lr) continue;
    const bool first = std::none_of(tasks.begin(), tasks.begin() + static_cast<std::ptrdiff_t>(i), [&](const Task& t) {
      return t.lr && t.group == tasks[i].group && t.method == tasks[i].method;
    });
    if (!first) continue;
    double best = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> best_j;
    for (std::size_t j = i; j < tasks.size(); ++j) {
      if (!tasks[j].lr || tasks[j].group != tasks[i].group || tasks[j].method != tasks[i].method) continue;
      if (report.cells[j].status != "ok") continue;
      for (const auto& [k, v] : report.cells[j].values) {
        if (k != "final_f_gap") continue;
        const double gap = std::stod(v);
        if (gap < best) {
          best = gap;
          best_j = j;
        }
      }
    }
    const std::string key = "best." + tasks[i].group + "." + tasks[i].method;
    if (best_j) {
      report.summary.emplace_back(key + ".lr", format_double(*tasks[*best_j].lr));
      report.summary.emplace_back(key + ".cell", tasks[*best_j].name);
      report.cells[*best_j].values.emplace_back("best_in_grid", "true");
    } else {
      report.summary.emplace_back(key + ".lr", "none");
    }
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report.manifest = dir / "manifest.txt";
  std::ofstream man(report.manifest, std::ios::binary);
  if (!man) throw IoError("cannot write manifest " + report.manifest.string());
  man << "tool = ahnag\n";
  man << "version = " << kVersion << '\n';
  man << "eigen_version = " << eigen_version() << '\n';
  man << "experiment = " << to_string(cfg.experiment) << '\n';
  man << "seed = " << cfg.data.seed << '\n';
  man << "jobs = " << opts.jobs << '\n';
  for (const auto& [k, v] : cfg.echo) man << "config." << k << " = " << v << '\n';
  for (const auto& [k, v] : report.summary) man << k << " = " << v << '\n';
  man << "cells = " << report.cells.size() << '\n';
  for (const auto& c : report.cells) {
    man << "cell." << c.name << ".file = " << c.file << '\n';
    man << "cell." << c.name << ".status = " << c.status << '\n';
    for (const auto& [k, v] : c.values) man << "cell." << c.name << '.' << k << " = " << v << '\n';
    if (c.status == "error") report.exit_code = kExitCellError;
  }
  man << "wall_time_s = " << format_double(wall) << '\n';
  man.flush();
  if (!man) throw IoError("write failed for " + report.manifest.string());
  return report;
}

}  // namespace ahnag
