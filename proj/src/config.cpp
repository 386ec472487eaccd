#include "ahnag/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <sstream>

#include "ahnag/datasets.hpp"

namespace ahnag {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void fail(const std::string& key, const std::string& msg) { throw ConfigError(key + ": " + msg); }

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out)) fail(key, "expected a number, got '" + v + "'");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 9e15) fail(key, "expected an integer, got '" + v + "'");
  return static_cast<long>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  fail(key, "expected true or false, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
  if (out.empty()) fail(key, "expected a non-empty list");
  return out;
}

using Handler = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

void add_hnag_keys(std::map<std::string, Handler>& h, const std::string& section) {
  auto cell = [section](ExperimentConfig& c) -> HnagFamilyConfig& { return c.hnag[section]; };
  h[section + ".gamma_mode"] = [cell](ExperimentConfig& c, const std::string& k, const std::string& v) {
    if (v == "fixed") {
      cell(c).gamma_mode = GammaMode::Fixed;
    } else if (v == "theoretical") {
      cell(c).gamma_mode = GammaMode::Theoretical;
    } else {
      fail(k, "expected fixed or theoretical, got '" + v + "'");
    }
  };
  h[section + ".gamma"] = [cell](ExperimentConfig& c, const std::string& k, const std::string& v) {
    cell(c).gamma = to_double(k, v);
  };
  h[section + ".R"] = [cell](ExperimentConfig& c, const std::string& k, const std::string& v) {
    cell(c).R = to_double(k, v);
  };
  h[section + ".projection"] = [cell](ExperimentConfig& c, const std::string& k, const std::string& v) {
    cell(c).projection = to_bool(k, v);
  };
  h[section + ".inner_correction"] = [cell](ExperimentConfig& c, const std::string& k, const std::string& v) {
    cell(c).inner_correction = to_bool(k, v);
  };
  h[section + ".p0"] = [cell](ExperimentConfig& c, const std::string& k, const std::string& v) {
    cell(c).p0 = to_double(k, v);
  };
}

#define AHNAG_KEY(name, stmt) \
  h[name] = [](ExperimentConfig& c, [[maybe_unused]] const std::string& k, const std::string& v) { stmt; }

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = [] {
    std::map<std::string, Handler> h;
    AHNAG_KEY("experiment", {
      if (v == "synthetic_logreg") c.experiment = ExperimentKind::SyntheticLogreg;
      else if (v == "libsvm_logreg") c.experiment = ExperimentKind::LibsvmLogreg;
      else if (v == "flow_decay") c.experiment = ExperimentKind::FlowDecay;
      else if (v == "reddi") c.experiment = ExperimentKind::Reddi;
      else if (v == "unforced_oracle") c.experiment = ExperimentKind::UnforcedOracle;
      else fail(k, "unknown experiment '" + v + "'");
    });
    AHNAG_KEY("methods", c.methods = split_list(v));
    AHNAG_KEY("iterations", c.iterations = to_long(k, v));
    AHNAG_KEY("output", c.output = v);
    AHNAG_KEY("stride", c.stride = to_long(k, v));
    AHNAG_KEY("presolve_iters", c.presolve_iters = to_long(k, v));

    AHNAG_KEY("data.n", c.data.n = to_long(k, v));
    AHNAG_KEY("data.d", c.data.d = to_long(k, v));
    AHNAG_KEY("data.kappa", c.data.kappa = to_doubles(k, v));
    AHNAG_KEY("data.seed", {
      const long s = to_long(k, v);
      if (s < 0) fail(k, "seed must be >= 0");
      c.data.seed = static_cast<std::uint64_t>(s);
    });
    AHNAG_KEY("data.path", c.data.path = v);
    AHNAG_KEY("data.fit_bias", c.data.fit_bias = to_bool(k, v));

    AHNAG_KEY("adam.lr", c.adam.lr = to_doubles(k, v));
    AHNAG_KEY("adam.beta1", c.adam.beta1 = to_double(k, v));
    AHNAG_KEY("adam.beta2", c.adam.beta2 = to_double(k, v));
    AHNAG_KEY("adam.eps", c.adam.eps = to_double(k, v));
    AHNAG_KEY("adam.bias_correction", c.adam.bias_correction = to_bool(k, v));
    AHNAG_KEY("amsgrad.box", c.amsgrad_box = to_double(k, v));

    add_hnag_keys(h, "adam_hnag");
    add_hnag_keys(h, "adam_hnag_s");

    AHNAG_KEY("flow.problem", {
      if (v != "quadratic" && v != "logistic") fail(k, "expected quadratic or logistic, got '" + v + "'");
      c.flow.problem = v;
    });
    AHNAG_KEY("flow.beta", c.flow.beta = to_double(k, v));
    AHNAG_KEY("flow.gamma", c.flow.gamma = to_double(k, v));
    AHNAG_KEY("flow.tau1", c.flow.tau1 = to_double(k, v));
    AHNAG_KEY("flow.tau2", c.flow.tau2 = to_double(k, v));
    AHNAG_KEY("flow.T", c.flow.T = to_double(k, v));
    AHNAG_KEY("flow.dt", c.flow.dt = to_double(k, v));
    AHNAG_KEY("flow.p0_scale", c.flow.p0_scale = to_double(k, v));
    AHNAG_KEY("flow.stride", c.flow.stride = to_long(k, v));

    AHNAG_KEY("reddi.T", c.reddi.bench.T = to_long(k, v));
    AHNAG_KEY("reddi.eta", c.reddi.hnag.eta = to_double(k, v));
    AHNAG_KEY("reddi.beta", c.reddi.hnag.beta = to_double(k, v));
    AHNAG_KEY("reddi.gamma", c.reddi.hnag.gamma = to_double(k, v));
    AHNAG_KEY("reddi.p0", c.reddi.hnag.P0 = to_double(k, v));
    AHNAG_KEY("reddi.adam_lr", c.reddi.adam.eta = to_double(k, v));
    AHNAG_KEY("reddi.adam_beta1", c.reddi.adam.beta1 = to_double(k, v));
    AHNAG_KEY("reddi.adam_beta2", c.reddi.adam.beta2 = to_double(k, v));
    AHNAG_KEY("reddi.adam_eps", c.reddi.adam.eps = to_double(k, v));
    AHNAG_KEY("reddi.bias_correction", c.reddi.adam.bias_correction = to_bool(k, v));
    AHNAG_KEY("reddi.stride", c.reddi.stride = to_long(k, v));

    AHNAG_KEY("unforced.p0", c.unforced.p0 = to_double(k, v));
    AHNAG_KEY("unforced.L", c.unforced.L = to_double(k, v));
    AHNAG_KEY("unforced.K", c.unforced.K = to_long(k, v));
    AHNAG_KEY("unforced.stride", c.unforced.stride = to_long(k, v));
    return h;
  }();
  return table;
}

#undef AHNAG_KEY

const std::set<std::string> kSections{"data",  "adam", "amsgrad", "adam_hnag", "adam_hnag_s",
                                      "flow",  "reddi", "unforced"};

std::vector<std::string> allowed_methods(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::SyntheticLogreg:
    case ExperimentKind::LibsvmLogreg: return {"gd", "hnag", "adam", "amsgrad", "adam_hnag", "adam_hnag_s"};
    case ExperimentKind::Reddi: return {"adam", "amsgrad", "adam_hnag", "adam_hnag_s"};
    case ExperimentKind::FlowDecay: return {"adam_hnag", "adam"};
    case ExperimentKind::UnforcedOracle: return {};
  }
  return {};
}

void check_positive(const std::string& key, double v) {
  if (!(v > 0.0)) fail(key, "must be positive");
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::SyntheticLogreg: return "synthetic_logreg";
    case ExperimentKind::LibsvmLogreg: return "libsvm_logreg";
    case ExperimentKind::FlowDecay: return "flow_decay";
    case ExperimentKind::Reddi: return "reddi";
    case ExperimentKind::UnforcedOracle: return "unforced_oracle";
  }
  return "unknown";
}

void validate(const ExperimentConfig& c) {
  const auto allowed = allowed_methods(c.experiment);
  if (c.experiment != ExperimentKind::UnforcedOracle && c.methods.empty()) {
    fail("methods", "at least one method is required");
  }
  std::set<std::string> seen;
  for (const auto& m : c.methods) {
    if (std::find(allowed.begin(), allowed.end(), m) == allowed.end()) {
      fail("methods", "'" + m + "' is not available for " + to_string(c.experiment));
    }
    if (!seen.insert(m).second) fail("methods", "duplicate method '" + m + "'");
  }
  if (c.iterations < 1) fail("iterations", "must be >= 1");
  if (c.stride < 1) fail("stride", "must be >= 1");
  if (c.presolve_iters < 0) fail("presolve_iters", "must be >= 0");

  if (c.experiment == ExperimentKind::SyntheticLogreg) {
    if (c.data.path) fail("data.path", "not used by synthetic_logreg");
    if (c.data.d < 2 || c.data.n < c.data.d) fail("data.n", "need n >= d >= 2");
    for (double k : c.data.kappa) {
      if (!(k >= kMinKappa)) fail("data.kappa", "every kappa must be at least 1 + 1e-6");
    }
  }
  if (c.experiment == ExperimentKind::LibsvmLogreg) {
    if (!c.data.path) fail("data.path", "required for libsvm_logreg");
    if (!std::filesystem::exists(*c.data.path)) fail("data.path", "file not found: " + c.data.path->string());
  }
  for (const auto& [name, h] : c.hnag) {
    if (h.gamma_mode == GammaMode::Theoretical && !(h.R && *h.R > 0.0)) {
      fail(name + ".R", "theoretical gamma_mode requires R > 0");
    }
    if (h.projection && !(h.R && *h.R > 0.0)) fail(name + ".R", "projection requires R > 0");
    if (!(h.gamma >= 0.0)) fail(name + ".gamma", "must be >= 0");
    check_positive(name + ".p0", h.p0);
  }
  for (double lr : c.adam.lr) check_positive("adam.lr", lr);
  if (!(c.adam.beta1 >= 0.0 && c.adam.beta1 < 1.0)) fail("adam.beta1", "must lie in [0, 1)");
  if (!(c.adam.beta2 >= 0.0 && c.adam.beta2 < 1.0)) fail("adam.beta2", "must lie in [0, 1)");
  check_positive("adam.eps", c.adam.eps);
  if (c.amsgrad_box) check_positive("amsgrad.box", *c.amsgrad_box);

  if (!(c.flow.beta >= 0.0)) fail("flow.beta", "must be >= 0");
  if (!(c.flow.gamma >= 0.0)) fail("flow.gamma", "must be >= 0");
  check_positive("flow.tau1", c.flow.tau1);
  check_positive("flow.tau2", c.flow.tau2);
  check_positive("flow.dt", c.flow.dt);
  if (!(c.flow.T >= 0.0)) fail("flow.T", "must be >= 0");
  check_positive("flow.p0_scale", c.flow.p0_scale);
  if (c.flow.stride < 1) fail("flow.stride", "must be >= 1");

  if (c.reddi.bench.T < 1) fail("reddi.T", "must be >= 1");
  check_positive("reddi.eta", c.reddi.hnag.eta);
  check_positive("reddi.p0", c.reddi.hnag.P0);
  if (!(c.reddi.hnag.beta >= 0.0)) fail("reddi.beta", "must be >= 0");
  if (!(c.reddi.hnag.gamma >= 0.0)) fail("reddi.gamma", "must be >= 0");
  check_positive("reddi.adam_lr", c.reddi.adam.eta);
  if (!(c.reddi.adam.beta1 >= 0.0 && c.reddi.adam.beta1 < 1.0)) fail("reddi.adam_beta1", "must lie in [0, 1)");
  if (!(c.reddi.adam.beta2 >= 0.0 && c.reddi.adam.beta2 < 1.0)) fail("reddi.adam_beta2", "must lie in [0, 1)");
  check_positive("reddi.adam_eps", c.reddi.adam.eps);
  if (c.reddi.stride < 1) fail("reddi.stride", "must be >= 1");

  check_positive("unforced.L", c.unforced.L);
  if (!(c.unforced.p0 >= 0.0)) fail("unforced.p0", "must be >= 0");
  if (c.unforced.K < 1) fail("unforced.K", "must be >= 1");
  if (c.unforced.stride < 1) fail("unforced.stride", "must be >= 1");
}

namespace {

ExperimentConfig parse_impl(std::istream& in, const std::filesystem::path& base) {
  ExperimentConfig cfg;
  std::set<std::string> given;
  std::string section;
  std::string line;
  std::size_t lineno = 0;
  const auto& table = handlers();
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string text = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (text.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(text.substr(1, text.size() - 2));
      if (!kSections.count(section)) throw ConfigError(section + ": unknown section (" + where + ")");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const std::string path = section.empty() ? key : section + "." + key;
    if (key.empty()) throw ConfigError(where + ": empty key");
    const auto it = table.find(path);
    if (it == table.end()) throw ConfigError(path + ": unknown key (" + where + ")");
    if (!given.insert(path).second) throw ConfigError(path + ": duplicate key (" + where + ")");
    if (value.empty()) throw ConfigError(path + ": missing value (" + where + ")");
    it->second(cfg, path, value);
    cfg.echo.emplace_back(path, value);
  }
  if (!given.count("experiment")) throw ConfigError("experiment: required key is missing");
  if (cfg.experiment == ExperimentKind::LibsvmLogreg) {
    for (const char* k : {"data.kappa", "data.n", "data.d"}) {
      if (given.count(k)) fail(k, "inconsistent with libsvm_logreg (the file determines the data)");
    }
  }
  // Relative data paths resolve against the working directory first, then
  // against the config file's directory.
  if (cfg.data.path && cfg.data.path->is_relative() && !std::filesystem::exists(*cfg.data.path) &&
      !base.empty()) {
    const auto candidate = base / *cfg.data.path;
    if (std::filesystem::exists(candidate)) cfg.data.path = candidate;
  }
  validate(cfg);
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) { return parse_impl(in, {}); }

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_impl(in, path.parent_path());
}

std::string config_reference() {
  return R"(# top level
experiment = synthetic_logreg   # synthetic_logreg | libsvm_logreg | flow_decay | reddi | unforced_oracle
methods = gd, hnag, adam, adam_hnag, adam_hnag_s
iterations = 2000
output = out
stride = 1                      # write every stride-th trace row (plus first and last)
presolve_iters = 20000          # first-order fallback cap when Newton cannot find f*

[data]
n = 500
d = 200
kappa = 20000                   # list; synthetic_logreg only
seed = 1
path = data/colon-cancer        # libsvm_logreg only
fit_bias = true

[adam]                          # also used by amsgrad
lr = 1e-4, 1e-3, 1e-2, 5e-2, 1e-1
beta1 = 0.9
beta2 = 0.999
eps = 1e-8
bias_correction = false

[amsgrad]
box = <none>                    # half-width of the x box

[adam_hnag]                     # same keys under [adam_hnag_s]
gamma_mode = fixed              # fixed | theoretical
gamma = 0.05
R = <none>
projection = false
inner_correction = false
p0 = 1                          # P_0 = p0 * I

[flow]                          # methods: adam_hnag (Adam-HNAG flow), adam (Adam flow)
problem = quadratic             # quadratic | logistic
beta = 1
gamma = 0
tau1 = 1
tau2 = 1
T = 10
dt = 1e-3
p0_scale = 20                   # P(0) = p0_scale * L * I
stride = 10

[reddi]
T = 500000
eta = 1e-3
beta = 0.01
gamma = 0.1
p0 = 1
adam_lr = 0.01
adam_beta1 = 0.9
adam_beta2 = 0.99
adam_eps = 1e-8
bias_correction = false
stride = 100

[unforced]
p0 = 1
L = 0.5
K = 100000
stride = 100
)";
}

}  // namespace ahnag
