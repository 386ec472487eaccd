#include "ahnag/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string_view>
#include <vector>

#include "ahnag/format.hpp"
#include "ahnag/rng.hpp"

namespace ahnag {

namespace {

Matrix gaussian(Index rows, Index cols, CounterRng& rng) {
  Matrix G(rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) G(i, j) = rng.normal();
  return G;
}

// Thin orthonormal factor with the sign convention diag(R) > 0, which makes
// Q a deterministic function of G.
Matrix orthonormal_factor(const Matrix& G) {
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(G.rows(), G.cols());
  const Matrix R = qr.matrixQR().topRows(G.cols()).triangularView<Eigen::Upper>();
  for (Index j = 0; j < G.cols(); ++j) {
    if (R(j, j) < 0) Q.col(j) *= -1.0;
  }
  return Q;
}

struct RawRow {
  double label;
  std::vector<std::pair<Index, double>> entries;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(std::string_view tok, std::size_t line, const char* what) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(std::string("malformed ") + what + " '" + std::string(tok) + "'", line);
  }
  return v;
}

// Maps the distinct raw labels onto {0, 1}.
double map_label(double raw, const std::set<double>& seen, std::size_t line) {
  const bool pm1 = seen.size() <= 2 && std::all_of(seen.begin(), seen.end(), [](double v) {
                     return v == -1.0 || v == 1.0;
                   });
  const bool one_two = seen.size() <= 2 && std::all_of(seen.begin(), seen.end(), [](double v) {
                         return v == 1.0 || v == 2.0;
                       });
  const bool zero_one = seen.size() <= 2 && std::all_of(seen.begin(), seen.end(), [](double v) {
                          return v == 0.0 || v == 1.0;
                        });
  if (zero_one) return raw;
  if (pm1) return raw > 0 ? 1.0 : 0.0;
  if (one_two) return raw == 2.0 ? 1.0 : 0.0;
  throw ParseError("labels are not binary ({-1,+1}, {0,1} or {1,2})", line);
}

}  // namespace

Dataset synth_dataset(Index n, Index d, double kappa, std::uint64_t seed) {
  if (!(kappa >= kMinKappa) || !std::isfinite(kappa)) {
    throw std::invalid_argument("synth_dataset: kappa must be finite and at least 1 + 1e-6");
  }
  if (d < 2 || n < d) throw std::invalid_argument("synth_dataset: need n >= d >= 2");

  CounterRng rng(seed);
  const Matrix U = orthonormal_factor(gaussian(n, d, rng));
  const Matrix V = orthonormal_factor(gaussian(d, d, rng));

  Vector s(d);
  const double log_kappa = std::log(kappa);
  for (Index j = 0; j < d; ++j) {
    s[j] = std::exp(-log_kappa * static_cast<double>(j) / static_cast<double>(d - 1));
  }
  s[0] = 1.0;
  s[d - 1] = 1.0 / kappa;

  Dataset out;
  out.X = U * s.asDiagonal() * V.transpose();
  out.kappa = kappa;
  out.source = DataSource::Synthetic;

  Vector w(d);
  for (Index j = 0; j < d; ++j) w[j] = rng.normal();
  w.normalize();
  const Vector margin = out.X * w;
  out.y.resize(n);
  for (Index i = 0; i < n; ++i) out.y[i] = (margin[i] + 0.1 * rng.normal() > 0.0) ? 1.0 : 0.0;
  return out;
}

Dataset parse_libsvm(std::istream& in, std::optional<Index> dim) {
  std::vector<RawRow> rows;
  std::vector<std::size_t> row_lines;
  std::set<double> labels;
  Index max_index = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;

    RawRow row{};
    bool have_label = false;
    Index last = 0;
    std::size_t pos = 0;
    while (pos < body.size()) {
      const auto start = body.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      auto end = body.find_first_of(" \t", start);
      if (end == std::string_view::npos) end = body.size();
      const std::string_view tok = body.substr(start, end - start);
      pos = end;
      if (!have_label) {
        row.label = parse_real(tok, lineno, "label");
        if (row.label != std::floor(row.label)) throw ParseError("non-integer label", lineno);
        have_label = true;
        continue;
      }
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("expected idx:value, got '" + std::string(tok) + "'", lineno);
      }
      long long idx = 0;
      const auto idx_tok = tok.substr(0, colon);
      const auto r = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
      if (r.ec != std::errc() || r.ptr != idx_tok.data() + idx_tok.size()) {
        throw ParseError("malformed index '" + std::string(idx_tok) + "'", lineno);
      }
      if (idx <= 0) throw ParseError("index must be >= 1", lineno);
      if (idx <= last) throw ParseError("indices must be strictly increasing", lineno);
      last = static_cast<Index>(idx);
      row.entries.emplace_back(last, parse_real(tok.substr(colon + 1), lineno, "value"));
    }
    max_index = std::max(max_index, last);
    labels.insert(row.label);
    if (labels.size() > 2) throw ParseError("more than two distinct labels", lineno);
    rows.push_back(std::move(row));
    row_lines.push_back(lineno);
  }
  if (rows.empty()) throw ParseError("no data rows", 0);

  const Index d = dim.value_or(max_index);
  if (d < 1) throw ParseError("dataset has no features", 0);
  if (d < max_index) {
    throw ParseError("feature index " + std::to_string(max_index) + " exceeds dimension " +
                         std::to_string(d),
                     0);
  }

  Dataset out;
  out.source = DataSource::File;
  out.X = Matrix::Zero(static_cast<Index>(rows.size()), d);
  out.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Index>(i);
    out.y[r] = map_label(rows[i].label, labels, row_lines[i]);
    for (const auto& [j, v] : rows[i].entries) out.X(r, j - 1) = v;
  }
  return out;
}

Dataset parse_libsvm(const std::filesystem::path& path, std::optional<Index> dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open LIBSVM file " + path.string());
  return parse_libsvm(in, dim);
}

void write_libsvm(const Dataset& data, std::ostream& out) {
  for (Index i = 0; i < data.n(); ++i) {
    out << (data.y[i] > 0.5 ? "+1" : "-1");
    for (Index j = 0; j < data.d(); ++j) {
      if (data.X(i, j) != 0.0) out << ' ' << (j + 1) << ':' << format_double(data.X(i, j));
    }
    out << '\n';
  }
}

void write_libsvm(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write LIBSVM file " + path.string());
  write_libsvm(data, out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace ahnag
