#pragma once

#include <random>

#include "ahnag/numkit.hpp"
#include "ahnag/objectives.hpp"

namespace testutil {

using ahnag::Index;
using ahnag::Matrix;
using ahnag::Vector;

inline Vector gaussian(std::mt19937_64& g, Index n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = nd(g);
  return v;
}

inline Vector uniform(std::mt19937_64& g, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> ud(lo, hi);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = ud(g);
  return v;
}

/// Gaussian design with labels from a noisy random separator. Enough noise
/// keeps the data non-separable so a finite minimizer exists.
inline ahnag::LogisticProblem random_logistic(std::mt19937_64& g, Index n, Index d, double noise = 1.0) {
  ahnag::LogisticProblem p;
  p.X = Matrix(n, d);
  for (Index j = 0; j < d; ++j) p.X.col(j) = gaussian(g, n);
  const Vector w = gaussian(g, d);
  const Vector z = p.X * w + gaussian(g, n, noise * std::sqrt(static_cast<double>(d)));
  p.y = (z.array() > 0.0).cast<double>().matrix();
  p.fit_bias = true;
  return p;
}

/// Central differences with step h.
inline Vector fd_gradient(const ahnag::Objective& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f.value(a) - f.value(b)) / (2.0 * h);
  }
  return g;
}

}  // namespace testutil
