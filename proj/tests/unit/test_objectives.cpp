#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <memory>
#include <random>

#include "ahnag/objectives.hpp"
#include "helpers.hpp"

using namespace ahnag;

namespace {

LogisticProblem scalar_problem(double x, double y) {
  LogisticProblem p;
  p.X = Matrix::Constant(1, 1, x);
  p.y = Vector::Constant(1, y);
  p.fit_bias = false;
  return p;
}

double relative_error(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1e-12, b.norm());
}

}  // namespace

TEST_SUITE("objectives") {

TEST_CASE("logistic value at the origin is log 2") {
  std::mt19937_64 g(1);
  const auto p = testutil::random_logistic(g, 30, 4);
  CHECK(logistic_value(p, Vector::Zero(5)) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("logistic value on one sample") {
  // log(1 + e^{-10}) and log(1 + e^{10}) = 10 + log(1 + e^{-10}).
  const double small = std::log1p(std::exp(-10.0));
  CHECK(logistic_value(scalar_problem(1.0, 1.0), Vector::Constant(1, 10.0)) ==
        doctest::Approx(small).epsilon(1e-14));
  CHECK(logistic_value(scalar_problem(1.0, 1.0), Vector::Constant(1, 10.0)) ==
        doctest::Approx(4.5399e-5).epsilon(1e-4));
  CHECK(logistic_value(scalar_problem(1.0, 0.0), Vector::Constant(1, 10.0)) ==
        doctest::Approx(10.0 + small).epsilon(1e-15));
}

TEST_CASE("logistic value stays finite for large margins") {
  for (double z : {-700.0, -50.0, 0.0, 50.0, 700.0}) {
    for (double y : {0.0, 1.0}) {
      const double v = logistic_value(scalar_problem(1.0, y), Vector::Constant(1, z));
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
    }
  }
}

TEST_CASE("logistic gradient two-sample example") {
  LogisticProblem p;
  p.X = Matrix{{1.0, 0.0}, {0.0, 1.0}};
  p.y = Vector{{1.0, 0.0}};
  p.fit_bias = true;
  const Vector g = logistic_gradient(p, Vector::Zero(3));
  CHECK(g[0] == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(0.25).epsilon(1e-15));
  const LogisticObjective f(p);
  CHECK((g - testutil::fd_gradient(f, Vector::Zero(3))).norm() <= 1e-6);
}

TEST_CASE("logistic gradient vanishes when labels equal the model probabilities") {
  // Fractional labels are outside the {0,1} contract of LogisticObjective, so
  // go through the free function.
  LogisticProblem p = scalar_problem(1.0, 0.0);
  p.X = Matrix{{1.0}, {-2.0}, {0.5}};
  const Vector w = Vector::Constant(1, 0.7);
  const Vector z = p.X * w;
  p.y = (1.0 / (1.0 + (-z.array()).exp())).matrix();
  CHECK(logistic_gradient(p, w).norm() <= 1e-15);
}

TEST_CASE("separable one-sample gradient shrinks along the separator") {
  const LogisticObjective f(scalar_problem(1.0, 1.0));
  double prev = f.gradient(Vector::Constant(1, 0.0)).norm();
  for (double w = 0.5; w <= 10.0; w += 0.5) {
    const Vector x = Vector::Constant(1, w);
    const double gn = f.gradient(x).norm();
    CHECK(gn < prev);
    CHECK(std::abs(testutil::fd_gradient(f, x)[0] - f.gradient(x)[0]) <= 1e-6);
    prev = gn;
  }
}

TEST_CASE("logistic smoothness") {
  CHECK(logistic_smoothness(scalar_problem(1.0, 1.0)) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(logistic_smoothness(scalar_problem(2.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 g(3);
  const auto p = testutil::random_logistic(g, 10, 3);
  Matrix A(10, 4);
  A << p.X, Vector::Ones(10);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(A.transpose() * A);
  const double oracle = es.eigenvalues().maxCoeff() / 40.0;
  CHECK(logistic_smoothness(p) == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(LogisticObjective(p).smoothness() == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("power iteration rejects a zero matrix") {
  CHECK_THROWS_AS(power_iteration_gram(Matrix::Zero(3, 2)), std::runtime_error);
}

TEST_CASE("logistic objective validates labels") {
  auto p = scalar_problem(1.0, 0.5);
  CHECK_THROWS_AS(LogisticObjective{p}, std::invalid_argument);
}

TEST_CASE("gradient matches central differences on random points") {
  std::mt19937_64 g(21);
  const auto p = testutil::random_logistic(g, 40, 6);
  const LogisticObjective logi(p);
  const QuadraticObjective quad(testutil::uniform(g, 7, 0.1, 5.0), testutil::gaussian(g, 7));
  for (int i = 0; i < 100; ++i) {
    const Vector x = testutil::gaussian(g, 7);
    CHECK(relative_error(logi.gradient(x), testutil::fd_gradient(logi, x)) <= 1e-5);
    CHECK(relative_error(quad.gradient(x), testutil::fd_gradient(quad, x)) <= 1e-5);
  }
}

TEST_CASE("bregman identities") {
  std::mt19937_64 g(4);
  const QuadraticObjective f(Vector::Ones(3), Vector::Zero(3));
  for (int i = 0; i < 20; ++i) {
    const Vector x = testutil::gaussian(g, 3), y = testutil::gaussian(g, 3);
    CHECK(bregman(f, y, x) == doctest::Approx(0.5 * (y - x).squaredNorm()).epsilon(1e-12));
    CHECK(bregman(f, x, x) == 0.0);
  }
}

TEST_CASE("bregman sandwich and convexity") {
  std::mt19937_64 g(8);
  const auto p = testutil::random_logistic(g, 50, 5);
  const LogisticObjective logi(p);
  const QuadraticObjective quad(testutil::uniform(g, 6, 0.01, 3.0), testutil::gaussian(g, 6));
  for (const Objective* f : {static_cast<const Objective*>(&logi), static_cast<const Objective*>(&quad)}) {
    const double L = f->smoothness();
    for (int i = 0; i < 1000; ++i) {
      const Vector x = testutil::gaussian(g, 6, 2.0), y = testutil::gaussian(g, 6, 2.0);
      const double D = bregman(*f, y, x);
      const double lower = (f->gradient(x) - f->gradient(y)).squaredNorm() / (2.0 * L);
      const double upper = 0.5 * L * (x - y).squaredNorm();
      CHECK(D >= -1e-14);
      CHECK(D >= lower - 1e-12);
      CHECK(D <= upper + 1e-12);
    }
  }
}

TEST_CASE("quadratic objective") {
  const QuadraticObjective f(Vector{{1.0, 4.0}}, Vector{{1.0, -1.0}});
  CHECK(f.smoothness() == 4.0);
  CHECK(f.value(Vector{{1.0, -1.0}}) == 0.0);
  CHECK(f.value(Vector{{0.0, 0.0}}) == doctest::Approx(2.5));
  const auto opt = f.optimum_hint();
  REQUIRE(opt.x_star);
  CHECK(*opt.f_star == 0.0);
  CHECK_THROWS_AS(QuadraticObjective(Vector{{1.0, 0.0}}, Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("Newton reference optimum zeroes the gradient") {
  std::mt19937_64 g(12);
  const LogisticObjective f(testutil::random_logistic(g, 60, 4));
  const auto opt = logistic_newton_optimum(f);
  REQUIRE(opt.x_star);
  CHECK(f.gradient(*opt.x_star).norm() <= 1e-10);
  CHECK(*opt.f_star == f.value(*opt.x_star));
  // Any other point is no better.
  for (int i = 0; i < 50; ++i) {
    CHECK(f.value(*opt.x_star + testutil::gaussian(g, 5, 0.1)) >= *opt.f_star);
  }
}

TEST_CASE("Newton reference refuses separable data") {
  LogisticProblem p;
  p.X = Matrix{{1.0}, {2.0}, {-1.0}, {-3.0}};
  p.y = Vector{{1.0, 1.0, 0.0, 0.0}};
  const LogisticObjective f(p);
  CHECK_THROWS_AS(logistic_newton_optimum(f), std::runtime_error);
}

TEST_CASE("anchored objective forwards and reports the optimum") {
  auto base = std::make_shared<QuadraticObjective>(Vector::Ones(2), Vector::Zero(2));
  AnchoredObjective a(base, {Vector::Zero(2), 0.0, "test"});
  CHECK(a.value(Vector::Ones(2)) == 1.0);
  CHECK(a.optimum_hint().provenance == "test");
  CHECK_THROWS_AS(AnchoredObjective(base, {Vector::Zero(3), 0.0, ""}), std::invalid_argument);
}

}
