#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ahnag/format.hpp"
#include "ahnag/numkit.hpp"
#include "ahnag/rng.hpp"
#include "helpers.hpp"

using namespace ahnag;

TEST_SUITE("numkit") {

TEST_CASE("weighted_sq_norm examples") {
  CHECK(weighted_sq_norm(Vector::Ones(2), DiagPrecond(Vector{{2.0, 3.0}})) == 5.0);
  CHECK(weighted_sq_norm(Vector::Zero(7), DiagPrecond(Vector::LinSpaced(7, 0.5, 3.0))) == 0.0);
  CHECK(weighted_sq_norm(Vector{{1.0, 0.0}}, DiagPrecond::Identity(2)) == 1.0);
}

TEST_CASE("inverse_apply examples") {
  const Vector r = inverse_apply(DiagPrecond(Vector{{2.0, 4.0}}), Vector{{2.0, 4.0}});
  CHECK(r[0] == 1.0);
  CHECK(r[1] == 1.0);
  const Vector v{{-1.5, 2.0, 7.0}};
  CHECK(inverse_apply(DiagPrecond::Identity(3), v) == v);
  CHECK(inverse_apply(DiagPrecond(Vector{{0.5}}), Vector{{3.0}})[0] == 6.0);
}

TEST_CASE("inf_norm examples") {
  CHECK(inf_norm(Vector{{-3.0, 2.0}}) == 3.0);
  CHECK(inf_norm(Vector::Zero(4)) == 0.0);
  CHECK(inf_norm(Vector{{1e-9, -1e-9}}) == 1e-9);
  CHECK_THROWS_AS(inf_norm(Vector()), std::invalid_argument);
}

TEST_CASE("floor clamps small and nonpositive entries") {
  const DiagPrecond P(Vector{{0.0, -3.0, 1e-20, 2.0}});
  CHECK(P[0] == DiagPrecond::kFloor);
  CHECK(P[1] == DiagPrecond::kFloor);
  CHECK(P[2] == DiagPrecond::kFloor);
  CHECK(P[3] == 2.0);
  CHECK_THROWS_AS(DiagPrecond(Vector{{1.0, std::numeric_limits<double>::quiet_NaN()}}), std::invalid_argument);
  CHECK_THROWS_AS(DiagPrecond(Vector{{std::numeric_limits<double>::infinity()}}), std::invalid_argument);
}

TEST_CASE("dimension mismatch names the operation") {
  try {
    weighted_sq_norm(Vector::Ones(3), DiagPrecond::Identity(2));
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
}

TEST_CASE("norm identities on random instances") {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 500; ++trial) {
    const Index d = 1 + static_cast<Index>(trial % 17);
    const Vector v = testutil::gaussian(g, d);
    const Vector w = testutil::uniform(g, d, 1e-3, 1e3);
    const DiagPrecond W(w);

    // Positivity, with equality only at zero.
    CHECK(weighted_sq_norm(v, W) > 0.0);

    // sum w_i^2 (v_i / w_i)^2 = sum v_i^2
    const double lhs = weighted_sq_norm(inverse_apply(W, v), DiagPrecond(w.array().square().matrix()));
    CHECK(std::abs(lhs - v.squaredNorm()) <= 1e-12 * v.squaredNorm());

    // w o inverse_apply(w, v) = v
    const Vector back = w.cwiseProduct(inverse_apply(W, v));
    CHECK((back - v).norm() <= 1e-14 * v.norm() * 4);

    // Inverse-metric norms against explicit loops.
    double s1 = 0.0, s2 = 0.0;
    for (Index i = 0; i < d; ++i) {
      s1 += v[i] * v[i] / w[i];
      s2 += v[i] * v[i] / (w[i] * w[i]);
    }
    CHECK(std::abs(inverse_weighted_sq_norm(v, W, 1) - s1) <= 1e-12 * s1);
    CHECK(std::abs(inverse_weighted_sq_norm(v, W, 2) - s2) <= 1e-12 * s2);
    CHECK(std::abs(weighted_sq_norm(v, W.inverse()) - s1) <= 1e-12 * s1);
    CHECK(std::abs(weighted_sq_norm(v, W.squared()) - (w.cwiseProduct(v)).squaredNorm()) <=
          1e-12 * (w.cwiseProduct(v)).squaredNorm());
  }
}

TEST_CASE("counter rng is deterministic and roughly standard normal") {
  CounterRng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  CounterRng r(7);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 g(5);
  for (int i = 0; i < 1000; ++i) {
    const double x = testutil::gaussian(g, 1)[0] * std::pow(10.0, (i % 40) - 20);
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(0.5) == "0.5");
}

}
