#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ahnag/online.hpp"

using namespace ahnag;

TEST_SUITE("online") {

TEST_CASE("loss sequence") {
  const auto a = reddi_loss(1, 0.5);
  CHECK(a.value == 505.0);
  CHECK(a.gradient == 1010.0);
  const auto b = reddi_loss(2, 0.5);
  CHECK(b.value == -5.0);
  CHECK(b.gradient == -10.0);
  CHECK(reddi_loss(102, 1.0).gradient == 1010.0);
  CHECK(reddi_loss(101, 1.0).gradient == -10.0);
  CHECK_THROWS_AS(reddi_loss(0, 0.0), std::invalid_argument);
}

TEST_CASE("bench validation") {
  OnlineBench b;
  CHECK_NOTHROW(b.validate());
  b.base = -11.0;  // 1010 - 1100 < 0
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
  b = OnlineBench{};
  b.hi = b.lo;
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
}

TEST_CASE("regret over one period") {
  const OnlineBench b;
  std::vector<double> at_lo, at_hi;
  for (long t = 1; t <= 101; ++t) {
    at_lo.push_back(reddi_loss(t, -1.0).value);
    at_hi.push_back(reddi_loss(t, 1.0).value);
  }
  CHECK(regret(at_lo, b).R.back() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(regret(at_hi, b).R.back() == doctest::Approx(20.0));
  CHECK(regret(at_hi, b).R_over_t.back() == doctest::Approx(20.0 / 101));
  // One round: 1010 x_1 - min(-1010, 1010).
  for (double x : {-1.0, -0.3, 0.0, 0.8}) {
    CHECK(regret({reddi_loss(1, x).value}, b).R[0] == doctest::Approx(1010.0 * x + 1010.0));
  }
}

TEST_CASE("regret against a brute-force comparator") {
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const OnlineBench b;
  std::vector<double> losses;
  double coef = 0.0, played = 0.0;
  for (long t = 1; t <= 400; ++t) {
    const double x = u(g);
    losses.push_back(reddi_loss(t, x).value);
    played += losses.back();
    coef += b.coefficient(t);
    double best = 1e300;
    for (int i = 0; i <= 200; ++i) best = std::min(best, coef * (-1.0 + 0.01 * i));
    CHECK(regret(losses, b).R.back() == doctest::Approx(played - best).epsilon(1e-12));
  }
}

TEST_CASE("online Adam-HNAG step") {
  OnlineParams p;
  p.eta = 0.1;
  const OnlineHnagState s0 = online_init(p);
  CHECK(s0.alpha == doctest::Approx(0.1));
  const OnlineHnagState s1 = online_step_adam_hnag(s0, p);
  CHECK(s1.t == 1);
  // Lagged: alpha_1 = eta sqrt(P_0).
  CHECK(s1.alpha == doctest::Approx(0.1));
  const double y1 = std::clamp(0.0 - 0.1 * 1010.0, -1.0, 1.0);
  CHECK(s1.y == y1);
  CHECK(s1.P == doctest::Approx(1.0 / 1.1 + 0.1 * 0.1 / 1.1 * 1010.0 * 1010.0));
  const double x1 = (0.0 + 0.1 * y1 - 0.1 * 0.01 * 1010.0) / 1.1;
  CHECK(s1.x == doctest::Approx(std::clamp(x1, -1.0, 1.0)));
  const OnlineHnagState s2 = online_step_adam_hnag(s1, p);
  CHECK(s2.alpha == doctest::Approx(0.1 * std::sqrt(s1.P)));

  p.delta = 0;
  const OnlineHnagState t1 = online_step_adam_hnag(online_init(p), p);
  CHECK(t1.alpha == doctest::Approx(0.1 * std::sqrt(t1.P)));
}

TEST_CASE("zero gradient skips the update") {
  OnlineBench b;
  b.spike = 1.0;
  b.base = 0.0;
  const OnlineParams p;
  OnlineHnagState s = online_step_adam_hnag(online_init(p, 0.25), p, b);
  const OnlineHnagState n = online_step_adam_hnag(s, p, b);
  CHECK(n.t == s.t + 1);
  CHECK(n.x == s.x);
  CHECK(n.y == s.y);
  CHECK(n.P == s.P);
  CHECK(n.alpha == s.alpha);
}

TEST_CASE("online Adam first step") {
  const OnlineAdamParams p;
  const OnlineAdamState s = online_step_adam(OnlineAdamState{}, p);
  const double m = 0.1 * 1010.0, v = 0.01 * 1010.0 * 1010.0;
  CHECK(s.m == doctest::Approx(m));
  CHECK(s.v == doctest::Approx(v));
  CHECK(s.x == doctest::Approx(-0.01 * m / (std::sqrt(v) + 1e-8)));
}

TEST_CASE("iterates stay in the domain") {
  std::mt19937_64 g(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  OnlineBench b;
  b.T = 3000;
  for (int trial = 0; trial < 12; ++trial) {
    OnlineParams p;
    p.eta = std::pow(10.0, -3 + 3 * u(g));
    p.beta = u(g);
    p.gamma = u(g);
    p.delta = trial % 2;
    for (double x : run_online_adam_hnag(b, p).x) CHECK(std::abs(x) <= 1.0);
    OnlineAdamParams q;
    q.eta = std::pow(10.0, -3 + 3 * u(g));
    q.amsgrad = trial % 3 == 0;
    for (double x : run_online_adam(b, q).x) CHECK(std::abs(x) <= 1.0);
  }
}

TEST_CASE("Adam drifts to the wrong endpoint while AMSGrad does not") {
  OnlineBench b;
  b.T = 50000;
  OnlineAdamParams adam;
  const auto ta = run_online_adam(b, adam);
  adam.amsgrad = true;
  const auto tm = run_online_adam(b, adam);
  CHECK(ta.tail_mean(0.1) > 0.5);
  CHECK(tm.tail_mean(0.1) < 0.0);
  CHECK(ta.regret.R_over_t.back() > tm.regret.R_over_t.back());
}

TEST_CASE("tail mean and CSV") {
  OnlineTrace tr;
  tr.method = "adam";
  tr.x = {1.0, 2.0, 3.0, 4.0};
  tr.loss = {0.0, 0.0, 0.0, 0.0};
  tr.regret = regret(tr.loss);
  CHECK(tr.tail_mean(0.5) == 3.5);
  CHECK(tr.tail_mean(0.01) == 4.0);
  std::ostringstream out;
  write_online_csv(tr, out, 2);
  CHECK(out.str().rfind("t,x,loss,R_t,R_t_over_t,method\n1,", 0) == 0);
  int lines = 0;
  std::istringstream in(out.str());
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 4);  // header, t = 1, 2, 4
  CHECK_THROWS_AS(write_online_csv(tr, out, 0), std::invalid_argument);
}

}
