#include <doctest.h>

#include <Eigen/SVD>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ahnag/datasets.hpp"
#include "helpers.hpp"

using namespace ahnag;

namespace {

double svd_condition(const Matrix& X) {
  const Eigen::JacobiSVD<Matrix> svd(X);
  const auto& s = svd.singularValues();
  return s.maxCoeff() / s.minCoeff();
}

Dataset parse(const std::string& text, std::optional<Index> dim = std::nullopt) {
  std::istringstream in(text);
  return parse_libsvm(in, dim);
}

}  // namespace

TEST_SUITE("datasets") {

TEST_CASE("synthetic condition number matches kappa") {
  const Dataset ds = synth_dataset(500, 200, 20000.0, 1);
  CHECK(ds.n() == 500);
  CHECK(ds.d() == 200);
  CHECK(svd_condition(ds.X) == doctest::Approx(20000.0).epsilon(1e-6));
  REQUIRE(ds.kappa);
  CHECK(*ds.kappa == 20000.0);
}

TEST_CASE("condition number for several kappa and shapes") {
  for (double kappa : {2.0, 30.0, 1e3, 5e4}) {
    for (auto [n, d] : {std::pair<Index, Index>{40, 10}, {25, 25}, {100, 3}}) {
      const Dataset ds = synth_dataset(n, d, kappa, 9);
      CHECK(svd_condition(ds.X) == doctest::Approx(kappa).epsilon(1e-6));
    }
  }
}

TEST_CASE("synthetic arguments are validated") {
  CHECK_THROWS_AS(synth_dataset(50, 10, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(synth_dataset(50, 10, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(synth_dataset(5, 10, 10.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(synth_dataset(50, 10, 1.0 + 1e-9, 1), std::invalid_argument);
  CHECK(svd_condition(synth_dataset(50, 10, 2.0, 1).X) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("synthetic data is deterministic per seed") {
  const Dataset a = synth_dataset(60, 8, 100.0, 3);
  const Dataset b = synth_dataset(60, 8, 100.0, 3);
  const Dataset c = synth_dataset(60, 8, 100.0, 4);
  CHECK(a.X == b.X);
  CHECK(a.y == b.y);
  CHECK(a.X != c.X);
}

TEST_CASE("synthetic labels contain both classes") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Dataset ds = synth_dataset(50, 5, 1000.0, seed);
    const double ones = ds.y.sum();
    CHECK(ones > 0.0);
    CHECK(ones < 50.0);
    CHECK(((ds.y.array() == 0.0) || (ds.y.array() == 1.0)).all());
  }
}

TEST_CASE("parse one line") {
  const Dataset ds = parse("1 3:0.5 7:-2\n-1 1:1\n");
  CHECK(ds.n() == 2);
  CHECK(ds.d() == 7);
  CHECK(ds.y[0] == 1.0);
  CHECK(ds.y[1] == 0.0);
  CHECK(ds.X(0, 2) == 0.5);
  CHECK(ds.X(0, 6) == -2.0);
  CHECK(ds.X.row(0).cwiseAbs().sum() == 2.5);
  CHECK(ds.source == DataSource::File);
}

TEST_CASE("parse comments, blank lines and label encodings") {
  const Dataset a = parse("# header\n\n+1 1:2 # trailing\n-1 2:3\n");
  CHECK(a.n() == 2);
  CHECK(a.y == Vector{{1.0, 0.0}});
  const Dataset b = parse("2 1:1\n1 1:2\n");
  CHECK(b.y == Vector{{1.0, 0.0}});
  const Dataset c = parse("0 1:1\n1 1:2\n");
  CHECK(c.y == Vector{{0.0, 1.0}});
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("# only a comment\n"), ParseError);
  try {
    parse("1 1:1\n1 2:x\n");
    FAIL("expected a throw");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse("1 0:1\n"), ParseError);
  CHECK_THROWS_AS(parse("1 3:1 2:1\n"), ParseError);
  CHECK_THROWS_AS(parse("1 1:1\n2 1:1\n3 1:1\n"), ParseError);
  CHECK_THROWS_AS(parse("0.5 1:1\n"), ParseError);
  CHECK_THROWS_AS(parse("1 1:1 5:2\n", Index{3}), ParseError);
}

TEST_CASE("dimension override pads columns") {
  const Dataset ds = parse("1 2:1\n-1 1:1\n", Index{5});
  CHECK(ds.d() == 5);
}

TEST_CASE("LIBSVM round trip on random sparse data") {
  std::mt19937_64 g(17);
  std::bernoulli_distribution keep(0.3);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset ds;
    const Index n = 5 + trial, d = 3 + trial % 7;
    ds.X = Matrix::Zero(n, d);
    ds.y = Vector(n);
    for (Index i = 0; i < n; ++i) {
      ds.y[i] = i % 2;
      for (Index j = 0; j < d; ++j) {
        if (keep(g)) ds.X(i, j) = testutil::gaussian(g, 1, std::pow(10.0, trial % 5 - 2))[0];
      }
    }
    ds.X(0, d - 1) = 1.0;  // fixes the column count
    std::stringstream buf;
    write_libsvm(ds, buf);
    const Dataset back = parse_libsvm(buf);
    CHECK(back.X == ds.X);
    CHECK(back.y == ds.y);
  }
}

TEST_CASE("file round trip and missing file") {
  const auto path = std::filesystem::temp_directory_path() / "ahnag_unit_roundtrip.svm";
  const Dataset ds = synth_dataset(30, 4, 50.0, 2);
  write_libsvm(ds, path);
  const Dataset back = parse_libsvm(path);
  CHECK(back.X == ds.X);
  CHECK(back.y == ds.y);
  std::filesystem::remove(path);
  CHECK_THROWS(parse_libsvm(std::filesystem::path("/nonexistent/ahnag.svm")));
}

}
