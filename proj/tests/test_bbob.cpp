#include <cmath>

#include "doctest.h"
#include "estrace/bbob.hpp"
#include "estrace/errors.hpp"
#include "estrace/rng.hpp"
#include "oracles/bbob_oracle.hpp"

using namespace estrace;

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("every function attains f_opt at x_opt") {
  for (int fid = 1; fid <= 24; ++fid)
    for (int dim : {2, 5, 10}) {
      auto p = bbob::make_problem(fid, dim, 1);
      CAPTURE(fid);
      CHECK(p.evaluate(p.x_opt()) == doctest::Approx(p.f_opt()).epsilon(1e-12));
      CHECK(p.x_opt().cwiseAbs().maxCoeff() <= 5.0);
      CHECK(std::abs(p.f_opt()) <= 1000.0);
    }
}

TEST_CASE("f_opt is a lower bound on random points") {
  Rng rng(7);
  for (int fid = 1; fid <= 24; ++fid) {
    auto p = bbob::make_problem(fid, 5, 3);
    int below = 0;
    for (int i = 0; i < 10000; ++i) {
      Vector x(5);
      for (int k = 0; k < 5; ++k) x[k] = -5.0 + 10.0 * rng.uniform();
      if (p.value(x) < p.f_opt()) ++below;
    }
    CAPTURE(fid);
    CHECK(below == 0);
  }
}

TEST_CASE("sphere is the squared distance to the optimum") {
  auto p = bbob::make_problem(1, 5, 0);
  Vector e = Vector::Zero(5);
  e[0] = 1.0;
  CHECK(p.evaluate(p.x_opt() + e) - p.f_opt() == doctest::Approx(1.0).epsilon(1e-12));
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Vector x = rng.normal_vector(5) * 3.0;
    const double expected = (x - p.x_opt()).squaredNorm();
    CHECK(std::abs((p.value(x) - p.f_opt()) - expected) <= 1e-12 * std::max(1.0, expected) + 1e-12 * std::abs(p.f_opt()));
  }
}

TEST_CASE("ellipsoid conditioning matches the scalar formula without oscillation") {
  auto p = bbob::make_problem(2, 5, 4, {.oscillation = false});
  const auto xopt = to_std(p.x_opt());
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = p.x_opt() + rng.normal_vector(5);
    const double expected = oracle::ellipsoid(to_std(x), xopt);
    CHECK(p.value(x) - p.f_opt() == doctest::Approx(expected).epsilon(1e-10));
  }
  double previous = 0.0;
  for (int i = 0; i < 5; ++i) {
    Vector x = p.x_opt();
    x[i] += 1.0;
    const double v = p.value(x) - p.f_opt();
    CHECK(v == doctest::Approx(std::pow(10.0, 6.0 * i / 4.0)).epsilon(1e-10));
    if (i > 0) CHECK(v / previous == doctest::Approx(std::pow(10.0, 1.5)).epsilon(1e-10));
    previous = v;
  }
}

TEST_CASE("linear slope is linear inside the unclipped region") {
  auto p = bbob::make_problem(5, 5, 2);
  const auto xopt = to_std(p.x_opt());
  Vector x = Vector::Zero(5);
  for (std::size_t i = 0; i < 5; ++i) {
    Vector y = x;
    y[static_cast<Eigen::Index>(i)] += 0.7;
    CHECK(p.value(y) - p.value(x) == doctest::Approx(0.7 * oracle::slope_gradient(xopt, i)).epsilon(1e-10));
  }
}

TEST_CASE("instances are deterministic and keyed by the seed") {
  auto a = bbob::make_problem(15, 5, 9);
  auto b = bbob::make_problem(15, 5, 9);
  auto c = bbob::make_problem(15, 5, 10);
  Rng rng(1);
  const Vector x = rng.normal_vector(5);
  CHECK(a.value(x) == b.value(x));
  CHECK(a.x_opt() == b.x_opt());
  CHECK(a.x_opt() != c.x_opt());
}

TEST_CASE("evaluation counting and contract checks") {
  auto p = bbob::make_problem(3, 4, 1);
  p.evaluate(Vector::Zero(4));
  p.evaluate(Vector::Zero(4));
  (void)p.value(Vector::Zero(4));
  CHECK(p.evaluations() == 2);
  CHECK_THROWS_AS(p.evaluate(Vector::Zero(3)), ContractViolation);
  Vector bad = Vector::Zero(4);
  bad[1] = std::nan("");
  CHECK_THROWS_AS(p.evaluate(bad), ContractViolation);
  CHECK_THROWS_AS(bbob::make_problem(0, 5, 1), ConfigError);
  CHECK_THROWS_AS(bbob::make_problem(25, 5, 1), ConfigError);
  CHECK_THROWS_AS(bbob::make_problem(1, 1, 1), ConfigError);
}

TEST_CASE("rotations are orthogonal with a positive R diagonal") {
  const Matrix q = bbob::random_rotation(6, 42);
  CHECK((q.transpose() * q - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("default groups") {
  CHECK(bbob::default_group(1) == 1);
  CHECK(bbob::default_group(5) == 1);
  CHECK(bbob::default_group(6) == 2);
  CHECK(bbob::default_group(14) == 3);
  CHECK(bbob::default_group(19) == 4);
  CHECK(bbob::default_group(24) == 5);
}
