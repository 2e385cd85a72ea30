#include <doctest.h>

#include "oracles.hpp"
#include "saddle/orbit.hpp"

using namespace saddle;

namespace {

MapFamily perturbed(double eps) {
  Perturbation q;
  q.b = 1.0;
  return MapFamily::perturbed(0.1, q, eps);
}

Point on_circle(double p0, double theta) { return make_point(p0, std::polar(1.0, theta)); }

}  // namespace

TEST_CASE("apply evaluates the family formula") {
  const Point fixed = saddle::apply(MapFamily::product(0.0), make_point(0.0, 1.0));
  CHECK(fixed(0) == cplx(0.0, 0.0));
  CHECK(fixed(1) == cplx(1.0, 0.0));

  const double p0 = oracle::p0(0.1);
  const Point y = saddle::apply(MapFamily::product(0.1), make_point(p0, cplx(0.0, 1.0)));
  CHECK(std::abs(y(0) - p0) < 1e-15);
  CHECK(std::abs(y(1) - cplx(-1.0, 0.0)) < 1e-15);

  const Point p = make_point(cplx(0.3, -0.2), std::polar(1.0, 0.7));
  CHECK((saddle::apply(perturbed(0.0), p) - saddle::apply(MapFamily::product(0.1), p)).norm() < 1e-12);

  Perturbation q{0.5, 1.0, -0.25, 2.0};
  const MapFamily f = MapFamily::perturbed(cplx(0.1, 0.02), q, 0.01);
  const cplx z = p(0), w = p(1);
  const cplx expected = z * z + f.c + 0.01 * (q.a * z + q.b * w + q.dd * z * w + q.e * w * w);
  CHECK(std::abs(saddle::apply(f, p)(0) - expected) < 1e-15);
  CHECK(std::abs(saddle::apply(f, p)(1) - w * w) < 1e-15);
}

TEST_CASE("differential") {
  const double p0 = oracle::p0(0.1);
  const cplx w = std::polar(1.0, 1.1);
  const Differential2 D = differential(MapFamily::product(0.1), make_point(p0, w));
  CHECK(std::abs(D.jacobian(0, 0) - 2.0 * p0) < 1e-15);
  CHECK(std::abs(D.jacobian(0, 1)) == 0.0);
  CHECK(std::abs(D.jacobian(1, 0)) == 0.0);
  CHECK(std::abs(D.jacobian(1, 1)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(D.determinant - D.jacobian(0, 0) * D.jacobian(1, 1)) < 1e-15);

  CHECK(std::abs(differential(MapFamily::product(0.1), make_point(0.0, w)).jacobian(0, 0)) == 0.0);

  const Point p = make_point(cplx(0.1, 0.05), std::polar(1.0, -0.4));
  CHECK((differential(perturbed(0.0), p).jacobian - differential(MapFamily::product(0.1), p).jacobian).norm() <
        1e-12);

  // Finite-difference check of the perturbed Jacobian.
  const MapFamily f = perturbed(0.05);
  const double h = 1e-6;
  const Matrix2c J = differential(f, p).jacobian;
  for (int col = 0; col < 2; ++col) {
    Point dp = Point::Zero();
    dp(col) = h;
    const Point column = (saddle::apply(f, p + dp) - saddle::apply(f, p - dp)) / (2.0 * h);
    CHECK((column - J.col(col)).norm() < 1e-8);
  }
}

TEST_CASE("base degree") {
  const Point p = make_point(0.1, std::polar(1.0, 0.3));
  CHECK(std::abs(saddle::apply(MapFamily::product(0.1, 3), p)(1) - std::polar(1.0, 0.9)) < 1e-15);
  CHECK(std::abs(differential(MapFamily::product(0.1, 3), p).jacobian(1, 1)) == doctest::Approx(3.0));
  CHECK_THROWS_AS(validate(MapFamily::product(0.1, 1)), Error);
  MapFamily bad = perturbed(0.001);
  bad.base_degree = 3;
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("attracting fixed point") {
  CHECK(std::abs(attracting_fixed_point(0.1) - 0.1127016654) < 1e-10);
  CHECK(std::abs(attracting_fixed_point(0.1) - oracle::p0(0.1)) < 1e-15);
  CHECK(std::abs(attracting_fixed_point_unchecked(0.0)) == 0.0);
  try {
    attracting_fixed_point(0.0);
    FAIL("expected Superattracting");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Superattracting);
  }
  try {
    attracting_fixed_point(0.3);
    FAIL("expected NotAttracting");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAttracting);
  }
  const cplx c(0.05, 0.1);
  const cplx p = attracting_fixed_point(c);
  CHECK(std::abs(p * p + c - p) < 1e-14);
  CHECK(std::abs(2.0 * p) < 1.0);
}

TEST_CASE("stable and unstable norms") {
  const BasicSetModel prod(MapFamily::product(0.1));
  const Point x = on_circle(oracle::p0(0.1), 0.9);
  const DerivativeNorms N = stable_unstable_norms(prod, x, 5);
  CHECK(N.stable() == doctest::Approx(std::pow(0.2254033308, 5)).epsilon(1e-8));
  CHECK(N.unstable() == doctest::Approx(32.0).epsilon(1e-12));
  const DerivativeNorms zero = stable_unstable_norms(prod, x, 0);
  CHECK(zero.stable() == 1.0);
  CHECK(zero.unstable() == 1.0);
  CHECK_THROWS_AS(stable_unstable_norms(prod, make_point(0.6, 1.0), 3), Error);

  // Perturbed norms approach the product values linearly in eps.
  double previous = 0.0;
  for (double eps : {2e-3, 1e-3, 5e-4}) {
    const BasicSetModel bs(perturbed(eps));
    SolenoidPoint sp;
    sp.theta = 0.9;
    sp.word.assign(24, 1);
    const DerivativeNorms P = stable_unstable_norms(bs, realize(bs, sp), 5);
    CHECK(P.stable() / N.stable() == doctest::Approx(1.0).epsilon(0.05));
    CHECK(P.unstable() / N.unstable() == doctest::Approx(1.0).epsilon(0.05));
    const double gap = std::abs(P.log_stable - N.log_stable) + std::abs(P.log_unstable - N.log_unstable);
    if (previous > 0.0) CHECK(gap / previous == doctest::Approx(0.5).epsilon(0.2));
    previous = gap;
  }
}

TEST_CASE("chain rule of the norms") {
  const BasicSetModel prod(MapFamily::product(0.1));
  const Point x = on_circle(oracle::p0(0.1), 2.0);
  const DerivativeNorms whole = stable_unstable_norms(prod, x, 9);
  const DerivativeNorms first = stable_unstable_norms(prod, x, 4);
  Point y = x;
  for (int i = 0; i < 4; ++i) y = saddle::apply(prod.map(), y);
  const DerivativeNorms second = stable_unstable_norms(prod, y, 5);
  CHECK(std::exp(whole.log_stable - first.log_stable - second.log_stable) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::exp(whole.log_unstable - first.log_unstable - second.log_unstable) ==
        doctest::Approx(1.0).epsilon(1e-8));

  const BasicSetModel bs(perturbed(1e-3));
  SolenoidPoint sp;
  sp.theta = 2.0;
  sp.word.assign(24, 0);
  const OrbitPoint start = lift(bs, realize(bs, sp));
  const auto orbit = trace_orbit(bs.map(), start, 9);
  const DerivativeNorms pw = orbit_norms(bs, orbit[0], 9);
  const DerivativeNorms p1 = orbit_norms(bs, orbit[0], 4);
  const DerivativeNorms p2 = orbit_norms(bs, orbit[4], 5);
  CHECK(std::exp(std::abs(pw.log_stable - p1.log_stable - p2.log_stable)) < 1.05);
  CHECK(std::exp(std::abs(pw.log_unstable - p1.log_unstable - p2.log_unstable)) < 1.05);
}

TEST_CASE("eps = 0 agrees with the product map on norms") {
  const BasicSetModel prod(MapFamily::product(0.1));
  const BasicSetModel flat(perturbed(0.0));
  const Point x = on_circle(oracle::p0(0.1), 0.4);
  const DerivativeNorms a = stable_unstable_norms(prod, x, 7);
  const DerivativeNorms b = stable_unstable_norms(flat, x, 7);
  CHECK(std::abs(a.log_stable - b.log_stable) < 1e-12);
  CHECK(std::abs(a.log_unstable - b.log_unstable) < 1e-12);
}

TEST_CASE("critical distance") {
  CHECK(critical_distance(BasicSetModel(MapFamily::product(0.1))) == doctest::Approx(0.1127016654).epsilon(1e-9));
  try {
    critical_distance(BasicSetModel(MapFamily::product(0.0)));
    FAIL("expected CriticalOnSet");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CriticalOnSet);
  }
  const double d1 = critical_distance(BasicSetModel(perturbed(2e-3)));
  const double d2 = critical_distance(BasicSetModel(perturbed(1e-3)));
  const double limit = oracle::p0(0.1);
  CHECK(std::abs(d2 - limit) < std::abs(d1 - limit));
  CHECK(std::abs(d2 - limit) < 2e-3);
}

TEST_CASE("hyperbolicity witnesses") {
  const HyperbolicityReport prod = require_c_hyperbolic(BasicSetModel(MapFamily::product(0.1)));
  CHECK(prod.passed);
  CHECK(prod.max_stable <= 0.9);
  CHECK(prod.min_unstable >= 1.1);
  const HyperbolicityReport pert = require_c_hyperbolic(BasicSetModel(perturbed(1e-3)));
  CHECK(pert.passed);
  CHECK(pert.max_slope < 1.0);
  CHECK(pert.invariance_defect < 0.2);
  CHECK_THROWS_AS(require_c_hyperbolic(BasicSetModel(MapFamily::product(0.0))), Error);
}
