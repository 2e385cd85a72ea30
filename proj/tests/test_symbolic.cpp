#include <doctest.h>

#include <map>
#include <numbers>

#include "oracles.hpp"
#include "saddle/orbit.hpp"
#include "saddle/symbolic.hpp"

using namespace saddle;

namespace {

BasicSetModel perturbed(double eps) {
  Perturbation q;
  q.b = 1.0;
  return BasicSetModel(MapFamily::perturbed(0.1, q, eps));
}

Point iterate(const MapFamily& map, Point p, int n) {
  for (int i = 0; i < n; ++i) p = saddle::apply(map, p);
  return p;
}

}  // namespace

TEST_CASE("period 1 and 2") {
  const BasicSetModel prod(MapFamily::product(0.1));
  const auto one = periodic_points(prod, 1);
  REQUIRE(one.size() == 1);
  CHECK(std::abs(one[0].point.p(0) - oracle::p0(0.1)) < 1e-15);
  CHECK(std::abs(one[0].point.p(1) - cplx(1.0, 0.0)) < 1e-15);
  CHECK((saddle::apply(prod.map(), one[0].point.p) - one[0].point.p).norm() < 1e-15);

  const auto two = periodic_points(prod, 2);
  REQUIRE(two.size() == 3);
  std::vector<double> angles;
  for (const auto& y : two) angles.push_back(angle_of(y.point.p(1)));
  std::sort(angles.begin(), angles.end());
  CHECK(angles[0] == doctest::Approx(0.0));
  CHECK(angles[1] == doctest::Approx(2.0 * std::numbers::pi / 3));
  CHECK(angles[2] == doctest::Approx(4.0 * std::numbers::pi / 3));
}

TEST_CASE("periodic point counts and residuals") {
  const BasicSetModel prod(MapFamily::product(0.1));
  const BasicSetModel pert = perturbed(1e-3);
  for (int n = 1; n <= 10; ++n) {
    CHECK(periodic_points(prod, n).size() == (std::size_t{1} << n) - 1);
    CHECK(periodic_point_count(n, 2) == (std::uint64_t{1} << n) - 1);
  }
  for (int n = 1; n <= 7; ++n) {
    const auto pts = periodic_points(pert, n);
    CHECK(pts.size() == (std::size_t{1} << n) - 1);
    for (const auto& y : pts) {
      CHECK((iterate(pert.map(), y.point.p, n) - y.point.p).norm() < 1e-9);
      CHECK(membership(pert, y.point.p));
    }
  }
  CHECK(periodic_point_count(4, 3) == 80);
  CHECK_THROWS_AS(periodic_points(prod, 25), Error);
  CHECK_THROWS_AS(periodic_points(prod, 0), Error);
}

TEST_CASE("eps = 0 periodic points equal the product ones") {
  const auto a = periodic_points(BasicSetModel(MapFamily::product(0.1)), 6);
  const auto b = periodic_points(perturbed(0.0), 6);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i].point.p - b[i].point.p).norm() < 1e-12);
}

TEST_CASE("shadowing converges monotonically as eps halves") {
  const BasicSetModel prod(MapFamily::product(0.1));
  const Itinerary u = make_itinerary({0, 1, 1, 0, 1}, true);
  const Point target = periodic_orbit(prod, u).front().p;
  double previous = 1.0;
  for (double eps : {4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4}) {
    const double gap = (periodic_orbit(perturbed(eps), u).front().p - target).norm();
    CHECK(gap < previous);
    if (previous < 1.0) CHECK(gap / previous == doctest::Approx(0.5).epsilon(0.05));
    previous = gap;
  }
}

TEST_CASE("itineraries") {
  CHECK(canonical_rotation({1, 0, 1, 1}) == std::vector<std::uint8_t>{0, 1, 1, 1});
  CHECK(canonical_rotation({0, 0, 1}) == std::vector<std::uint8_t>{0, 0, 1});
  CHECK(make_itinerary({1, 1, 0}, true).word == std::vector<std::uint8_t>{0, 1, 1});
  CHECK(make_itinerary({1, 1, 0}, false).word == std::vector<std::uint8_t>{1, 1, 0});
  CHECK_THROWS_AS(make_itinerary({}, true), Error);
  for (std::uint64_t k = 0; k < 15; ++k) CHECK(periodic_index(periodic_word(k, 4, 2), 2) == k);
  CHECK(periodic_index({1, 1, 1}, 2) == 0);
}

TEST_CASE("prehistory sampling") {
  const BasicSetModel prod(MapFamily::product(0.1));
  const Point x = make_point(oracle::p0(0.1), std::polar(1.0, 1.7));
  const SolenoidPoint empty = sample_prehistory(prod, x, 0, 1);
  CHECK(empty.depth() == 0);
  CHECK((realize(prod, empty) - x).norm() < 1e-12);

  const SolenoidPoint deep = sample_prehistory(prod, x, 12, 2);
  CHECK(deep.depth() == 12);
  CHECK((realize(prod, deep) - x).norm() < 1e-12);
  const Realization chain = realize_chain(prod, deep);
  for (const OrbitPoint& y : chain.chain) CHECK(std::abs(y.p(0) - oracle::p0(0.1)) < 1e-15);

  int ones = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) ones += sample_prehistory(prod, x, 1, 1000 + i).word[0];
  CHECK(static_cast<double>(ones) / trials == doctest::Approx(0.5).epsilon(0.04));
  CHECK(sample_prehistory(prod, x, 8, 5).word == sample_prehistory(prod, x, 8, 5).word);

  const BasicSetModel pert = perturbed(1e-3);
  SolenoidPoint sp;
  sp.theta = 0.4;
  sp.word.assign(24, 1);
  const Point xp = realize(pert, sp);
  // d' = 1: the only prehistory in Lambda is the one the point was built from.
  for (std::uint64_t seed : {9ULL, 10ULL}) {
    const SolenoidPoint back = sample_prehistory(pert, xp, 6, seed);
    CHECK(back.word == std::vector<std::uint8_t>(6, 1));
  }
  CHECK_THROWS_AS(sample_prehistory(prod, make_point(0.7, 1.0), 2, 1), Error);
}
