#include <doctest.h>

#include "oracles.hpp"
#include "saddle/random.hpp"
#include "saddle/thermo.hpp"

using namespace saddle;

namespace {

const BasicSetModel& product() {
  static const BasicSetModel bs(MapFamily::product(0.1));
  return bs;
}

const EnsemblePair& product18() {
  static const EnsemblePair pair = build_ensemble_pair(product(), 18);
  return pair;
}

BasicSetModel perturbed(double eps) {
  Perturbation q;
  q.b = 1.0;
  return BasicSetModel(MapFamily::perturbed(0.1, q, eps));
}

const Point x0 = make_point(0.1127016653792583, std::polar(1.0, 0.37));

}  // namespace

TEST_CASE("birkhoff sums") {
  CHECK(birkhoff_sum(product(), Potential::zero(), x0, 7) == 0.0);
  CHECK(birkhoff_sum(product(), Potential::constant(0.3), x0, 5) == doctest::Approx(1.5));
  CHECK(birkhoff_sum(product(), Potential::unstable_log(1.0), x0, 2) == doctest::Approx(2 * oracle::kLog2).epsilon(1e-12));
  CHECK(birkhoff_sum(product(), Potential::stable_log(1.0), x0, 3) ==
        doctest::Approx(3 * oracle::chi_s(0.1)).epsilon(1e-12));
  CHECK(birkhoff_sum(product(), Potential::angle_harmonic(1.0), x0, 0) == 0.0);
  double manual = 0.0;
  for (int j = 0; j < 4; ++j) manual += std::cos(0.37 * std::pow(2.0, j));
  CHECK(birkhoff_sum(product(), Potential::angle_harmonic(1.0), x0, 4) == doctest::Approx(manual).epsilon(1e-12));
  CHECK_THROWS_AS(birkhoff_sum(product(), Potential::zero(), make_point(0.7, 1.0), 2), Error);
}

TEST_CASE("periodic pressure") {
  const PressureEstimate P = pressure_periodic(product(), Potential::zero(), 20);
  CHECK(P.value == doctest::Approx(std::log(std::pow(2.0, 20) - 1.0) / 20).epsilon(1e-14));
  CHECK(std::abs(P.value - oracle::kLog2) < 1e-6);
  CHECK(P.order == 20);
  CHECK(P.diagnostic > 0.0);
  CHECK(std::abs(pressure_periodic(product18(), Potential::constant(-oracle::kLog2)).value) < 1e-6);
  CHECK_THROWS_AS(pressure_periodic(product(), Potential::zero(), 25), Error);
  CHECK_THROWS_AS(pressure_periodic(product(), Potential::zero(), 1), Error);
}

TEST_CASE("transfer pressure") {
  CHECK(std::abs(pressure_transfer(product(), Potential::zero(), 2048).value - oracle::kLog2) < 1e-9);
  CHECK(std::abs(pressure_transfer(product(), Potential::constant(0.25), 2048).value - oracle::kLog2 - 0.25) < 1e-9);
  const double half = pressure_transfer(product(), Potential::angle_harmonic(0.5), 2048).value;
  CHECK(half > oracle::kLog2);
  CHECK(half < oracle::kLog2 + 0.5);
  CHECK(std::abs(half - oracle::kAngleHalfPressure) < 1e-9);
  CHECK(std::abs(half - oracle::angle_pressure(0.5)) < 1e-9);
  CHECK(std::abs(pressure_transfer(product(), Potential::angle_harmonic(0.1), 2048).value -
                 oracle::angle_pressure(0.1)) < 1e-9);
  CHECK_THROWS_AS(pressure_transfer(product(), Potential::zero(), 128), Error);
  try {
    pressure_transfer(perturbed(1e-3), Potential::stable_log(1.0), 2048);
    FAIL("expected NotBaseOnly");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotBaseOnly);
  }
}

TEST_CASE("periodic and transfer pressures agree on base-only potentials") {
  const std::vector<Potential> family = {
      Potential::zero(), Potential::constant(-0.4), Potential::unstable_log(0.5), Potential::angle_harmonic(0.1),
      Potential::angle_harmonic(-0.3), Potential::stable_log(0.5),
      Potential::sum({Potential::angle_harmonic(0.2), Potential::constant(1.0), Potential::unstable_log(-0.25)})};
  for (const Potential& phi : family) {
    CAPTURE(describe(phi));
    const double periodic = pressure_periodic(product18(), phi).value;
    const double transfer = pressure_transfer(product(), phi, 2048).value;
    CHECK(std::abs(periodic - transfer) < 1e-4);
  }
}

TEST_CASE("Cauchy gaps shrink with the order") {
  const std::vector<Potential> family = {Potential::zero(), Potential::angle_harmonic(0.1),
                                         Potential::angle_harmonic(0.5), Potential::stable_log(1.0),
                                         Potential::unstable_log(1.0)};
  const BasicSetModel pert = perturbed(1e-3);
  for (const BasicSetModel* bs : {&product(), &pert}) {
    std::vector<PeriodicEnsemble> ens;
    for (int n = 9; n <= 16; ++n) ens.push_back(build_ensemble(*bs, n));
    for (const Potential& phi : family) {
      CAPTURE(describe(phi));
      const LinearPotential lin = linearize(phi);
      double previous_gap = 1e300;
      for (std::size_t i = 1; i < ens.size(); ++i) {
        const double gap = std::abs(pressure_at(ens[i], lin) - pressure_at(ens[i - 1], lin));
        CHECK(gap < previous_gap);
        previous_gap = gap;
      }
    }
  }
}

TEST_CASE("admissibility") {
  const PressureEstimate P0 = pressure_periodic(product18(), Potential::zero());
  const Admissibility one = check_admissible(Potential::zero(), 1, P0, product());
  CHECK(one.margin == doctest::Approx(-oracle::kLog2).epsilon(1e-6));
  CHECK(one.admissible);
  const Admissibility two = check_admissible(Potential::zero(), 2, P0, product());
  CHECK(std::abs(two.margin) < 1e-6);
  CHECK_FALSE(two.admissible);

  const PressureEstimate Ph = pressure_transfer(product(), Potential::angle_harmonic(0.5), 2048);
  const Admissibility h = check_admissible(Potential::angle_harmonic(0.5), 1, Ph, product());
  CHECK(h.sup_phi == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(h.margin == doctest::Approx(0.5 - Ph.value).epsilon(1e-6));
  CHECK(h.admissible);
}

TEST_CASE("normalization") {
  const PressureEstimate P0 = pressure_periodic(product18(), Potential::zero());
  const Potential zero2 = normalize(Potential::zero(), 2, P0);
  CHECK(std::abs(linearize(zero2).constant) < 1e-6);

  const Potential zero1 = normalize(Potential::zero(), 1, P0);
  CHECK(linearize(zero1).constant == doctest::Approx(-oracle::kLog2).epsilon(1e-6));
  const PressureEstimate again = pressure_periodic(product18(), zero1);
  CHECK(std::abs(again.value) <= 2.0 * again.diagnostic + 1e-12);

  const Potential phi = Potential::angle_harmonic(0.1);
  const Potential bar = normalize(phi, 1, pressure_transfer(product(), phi, 2048));
  CHECK(std::abs(pressure_transfer(product(), bar, 2048).value) < 1e-4);
}

TEST_CASE("Gibbs models") {
  const GibbsModel gm = build_gibbs(product18(), Potential::zero(), 2);
  CHECK(gm.is_normalized);
  double total = 0.0;
  for (std::size_t i = 0; i < gm.weights.size(); ++i) total += gm.weights[i] * gm.ensemble->orbits[i].length;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(gibbs_expectation(gm, Potential::constant(0.7)) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(std::abs(gibbs_expectation(gm, Potential::unstable_log(1.0)) - oracle::kLog2) < 1e-8);
  CHECK(std::abs(gibbs_expectation(gm, Potential::stable_log(1.0)) - oracle::chi_s(0.1)) < 1e-6);

  // Weights do not see the normalizing constant.
  const Potential phi = Potential::angle_harmonic(0.3);
  const GibbsModel a = build_gibbs(product18(), phi, 1);
  const GibbsModel b = build_gibbs(product18(), a.normalized, 1);
  REQUIRE(a.weights.size() == b.weights.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.weights.size(); ++i) worst = std::max(worst, std::abs(a.weights[i] - b.weights[i]));
  CHECK(worst < 1e-12);
  CHECK(a.normalized_pressure.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("entropy") {
  CHECK(std::abs(entropy(build_gibbs(product18(), Potential::zero(), 2)) - oracle::kLog2) < 1e-5);
  CHECK(std::abs(entropy(build_gibbs(product18(), Potential::constant(1.3), 2)) - oracle::kLog2) < 1e-5);

  const double h = entropy(build_gibbs(product18(), Potential::angle_harmonic(0.1), 2));
  CHECK(std::abs(h - oracle::angle_entropy(0.1)) < 1e-5);

  // Cylinder entropy of the transfer-operator equilibrium state.
  const TransferSpectrum spec = transfer_spectrum(product(), Potential::angle_harmonic(0.1), 512, true);
  const std::vector<double> right(spec.right.data(), spec.right.data() + spec.right.size());
  const std::vector<double> weights(spec.density.data(), spec.density.data() + spec.density.size());
  const double cylinder = oracle::cylinder_entropy_gap(0.1, spec.eigenvalue, right, weights, 10);
  CHECK(std::abs(h - cylinder) < 1e-3);
  CHECK(std::abs(cylinder - oracle::angle_entropy(0.1)) < 1e-5);
}

TEST_CASE("transfer eigendata") {
  const TransferSpectrum spec = transfer_spectrum(product(), Potential::angle_harmonic(0.1), 1024, true);
  CHECK(spec.density.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spec.density.minCoeff() > 0.0);
  CHECK(spec.right.minCoeff() > 0.0);
  double mean_cos = 0.0;
  for (Eigen::Index i = 0; i < spec.density.size(); ++i)
    mean_cos += spec.density(i) * std::cos(kTwoPi * static_cast<double>(i) / spec.density.size());
  // int phi dmu = dP/dalpha.
  const double slope = (oracle::angle_pressure(0.1001) - oracle::angle_pressure(0.0999)) / 2e-4;
  CHECK(mean_cos == doctest::Approx(slope).epsilon(1e-3));
}

TEST_CASE("Lyapunov exponents") {
  const LyapunovExponents chi = lyapunov(build_gibbs(product18(), Potential::zero(), 2));
  CHECK(std::abs(chi.unstable - 0.6931472) < 1e-7);
  CHECK(std::abs(chi.stable - oracle::chi_s(0.1)) < 1e-6);

  const BasicSetModel c05(MapFamily::product(0.05));
  const LyapunovExponents chi05 = lyapunov(build_gibbs(build_ensemble_pair(c05, 10), Potential::zero(), 2));
  CHECK(chi05.stable == doctest::Approx(-2.2485).epsilon(1e-4));
  CHECK(std::abs(chi05.stable - std::log(1.0 - std::sqrt(0.8))) < 1e-9);

  const BasicSetModel pert = perturbed(1e-3);
  const LyapunovExponents chip = lyapunov(build_gibbs(build_ensemble_pair(pert, 14), Potential::zero(), 1));
  CHECK(chip.stable / chi.stable == doctest::Approx(1.0).epsilon(0.05));
  CHECK(chip.unstable / chi.unstable == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("Bowen root") {
  const BowenRoot two = bowen_root(*product18().current, 2);
  CHECK(std::abs(two.root) < 1e-6);
  CHECK(two.no_sign_change);
  const BowenRoot one = bowen_root(*product18().current, 1);
  CHECK_FALSE(one.no_sign_change);
  CHECK(std::abs(one.root - oracle::kLog2 / -oracle::chi_s(0.1)) < 1e-6);
  CHECK(one.root > two.root);
  CHECK(std::abs(bowen_root(product(), 1, 12).root - one.root) < 1e-3);
}

TEST_CASE("cylinder comparability") {
  Rng rng(7);
  auto word = [&](std::size_t n) {
    std::vector<std::uint8_t> w(n);
    for (auto& s : w) s = static_cast<std::uint8_t>(rng.below(2));
    return w;
  };
  const Potential phi = Potential::angle_harmonic(0.1);
  const double P = pressure_transfer(product(), phi, 2048).value;
  double worst = 1.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto u = word(1 + rng.below(8));
    auto v = word(1 + rng.below(8));
    const std::size_t j = rng.below(std::min(u.size(), v.size()));
    v[j] = static_cast<std::uint8_t>(1 - u[j]);
    const double r = cylinder_comparability(product(), phi, P, u, v, word(1 + rng.below(8)));
    worst = std::max({worst, r, 1.0 / r});
  }
  CHECK(worst <= 10.0);
  CHECK(cylinder_comparability(product(), Potential::zero(), oracle::kLog2, {0, 1}, {1}, {1, 1, 0}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cylinder_mass(product(), Potential::zero(), oracle::kLog2, {0, 1, 1}) == doctest::Approx(0.125));
}
