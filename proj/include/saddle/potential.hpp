#pragma once

#include <string>
#include <vector>

#include "saddle/basic_set.hpp"
#include "saddle/symbolic.hpp"

namespace saddle {

enum class PotentialKind { Zero, Constant, StableLog, UnstableLog, AngleHarmonic, Sum };

/// Closed family of Hölder potentials on Lambda.
struct Potential {
  PotentialKind kind = PotentialKind::Zero;
  double value = 0.0;  // kappa, t, s or alpha
  std::vector<Potential> terms;

  static Potential zero();
  static Potential constant(double kappa);
  static Potential stable_log(double t);
  static Potential unstable_log(double s);
  static Potential angle_harmonic(double alpha);
  static Potential sum(std::vector<Potential> terms);
};

/// Every potential of the family is constant + t log|Dfs| + s log|Dfu| +
/// alpha cos(arg w).
struct LinearPotential {
  double constant = 0.0;
  double stable = 0.0;
  double unstable = 0.0;
  double angle = 0.0;
};

LinearPotential linearize(const Potential& phi);

/// Adds kappa to the potential, as Sum(phi, Constant(kappa)).
Potential shifted(const Potential& phi, double kappa);

double evaluate(const MapFamily& map, const Potential& phi, const OrbitPoint& x);
double evaluate(const MapFamily& map, const LinearPotential& phi, const OrbitPoint& x);

/// S_n phi over one period of an ensemble orbit.
inline double birkhoff(const LinearPotential& phi, const BasisSums& sums, int period) {
  return phi.constant * period + phi.stable * sums.stable + phi.unstable * sums.unstable +
         phi.angle * sums.angle;
}

/// True when phi depends on the base coordinate only. Stable and unstable
/// logs are constant on product basic sets and therefore qualify there.
bool base_only(const MapFamily& map, const Potential& phi);

std::string describe(const Potential& phi);

}  // namespace saddle
