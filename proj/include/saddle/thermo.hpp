#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "saddle/potential.hpp"

namespace saddle {

enum class PressureMethod { Periodic, Transfer };

struct PressureEstimate {
  double value = 0.0;
  int order = 0;            // period n, or grid size for the transfer method
  double diagnostic = 0.0;  // |P_n - P_{n-1}|, or the last relative eigenvalue change
  PressureMethod method = PressureMethod::Periodic;
  bool converged = true;    // diagnostic within the configured threshold
};

/// S_n phi along the forward orbit of x. Throws NotOnBasicSet.
double birkhoff_sum(const BasicSetModel& bs, const Potential& phi, const Point& x, int n);

/// Same for an already lifted point.
double birkhoff_sum(const MapFamily& map, const Potential& phi, const OrbitPoint& x, int n);

/// Ensembles of periods n and n - 1; the second one feeds the Cauchy gap.
struct EnsemblePair {
  std::shared_ptr<const PeriodicEnsemble> current;
  std::shared_ptr<const PeriodicEnsemble> previous;
};

EnsemblePair build_ensemble_pair(const BasicSetModel& bs, int n);

/// (1/n) log sum over Fix(f^n) of exp(S_n phi).
double pressure_at(const PeriodicEnsemble& ens, const LinearPotential& phi);

PressureEstimate pressure_periodic(const EnsemblePair& pair, const Potential& phi,
                                   double gap_threshold = 1e-3);
PressureEstimate pressure_periodic(const BasicSetModel& bs, const Potential& phi, int n,
                                   double gap_threshold = 1e-3);

/// Discretized transfer operator of a base-only potential on a uniform
/// angle grid, with its leading eigendata.
struct TransferSpectrum {
  double eigenvalue = 0.0;
  Eigen::VectorXd right;    // eigenfunction at the grid angles
  Eigen::VectorXd left;     // eigenmeasure weights of the grid points
  Eigen::VectorXd density;  // equilibrium weights right * left, summing to 1
  int iterations = 0;
  double last_change = 0.0;
};

/// Power iteration to relative tolerance 1e-10. Throws NotBaseOnly or
/// InvalidArgument (grid below 256).
TransferSpectrum transfer_spectrum(const BasicSetModel& bs, const Potential& phi, int grid_size,
                                   bool with_left = false);

PressureEstimate pressure_transfer(const BasicSetModel& bs, const Potential& phi,
                                   int grid_size = 2048);

struct Admissibility {
  double sup_phi = 0.0;
  double margin = 0.0;  // sup phi + log d' - P
  bool admissible = false;
};

/// Margin of the strict inequality phi + log d' < P(phi), with sup over the
/// realized net. Admissible when the margin is below -max(1e-9, 2 gap).
Admissibility check_admissible(const Potential& phi, int d_prime, const PressureEstimate& P,
                               const BasicSetModel& bs);

/// phi + log d' - P.
Potential normalize(const Potential& phi, int d_prime, const PressureEstimate& P);

/// Gibbs measure of phi on the periodic ensemble; weights are per point and
/// stored per orbit.
struct GibbsModel {
  Potential potential;           // phi as given
  Potential normalized;          // phi-bar
  PressureEstimate pressure;     // P(phi)
  PressureEstimate normalized_pressure;  // P(phi-bar), should equal log d'
  int d_prime = 1;
  int order = 0;
  std::shared_ptr<const PeriodicEnsemble> ensemble;
  std::vector<double> weights;   // mass of each point of orbit i
  bool is_normalized = false;
};

GibbsModel build_gibbs(const EnsemblePair& pair, const Potential& phi, int d_prime);

/// Sum over points of w(y) S_n psi(y) / n.
double gibbs_expectation(const GibbsModel& gm, const Potential& psi);

/// P(phi) - int phi.
double entropy(const GibbsModel& gm);

struct LyapunovExponents {
  double stable = 0.0;
  double unstable = 0.0;
};

/// Throws SignViolation unless chi_s < 0 < chi_u.
LyapunovExponents lyapunov(const GibbsModel& gm);

struct BowenRoot {
  double root = 0.0;
  bool no_sign_change = false;  // g(0) < 0; root reported as 0
  int iterations = 0;
  double g_at_zero = 0.0;
};

/// Zero of t -> P(t log|Dfs| - log d') by bisection on [0, 4] to 1e-8.
BowenRoot bowen_root(const PeriodicEnsemble& ens, int d_prime);
BowenRoot bowen_root(const BasicSetModel& bs, int d_prime, int n = 18);

/// Cylinder Gibbs mass exp(S_k phi(y_u) - k P) at the periodic point of u.
double cylinder_mass(const BasicSetModel& bs, const Potential& phi, double pressure,
                     const std::vector<std::uint8_t>& word);

/// The comparability ratio of two disjoint cylinders u, v continued by the
/// same word A:
///   mu(uA) / mu(vA) * exp(S_m phi(v) - S_k phi(u)) * exp((k - m) P).
double cylinder_comparability(const BasicSetModel& bs, const Potential& phi, double pressure,
                              const std::vector<std::uint8_t>& u,
                              const std::vector<std::uint8_t>& v,
                              const std::vector<std::uint8_t>& tail);

}  // namespace saddle
