#include "saddle/thermo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "saddle/orbit.hpp"

namespace saddle {

double birkhoff_sum(const MapFamily& map, const Potential& phi, const OrbitPoint& x, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative Birkhoff length");
  const LinearPotential lin = linearize(phi);
  double total = 0.0;
  OrbitPoint y = x;
  for (int j = 0; j < n; ++j) {
    total += evaluate(map, lin, y);
    if (j + 1 < n) y = step(map, y);
  }
  return total;
}

double birkhoff_sum(const BasicSetModel& bs, const Potential& phi, const Point& x, int n) {
  if (!membership(bs, x)) throw Error(ErrorCode::NotOnBasicSet, "Birkhoff sum off Lambda");
  if (n == 0) return 0.0;
  return birkhoff_sum(bs.map(), phi, lift(bs, x), n);
}

EnsemblePair build_ensemble_pair(const BasicSetModel& bs, int n) {
  if (n < 2 || n > 24) throw Error(ErrorCode::PeriodTooLarge, "pressure order must lie in [2, 24]");
  EnsemblePair pair;
  pair.current = std::make_shared<const PeriodicEnsemble>(build_ensemble(bs, n));
  pair.previous = std::make_shared<const PeriodicEnsemble>(build_ensemble(bs, n - 1));
  return pair;
}

double pressure_at(const PeriodicEnsemble& ens, const LinearPotential& phi) {
  double top = -std::numeric_limits<double>::infinity();
  for (const OrbitRecord& orbit : ens.orbits) top = std::max(top, birkhoff(phi, orbit.sums, ens.period));
  double total = 0.0;
  for (const OrbitRecord& orbit : ens.orbits)
    total += orbit.length * std::exp(birkhoff(phi, orbit.sums, ens.period) - top);
  return (top + std::log(total)) / ens.period;
}

PressureEstimate pressure_periodic(const EnsemblePair& pair, const Potential& phi,
                                   double gap_threshold) {
  const LinearPotential lin = linearize(phi);
  PressureEstimate est;
  est.method = PressureMethod::Periodic;
  est.order = pair.current->period;
  est.value = pressure_at(*pair.current, lin);
  est.diagnostic = std::abs(est.value - pressure_at(*pair.previous, lin));
  est.converged = est.diagnostic <= gap_threshold;
  return est;
}

PressureEstimate pressure_periodic(const BasicSetModel& bs, const Potential& phi, int n,
                                   double gap_threshold) {
  return pressure_periodic(build_ensemble_pair(bs, n), phi, gap_threshold);
}

namespace {

// Cubic Lagrange weights for the nodes -1, 0, 1, 2 at offset t in [0, 1).
std::array<double, 4> lagrange4(double t) {
  return {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
          -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
}

struct TransferMatrix {
  int size = 0;
  int width = 0;  // entries per row
  std::vector<int> column;
  std::vector<double> weight;

  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    for (int j = 0; j < size; ++j) {
      double acc = 0.0;
      const std::size_t base = static_cast<std::size_t>(j) * width;
      for (int e = 0; e < width; ++e) acc += weight[base + e] * x[column[base + e]];
      y[j] = acc;
    }
  }

  void multiply_transpose(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    y.setZero();
    for (int j = 0; j < size; ++j) {
      const std::size_t base = static_cast<std::size_t>(j) * width;
      for (int e = 0; e < width; ++e) y[column[base + e]] += weight[base + e] * x[j];
    }
  }
};

TransferMatrix assemble(const BasicSetModel& bs, const LinearPotential& phi, int grid) {
  const int d = bs.degree();
  double offset = phi.constant;
  if (bs.map().is_product())
    offset += phi.stable * std::log(std::abs(2.0 * bs.p0())) + phi.unstable * std::log(double(d));
  TransferMatrix m;
  m.size = grid;
  m.width = 4 * d;
  m.column.resize(static_cast<std::size_t>(grid) * m.width);
  m.weight.resize(m.column.size());
  const double h = kTwoPi / grid;
  for (int j = 0; j < grid; ++j) {
    for (int beta = 0; beta < d; ++beta) {
      const double theta = (kTwoPi * j / grid + kTwoPi * beta) / d;
      const double g = std::exp(offset + phi.angle * std::cos(theta));
      const double x = theta / h;
      const double base = std::floor(x);
      const auto lw = lagrange4(x - base);
      for (int q = 0; q < 4; ++q) {
        int idx = static_cast<int>(base) + q - 1;
        idx = ((idx % grid) + grid) % grid;
        const std::size_t slot = static_cast<std::size_t>(j) * m.width + beta * 4 + q;
        m.column[slot] = idx;
        m.weight[slot] = g * lw[static_cast<std::size_t>(q)];
      }
    }
  }
  return m;
}

template <typename Apply>
double power_iterate(Apply apply, Eigen::VectorXd& v, int& iterations, double& change) {
  Eigen::VectorXd next(v.size());
  double lambda = 0.0;
  change = std::numeric_limits<double>::infinity();
  for (iterations = 1; iterations <= 20000; ++iterations) {
    apply(v, next);
    const double value = next.sum() / v.sum();
    change = std::abs(value - lambda) / std::abs(value);
    lambda = value;
    v = next / next.sum();
    if (change < 1e-10 && iterations > 2) return lambda;
  }
  throw Error(ErrorCode::NewtonDiverged, "transfer power iteration did not converge");
}

}  // namespace

TransferSpectrum transfer_spectrum(const BasicSetModel& bs, const Potential& phi, int grid_size,
                                   bool with_left) {
  if (grid_size < 256) throw Error(ErrorCode::InvalidArgument, "transfer grid must be >= 256");
  if (!base_only(bs.map(), phi))
    throw Error(ErrorCode::NotBaseOnly, "potential depends on the fiber coordinate");
  const TransferMatrix m = assemble(bs, linearize(phi), grid_size);
  TransferSpectrum out;
  out.right = Eigen::VectorXd::Constant(grid_size, 1.0 / grid_size);
  out.eigenvalue = power_iterate([&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { m.multiply(x, y); },
                                 out.right, out.iterations, out.last_change);
  if (with_left) {
    out.left = Eigen::VectorXd::Constant(grid_size, 1.0 / grid_size);
    int iterations = 0;
    double change = 0.0;
    power_iterate([&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { m.multiply_transpose(x, y); },
                  out.left, iterations, change);
    out.density = out.right.cwiseProduct(out.left);
    out.density /= out.density.sum();
  }
  return out;
}

PressureEstimate pressure_transfer(const BasicSetModel& bs, const Potential& phi, int grid_size) {
  const TransferSpectrum spec = transfer_spectrum(bs, phi, grid_size);
  PressureEstimate est;
  est.method = PressureMethod::Transfer;
  est.order = grid_size;
  est.value = std::log(spec.eigenvalue);
  est.diagnostic = spec.last_change;
  est.converged = true;
  return est;
}

Admissibility check_admissible(const Potential& phi, int d_prime, const PressureEstimate& P,
                               const BasicSetModel& bs) {
  if (d_prime < 1) throw Error(ErrorCode::InvalidArgument, "d' must be >= 1");
  const LinearPotential lin = linearize(phi);
  Admissibility out;
  out.sup_phi = -std::numeric_limits<double>::infinity();
  for (const OrbitPoint& x : realized_orbit_net(bs))
    out.sup_phi = std::max(out.sup_phi, evaluate(bs.map(), lin, x));
  out.margin = out.sup_phi + std::log(static_cast<double>(d_prime)) - P.value;
  out.admissible = out.margin < -std::max(1e-9, 2.0 * P.diagnostic);
  return out;
}

Potential normalize(const Potential& phi, int d_prime, const PressureEstimate& P) {
  if (d_prime < 1) throw Error(ErrorCode::InvalidArgument, "d' must be >= 1");
  return shifted(phi, std::log(static_cast<double>(d_prime)) - P.value);
}

GibbsModel build_gibbs(const EnsemblePair& pair, const Potential& phi, int d_prime) {
  GibbsModel gm;
  gm.potential = phi;
  gm.d_prime = d_prime;
  gm.order = pair.current->period;
  gm.ensemble = pair.current;
  gm.pressure = pressure_periodic(pair, phi);
  gm.normalized = normalize(phi, d_prime, gm.pressure);
  gm.normalized_pressure = pressure_periodic(pair, gm.normalized);
  gm.is_normalized = std::abs(gm.normalized_pressure.value - std::log(double(d_prime))) <=
                     2.0 * gm.normalized_pressure.diagnostic + 1e-12;

  const PeriodicEnsemble& ens = *pair.current;
  const LinearPotential lin = linearize(gm.normalized);
  double top = -std::numeric_limits<double>::infinity();
  for (const OrbitRecord& orbit : ens.orbits) top = std::max(top, birkhoff(lin, orbit.sums, ens.period));
  gm.weights.resize(ens.orbits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < ens.orbits.size(); ++i) {
    gm.weights[i] = std::exp(birkhoff(lin, ens.orbits[i].sums, ens.period) - top);
    total += ens.orbits[i].length * gm.weights[i];
  }
  for (double& w : gm.weights) w /= total;
  return gm;
}

double gibbs_expectation(const GibbsModel& gm, const Potential& psi) {
  const LinearPotential lin = linearize(psi);
  const PeriodicEnsemble& ens = *gm.ensemble;
  double total = 0.0;
  for (std::size_t i = 0; i < ens.orbits.size(); ++i)
    total += ens.orbits[i].length * gm.weights[i] * birkhoff(lin, ens.orbits[i].sums, ens.period);
  return total / ens.period;
}

double entropy(const GibbsModel& gm) {
  return gm.pressure.value - gibbs_expectation(gm, gm.potential);
}

LyapunovExponents lyapunov(const GibbsModel& gm) {
  LyapunovExponents chi;
  chi.stable = gibbs_expectation(gm, Potential::stable_log(1.0));
  chi.unstable = gibbs_expectation(gm, Potential::unstable_log(1.0));
  if (!(chi.stable < 0.0) || !(chi.unstable > 0.0))
    throw Error(ErrorCode::SignViolation, "Lyapunov exponents do not split as chi_s < 0 < chi_u");
  return chi;
}

BowenRoot bowen_root(const PeriodicEnsemble& ens, int d_prime) {
  if (d_prime < 1) throw Error(ErrorCode::InvalidArgument, "d' must be >= 1");
  const double shift = -std::log(static_cast<double>(d_prime));
  auto g = [&](double t) { return pressure_at(ens, LinearPotential{shift, t, 0.0, 0.0}); };
  BowenRoot out;
  out.g_at_zero = g(0.0);
  if (out.g_at_zero < 0.0) {
    out.no_sign_change = true;
    return out;
  }
  double lo = 0.0;
  double hi = 4.0;
  if (g(hi) > 0.0) {
    out.root = hi;
    out.no_sign_change = true;
    return out;
  }
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
    ++out.iterations;
  }
  out.root = 0.5 * (lo + hi);
  return out;
}

BowenRoot bowen_root(const BasicSetModel& bs, int d_prime, int n) {
  if (n < 1 || n > 24) throw Error(ErrorCode::PeriodTooLarge, "order must lie in [1, 24]");
  return bowen_root(build_ensemble(bs, n), d_prime);
}

namespace {

double periodic_sum(const BasicSetModel& bs, const LinearPotential& phi,
                    const std::vector<std::uint8_t>& word) {
  const std::vector<OrbitPoint> orbit =
      periodic_orbit(bs, static_cast<int>(word.size()), periodic_index(word, bs.degree()));
  double total = 0.0;
  for (const OrbitPoint& y : orbit) total += evaluate(bs.map(), phi, y);
  return total;
}

std::vector<std::uint8_t> concat(const std::vector<std::uint8_t>& a,
                                 const std::vector<std::uint8_t>& b) {
  std::vector<std::uint8_t> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

double cylinder_mass(const BasicSetModel& bs, const Potential& phi, double pressure,
                     const std::vector<std::uint8_t>& word) {
  if (word.empty()) return 1.0;
  return std::exp(periodic_sum(bs, linearize(phi), word) - pressure * word.size());
}

double cylinder_comparability(const BasicSetModel& bs, const Potential& phi, double pressure,
                              const std::vector<std::uint8_t>& u,
                              const std::vector<std::uint8_t>& v,
                              const std::vector<std::uint8_t>& tail) {
  const LinearPotential lin = linearize(phi);
  const double k = static_cast<double>(u.size());
  const double m = static_cast<double>(v.size());
  const double log_ratio = std::log(cylinder_mass(bs, phi, pressure, concat(u, tail))) -
                           std::log(cylinder_mass(bs, phi, pressure, concat(v, tail))) +
                           periodic_sum(bs, lin, v) - periodic_sum(bs, lin, u) + (k - m) * pressure;
  return std::exp(log_ratio);
}

}  // namespace saddle
