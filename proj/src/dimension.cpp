#include "saddle/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "saddle/orbit.hpp"

namespace saddle {

double log_ball_measure(const GibbsModel& gm, const MapFamily& map,
                        const std::vector<OrbitPoint>& orbit, int n, int k) {
  if (!gm.is_normalized) throw Error(ErrorCode::NotNormalized, "ball measure needs P(phi-bar) = log d'");
  if (n < 0 || k < 0) throw Error(ErrorCode::InvalidArgument, "negative ball order");
  if (static_cast<int>(orbit.size()) < n + k)
    throw Error(ErrorCode::InvalidArgument, "orbit shorter than n + k");
  const LinearPotential lin = linearize(gm.normalized);
  double sum = 0.0;
  for (int j = 0; j < n + k; ++j) sum += evaluate(map, lin, orbit[static_cast<std::size_t>(j)]);
  return sum - k * std::log(static_cast<double>(gm.d_prime));
}

double ball_measure(const GibbsModel& gm, const IteratedBall& ball, const BasicSetModel& bs) {
  if (!gm.is_normalized) throw Error(ErrorCode::NotNormalized, "ball measure needs P(phi-bar) = log d'");
  if (!membership(bs, ball.z)) throw Error(ErrorCode::NotOnBasicSet, "ball center off Lambda");
  const auto orbit = trace_orbit(bs.map(), lift(bs, ball.z), ball.n + ball.k);
  return std::exp(log_ball_measure(gm, bs.map(), orbit, ball.n, ball.k));
}

int round_k(const MapFamily& map, const std::vector<OrbitPoint>& orbit, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative n");
  if (static_cast<int>(orbit.size()) < n)
    throw Error(ErrorCode::InvalidArgument, "orbit shorter than n");
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    const Point& p = orbit[static_cast<std::size_t>(j)].p;
    s += std::log(std::abs(fiber_derivative(map, p(0), p(1))));
  }
  int best = 0;
  double best_gap = std::abs(s);
  double total = s;
  for (int k = 1; n + k - 1 < static_cast<int>(orbit.size()); ++k) {
    const OrbitPoint& x = orbit[static_cast<std::size_t>(n + k - 1)];
    total += std::log(unstable_stretch(map, x.p, x.slope));
    const double gap = std::abs(total);
    if (gap < best_gap) {
      best_gap = gap;
      best = k;
    }
    if (total > 0.0) return best;
  }
  if (total <= 0.0) throw Error(ErrorCode::InvalidArgument, "orbit too short for round_k");
  return best;
}

int round_k(const BasicSetModel& bs, const Point& z, int n) {
  if (!membership(bs, z)) throw Error(ErrorCode::NotOnBasicSet, "round_k center off Lambda");
  if (n == 0) return 0;
  const OrbitPoint x = lift(bs, z);
  for (int length = 4 * n + 8;; length *= 2) {
    const auto orbit = trace_orbit(bs.map(), x, length);
    try {
      return round_k(bs.map(), orbit, n);
    } catch (const Error&) {
      if (length > 4096 * (n + 1)) throw;
    }
  }
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::HomeomorphicLike: return "homeomorphic-like";
    case Regime::Generic: return "generic";
    case Regime::Expanding: return "expanding";
  }
  return "generic";
}

double dimension_formula(double h, double chi_s, double chi_u, int d_prime, Regime regime) {
  if (std::abs(chi_s) < 1e-6 || chi_u < 1e-6)
    throw Error(ErrorCode::DegenerateExponents, "Lyapunov exponent too close to 0");
  if (d_prime < 1) throw Error(ErrorCode::InvalidArgument, "d' must be >= 1");
  if (regime == Regime::Expanding) return h / chi_u;
  return h * (1.0 / chi_u - 1.0 / chi_s) + std::log(static_cast<double>(d_prime)) / chi_s;
}

std::vector<CenterOrbit> sample_centers(const BasicSetModel& bs, const GibbsSampler& sampler,
                                        int count, int length, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xce47e55ULL));
  std::vector<Draw> draws;
  sampler.fill(draws, static_cast<std::size_t>(count), rng);
  std::vector<CenterOrbit> centers;
  centers.reserve(draws.size());
  for (const Draw& x : draws) centers.push_back(make_center(bs, x, length));
  return centers;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error(ErrorCode::InvalidArgument, "fit needs >= 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.standard_error = std::sqrt(rss / (n - 2) / sxx);
  }
  return fit;
}

namespace {

int past_digits_for(const BasicSetModel& bs) { return bs.map().is_product() ? 0 : 48; }

int stable_horizon(const BasicSetModel& bs, int n) {
  // Enough forward steps to reach the round k for moderate exponent ratios.
  const double ratio = -std::log(std::abs(2.0 * bs.p0())) / std::log(double(bs.degree()));
  return n + static_cast<int>(std::ceil(n * ratio * 1.5)) + 8;
}

}  // namespace

EmpiricalDimension empirical_dimension(const GibbsModel& gm, const BasicSetModel& bs,
                                       const EmpiricalOptions& options) {
  if (options.n_min < 1 || options.n_max < options.n_min + 1)
    throw Error(ErrorCode::InvalidArgument, "empirical dimension needs n_min >= 1 and two orders");
  const MapFamily& map = bs.map();
  const GibbsSampler sampler(bs, gm.potential, options.sampler_depth, past_digits_for(bs));
  const int length = stable_horizon(bs, options.n_max);
  const std::vector<CenterOrbit> centers =
      sample_centers(bs, sampler, 1, length, options.counting.seed);
  const CenterOrbit& c = centers.front();

  std::vector<int> n_values;
  std::vector<int> ks;
  int k_max = 1;
  for (int n = options.n_min; n <= options.n_max; ++n) {
    n_values.push_back(n);
    ks.push_back(std::max(1, round_k(map, c.orbit, n)));
    k_max = std::max(k_max, ks.back());
  }
  if (options.n_max + k_max > length)
    throw Error(ErrorCode::InvalidArgument, "round k exceeds the center horizon");

  CountOptions counting = options.counting;
  counting.eps = options.eps;
  const BallCounts counts = count_balls(bs, sampler, centers, n_values, k_max, counting);

  EmpiricalDimension out;
  std::vector<double> log_rho, log_formula, log_mc;
  double log_stable = 0.0;
  int done = 0;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const int n = n_values[i];
    for (; done < n; ++done) {
      const Point& p = c.orbit[static_cast<std::size_t>(done)].p;
      log_stable += std::log(std::abs(fiber_derivative(map, p(0), p(1))));
    }
    DimensionRow row;
    row.n = n;
    row.k = ks[i];
    row.rho = options.eps * std::exp(log_stable);
    row.hits = counts.at(0, i, row.k);
    if (row.hits < static_cast<std::uint64_t>(options.min_hits))
      throw Error(ErrorCode::InsufficientSamples,
                  "ball (n=" + std::to_string(n) + ", k=" + std::to_string(row.k) + ") collected " +
                      std::to_string(row.hits) + " samples");
    row.log_mu_formula = log_ball_measure(gm, map, c.orbit, n, row.k);
    row.log_mu_mc = std::log(counts.fraction(0, i, row.k));
    log_rho.push_back(std::log(row.rho));
    log_formula.push_back(row.log_mu_formula);
    log_mc.push_back(row.log_mu_mc);
    row.slope_partial = log_rho.size() < 2 ? row.log_mu_mc / log_rho.back()
                                           : fit_line(log_rho, log_mc).slope;
    out.rows.push_back(row);
  }
  const LinearFit mc = fit_line(log_rho, log_mc);
  const LinearFit formula = fit_line(log_rho, log_formula);
  out.slope = mc.slope;
  out.standard_error = mc.standard_error;
  out.slope_formula = formula.slope;
  out.half_width = 2.0 * mc.standard_error + std::abs(formula.slope - mc.slope);
  return out;
}

ComparabilityResult comparability_grid(const GibbsModel& gm, const BasicSetModel& bs,
                                       const ComparabilityOptions& options) {
  if (options.n_max < 0 || options.k_max < 1 || options.centers < 1)
    throw Error(ErrorCode::InvalidArgument, "empty comparability grid");
  const GibbsSampler sampler(bs, gm.potential, options.sampler_depth, past_digits_for(bs));
  const int length = options.n_max + options.k_max + 1;
  const std::vector<CenterOrbit> centers =
      sample_centers(bs, sampler, options.centers, length, options.counting.seed);
  std::vector<int> n_values;
  for (int n = 0; n <= options.n_max; ++n) n_values.push_back(n);
  CountOptions counting = options.counting;
  counting.eps = options.eps;
  const BallCounts counts = count_balls(bs, sampler, centers, n_values, options.k_max, counting);

  ComparabilityResult out;
  out.samples = counts.samples;
  for (std::size_t ci = 0; ci < centers.size(); ++ci) {
    for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
      for (int k = 1; k <= options.k_max; ++k) {
        ComparabilityCell cell;
        cell.center = static_cast<int>(ci);
        cell.n = n_values[ni];
        cell.k = k;
        cell.hits = counts.at(ci, ni, k);
        cell.log_formula = log_ball_measure(gm, bs.map(), centers[ci].orbit, cell.n, k);
        cell.log_mc = cell.hits == 0 ? -std::numeric_limits<double>::infinity()
                                     : std::log(counts.fraction(ci, ni, k));
        const double gap = std::abs(cell.log_formula - cell.log_mc);
        out.worst_ratio = std::max(out.worst_ratio, std::exp(gap));
        out.cells.push_back(cell);
      }
    }
  }
  return out;
}

namespace {

JacobianEstimate summarize(int m, const std::vector<double>& log_ratios) {
  JacobianEstimate est;
  est.m = m;
  est.trials = static_cast<int>(log_ratios.size());
  if (log_ratios.empty()) return est;
  double mean = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double r : log_ratios) {
    mean += r;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  est.geometric_mean = std::exp(mean / log_ratios.size());
  est.min_ratio = std::exp(lo);
  est.max_ratio = std::exp(hi);
  est.spread = std::exp(hi - lo);
  return est;
}

}  // namespace

JacobianEstimate jacobian_estimate(const GibbsModel& gm, const BasicSetModel& bs, int m,
                                   int trials, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "Jacobian iterate must be >= 1");
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "no Jacobian trials");
  const GibbsSampler sampler(bs, gm.potential, 12, past_digits_for(bs));
  const int n_top = 6;
  const int k_top = m + 6;
  const auto centers = sample_centers(bs, sampler, trials, n_top + m + k_top + 1, seed);
  Rng rng(derive_seed(seed, 0x7ac0b1ULL));
  std::vector<double> log_ratios;
  for (const CenterOrbit& c : centers) {
    const int n = static_cast<int>(rng.below(n_top + 1));
    const int k = m + static_cast<int>(rng.below(k_top - m + 1));
    log_ratios.push_back(log_ball_measure(gm, bs.map(), c.orbit, n + m, k - m) -
                         log_ball_measure(gm, bs.map(), c.orbit, n, k));
  }
  return summarize(m, log_ratios);
}

JacobianEstimate jacobian_from_counts(const ComparabilityResult& grid, int m,
                                      std::uint64_t min_hits) {
  std::vector<double> log_ratios;
  for (const ComparabilityCell& a : grid.cells) {
    if (a.hits < min_hits || a.k - m < 1) continue;
    for (const ComparabilityCell& b : grid.cells) {
      if (b.center == a.center && b.n == a.n + m && b.k == a.k - m) {
        if (b.hits >= min_hits) log_ratios.push_back(b.log_mc - a.log_mc);
        break;
      }
    }
  }
  return summarize(m, log_ratios);
}

std::vector<int> sample_preimage_counts(const BasicSetModel& bs, int samples, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x9e1a6eULL));
  const int depth = bs.map().is_product() ? 0 : bs.options().depth;
  std::vector<int> counts;
  counts.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    SolenoidPoint sp;
    sp.theta = kTwoPi * rng.uniform();
    for (int j = 0; j < depth; ++j)
      sp.word.push_back(static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(bs.degree()))));
    counts.push_back(preimage_census(bs, realize(bs, sp)).count());
  }
  return counts;
}

namespace {

// Pointwise dimension at x from the formula measure of round balls at two
// orders, which removes the eps offset.
double pointwise_delta(const GibbsModel& gm, const MapFamily& map, const OrbitPoint& x, int n1,
                       int n2) {
  const auto orbit = trace_orbit(map, x, n2 * 8 + 16);
  auto log_pair = [&](int n, double& log_mu, double& log_rho) {
    const int k = round_k(map, orbit, n);
    log_mu = log_ball_measure(gm, map, orbit, n, k);
    log_rho = 0.0;
    for (int j = 0; j < n; ++j) {
      const Point& p = orbit[static_cast<std::size_t>(j)].p;
      log_rho += std::log(std::abs(fiber_derivative(map, p(0), p(1))));
    }
  };
  double mu1, rho1, mu2, rho2;
  log_pair(n1, mu1, rho1);
  log_pair(n2, mu2, rho2);
  return (mu2 - mu1) / (rho2 - rho1);
}

}  // namespace

double typical_k_ratio(const GibbsModel& gm, const BasicSetModel& bs, int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "k ratio needs n >= 1");
  const GibbsSampler sampler(bs, gm.potential, 12, past_digits_for(bs));
  const auto centers = sample_centers(bs, sampler, 1, 0, seed);
  const auto orbit = trace_orbit(bs.map(), centers.front().orbit.front(), n * 8 + 16);
  return static_cast<double>(round_k(bs.map(), orbit, n)) / n;
}

DimensionReport classify_degree2(const BasicSetModel& bs, const ClassifyOptions& options) {
  if (bs.degree() != 2) throw Error(ErrorCode::InvalidArgument, "classification needs base degree 2");
  if (options.count_samples < 1) throw Error(ErrorCode::InvalidArgument, "no count samples");
  const MapFamily& map = bs.map();
  DimensionReport report;

  const std::vector<int> counts = sample_preimage_counts(bs, options.count_samples, options.seed);
  report.count_samples = static_cast<int>(counts.size());
  report.count_min = *std::min_element(counts.begin(), counts.end());
  report.count_max = *std::max_element(counts.begin(), counts.end());
  report.inconsistent_count = report.count_min != report.count_max;
  report.d_prime = report.count_max;
  if (report.d_prime < 1) throw Error(ErrorCode::NotOnBasicSet, "sampled point without preimage in Lambda");

  const EnsemblePair pair = build_ensemble_pair(bs, options.pressure_order);
  const GibbsModel gm = build_gibbs(pair, Potential::zero(), report.d_prime);
  const LyapunovExponents chi = lyapunov(gm);
  report.chi_s = chi.stable;
  report.chi_u = chi.unstable;
  report.entropy = entropy(gm);
  const BowenRoot root = bowen_root(*pair.current, report.d_prime);
  report.bowen_root = root.root;
  report.bowen_no_sign_change = root.no_sign_change;

  if (report.inconsistent_count) {
    report.regime = Regime::Generic;
  } else if (report.d_prime == 1) {
    report.regime = Regime::HomeomorphicLike;
  } else if (report.d_prime == 2 && std::abs(root.root) <= 1e-6) {
    report.regime = Regime::Expanding;
  } else {
    report.regime = Regime::Generic;
  }
  report.delta_formula =
      dimension_formula(report.entropy, report.chi_s, report.chi_u, report.d_prime, report.regime);

  const GibbsSampler sampler(bs, gm.potential, 12, past_digits_for(bs));
  const auto typical = sample_centers(bs, sampler, std::max(1, options.young_points), 0, options.seed);
  report.k_ratio_n = options.k_ratio_n;
  report.k_ratio = typical_k_ratio(gm, bs, options.k_ratio_n, options.seed);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const CenterOrbit& c : typical) {
    const double delta = pointwise_delta(gm, map, c.orbit.front(), 20, 40);
    lo = std::min(lo, delta);
    hi = std::max(hi, delta);
  }
  report.young_spread = hi - lo;
  report.hd_equals_delta = report.young_spread < options.young_threshold;

  if (options.empirical) {
    EmpiricalOptions emp = options.empirical_options;
    const EmpiricalDimension result = empirical_dimension(gm, bs, emp);
    report.delta_empirical = result.slope;
    report.delta_half_width = result.half_width;
    report.rows = result.rows;
  }
  return report;
}

}  // namespace saddle
