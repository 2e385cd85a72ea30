#pragma once

#include <string>
#include <vector>

#include "saddle/sampling.hpp"
#include "saddle/thermo.hpp"

namespace saddle {

/// B(n, k, z, eps) = f^n(B_{n+k}(z, eps)).
struct IteratedBall {
  Point z;
  int n = 0;
  int k = 0;
  double eps = 0.5;
};

/// exp(S_{n+k} phi-bar(z)) / d'^k. Throws NotOnBasicSet or NotNormalized.
double ball_measure(const GibbsModel& gm, const IteratedBall& ball, const BasicSetModel& bs);

/// Same along a precomputed orbit x_0, x_1, ... (length >= n + k).
double log_ball_measure(const GibbsModel& gm, const MapFamily& map,
                        const std::vector<OrbitPoint>& orbit, int n, int k);

/// The k >= 0 minimizing |S_n log|Dfs|(z) + S_k log|Dfu|(f^n z)|, ties to the
/// smaller k.
int round_k(const BasicSetModel& bs, const Point& z, int n);
int round_k(const MapFamily& map, const std::vector<OrbitPoint>& orbit, int n);

enum class Regime { HomeomorphicLike, Generic, Expanding };

std::string to_string(Regime regime);

/// h (1/chi_u - 1/chi_s) + log d' / chi_s, or h / chi_u when expanding.
/// Throws DegenerateExponents.
double dimension_formula(double h, double chi_s, double chi_u, int d_prime, Regime regime);

/// Typical centers drawn from the sampler with their exact orbits.
std::vector<CenterOrbit> sample_centers(const BasicSetModel& bs, const GibbsSampler& sampler,
                                        int count, int length, std::uint64_t seed);

struct DimensionRow {
  int n = 0;
  int k = 0;
  double rho = 0.0;
  double log_mu_formula = 0.0;
  double log_mu_mc = 0.0;
  double slope_partial = 0.0;
  std::uint64_t hits = 0;
};

struct EmpiricalDimension {
  double slope = 0.0;          // Monte Carlo slope of log mu against log rho
  double half_width = 0.0;     // 2 standard errors plus the formula/MC slope gap
  double slope_formula = 0.0;  // same regression on the formula values
  double standard_error = 0.0;
  std::vector<DimensionRow> rows;
};

struct EmpiricalOptions {
  double eps = 0.5;
  int n_min = 1;
  int n_max = 8;
  CountOptions counting{};
  int sampler_depth = 12;
  int min_hits = 20;
};

/// Round balls at a Gibbs-typical center for n in [n_min, n_max] with
/// rho = eps |Df^n_s(z)|. Throws InsufficientSamples when a ball collects
/// fewer than min_hits samples.
EmpiricalDimension empirical_dimension(const GibbsModel& gm, const BasicSetModel& bs,
                                       const EmpiricalOptions& options);

/// Formula against Monte Carlo over centers x n x k.
struct ComparabilityCell {
  int center = 0;
  int n = 0;
  int k = 0;
  double log_formula = 0.0;
  double log_mc = 0.0;
  std::uint64_t hits = 0;
};

struct ComparabilityResult {
  std::vector<ComparabilityCell> cells;
  double worst_ratio = 0.0;  // max over cells of max(r, 1/r); infinite if a cell is empty
  std::uint64_t samples = 0;
};

struct ComparabilityOptions {
  double eps = 0.5;
  int n_max = 12;
  int k_max = 12;
  int centers = 30;
  CountOptions counting{};
  int sampler_depth = 12;
};

ComparabilityResult comparability_grid(const GibbsModel& gm, const BasicSetModel& bs,
                                       const ComparabilityOptions& options);

struct JacobianEstimate {
  int m = 0;
  double geometric_mean = 0.0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double spread = 0.0;  // max / min
  int trials = 0;
};

/// mu(f^m A) / mu(A) over random iterated balls A = B(n, k) with the
/// formula measure on (n + m, k - m) and (n, k).
JacobianEstimate jacobian_estimate(const GibbsModel& gm, const BasicSetModel& bs, int m,
                                   int trials, std::uint64_t seed);

/// Same ratio read off Monte Carlo counts of a comparability grid; cells
/// with fewer than min_hits hits are skipped.
JacobianEstimate jacobian_from_counts(const ComparabilityResult& grid, int m,
                                      std::uint64_t min_hits = 100);

/// Least-squares slope and its standard error.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double standard_error = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct DimensionReport {
  double chi_s = 0.0;
  double chi_u = 0.0;
  double entropy = 0.0;
  int d_prime = 0;
  double delta_formula = 0.0;
  double delta_empirical = 0.0;
  double delta_half_width = 0.0;
  Regime regime = Regime::Generic;
  double k_ratio = 0.0;          // round_k(z, n) / n
  int k_ratio_n = 30;
  double bowen_root = 0.0;
  bool bowen_no_sign_change = false;
  int count_min = 0;
  int count_max = 0;
  int count_samples = 0;
  bool inconsistent_count = false;  // delta_formula is then a lower bound
  double young_spread = 0.0;        // max - min of pointwise delta at typical points
  bool hd_equals_delta = false;
  std::vector<DimensionRow> rows;   // empirical regression rows
};

struct ClassifyOptions {
  int count_samples = 100;
  int pressure_order = 16;
  int young_points = 10;
  double young_threshold = 0.02;
  int k_ratio_n = 30;
  bool empirical = true;
  EmpiricalOptions empirical_options{};
  std::uint64_t seed = 1;
};

/// Degree-2 dichotomy: d' = 1 gives the homeomorphic-like formula, d' = 2 the
/// expanding one (after checking that the Bowen root is 0). A non-constant
/// sampled count falls back to the lower bound with d' = observed max.
DimensionReport classify_degree2(const BasicSetModel& bs, const ClassifyOptions& options = {});

/// round_k(z, n) / n at a Gibbs-typical center of gm.
double typical_k_ratio(const GibbsModel& gm, const BasicSetModel& bs, int n, std::uint64_t seed);

/// Sampled preimage counts over points of Lambda (no ambiguity check).
std::vector<int> sample_preimage_counts(const BasicSetModel& bs, int samples, std::uint64_t seed);

}  // namespace saddle
