#include "saddle/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "saddle/dimension.hpp"

namespace saddle {

namespace {

using Clock = std::chrono::steady_clock;

// Closed forms for the product map with c = 0.1.
const double kLog2 = std::log(2.0);
const double kChiS = std::log(1.0 - std::sqrt(0.6));  // log|2 p0|
const double kHomeoDelta = 1.0 + kLog2 / -kChiS;

std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Check within(std::string quantity, double value, double target, double tol) {
  return {std::move(quantity), value, target - tol, target + tol};
}

Check at_most(std::string quantity, double value, double bound) {
  return {std::move(quantity), value, -std::numeric_limits<double>::infinity(), bound};
}

Check flag(std::string quantity, bool value) { return {std::move(quantity), value ? 1.0 : 0.0, 1.0, 1.0}; }

Check ratio_within(std::string quantity, double value, double target, double factor) {
  return {std::move(quantity), value / target, 1.0 / factor, factor};
}

BasicSetModel product_set() { return BasicSetModel(MapFamily::product(0.1)); }

BasicSetModel perturbed_set(double tol = 1e-6) {
  Perturbation q;
  q.b = 1.0;
  BasicSetOptions o;
  o.tol = tol;
  return BasicSetModel(MapFamily::perturbed(0.1, q, 1e-3), o);
}

struct Context {
  std::uint64_t seed = 1;
  int threads = 1;
  BasicSetModel product = product_set();
  BasicSetModel perturbed = perturbed_set();
  EnsemblePair product_pair;
  EnsemblePair perturbed_pair;
  DimensionReport product_report;
  ComparabilityResult zero_grid;
  bool have_report = false;
  bool have_grid = false;

  CountOptions counting(std::uint64_t samples, std::uint64_t stream) const {
    CountOptions c;
    c.samples = samples;
    c.seed = derive_seed(seed, stream);
    c.threads = threads;
    return c;
  }

  const EnsemblePair& product18() {
    if (!product_pair.current) product_pair = build_ensemble_pair(product, 18);
    return product_pair;
  }

  const EnsemblePair& perturbed16() {
    if (!perturbed_pair.current) perturbed_pair = build_ensemble_pair(perturbed, 16);
    return perturbed_pair;
  }

  const DimensionReport& product_classification() {
    if (!have_report) {
      ClassifyOptions o;
      o.seed = seed;
      o.empirical_options.n_max = 8;
      o.empirical_options.counting = counting(1 << 24, 5);
      product_report = classify_degree2(product, o);
      have_report = true;
    }
    return product_report;
  }

  const ComparabilityResult& grid_zero() {
    if (!have_grid) {
      const GibbsModel gm = build_gibbs(product18(), Potential::zero(), 2);
      ComparabilityOptions o;
      o.counting = counting(1 << 22, 7);
      zero_grid = comparability_grid(gm, product, o);
      have_grid = true;
    }
    return zero_grid;
  }
};

void pressure_baseline(Context& ctx, CriterionResult& r) {
  const auto start = Clock::now();
  const PressureEstimate P = pressure_periodic(ctx.product, Potential::zero(), 20);
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  r.checks.push_back(within("P20(Zero)", P.value, kLog2, 1e-6));
  Check t = at_most("runtime_s", seconds, 10.0);
  t.timing = true;
  r.checks.push_back(t);
}

void oracle_agreement(Context& ctx, CriterionResult& r) {
  const Potential phi = Potential::angle_harmonic(0.1);
  const PressureEstimate periodic = pressure_periodic(ctx.product18(), phi);
  const PressureEstimate transfer = pressure_transfer(ctx.product, phi, 2048);
  r.checks.push_back(within("P18-Ptransfer", periodic.value - transfer.value, 0.0, 1e-4));
}

void exact_exponents(Context& ctx, CriterionResult& r) {
  const GibbsModel gm = build_gibbs(ctx.product18(), Potential::zero(), 2);
  const LyapunovExponents chi = lyapunov(gm);
  r.checks.push_back(within("chi_u", chi.unstable, kLog2, 1e-8));
  r.checks.push_back(within("chi_s", chi.stable, kChiS, 1e-6));
}

void bowen(Context& ctx, CriterionResult& r) {
  const BowenRoot two = bowen_root(*ctx.product18().current, 2);
  const BowenRoot one = bowen_root(*ctx.product18().current, 1);
  r.checks.push_back(within("root(d'=2)", two.root, 0.0, 1e-6));
  r.checks.push_back(within("root(d'=1)", one.root, kLog2 / -kChiS, 1e-6));
}

void expanding(Context& ctx, CriterionResult& r) {
  const DimensionReport& rep = ctx.product_classification();
  r.checks.push_back(within("d'", rep.d_prime, 2, 0));
  r.checks.push_back(flag("regime=expanding", rep.regime == Regime::Expanding));
  r.checks.push_back(within("delta_formula", rep.delta_formula, 1.0, 5e-4));
  r.checks.push_back(within("empirical_slope", rep.delta_empirical, 1.0, 0.05));
}

void homeomorphic(Context& ctx, CriterionResult& r) {
  ClassifyOptions o;
  o.seed = ctx.seed;
  o.empirical_options.n_max = 4;
  o.empirical_options.counting = ctx.counting(1 << 21, 6);
  const DimensionReport rep = classify_degree2(ctx.perturbed, o);
  r.checks.push_back(within("min count", rep.count_min, 1, 0));
  r.checks.push_back(within("max count", rep.count_max, 1, 0));
  r.checks.push_back(within("count samples", rep.count_samples, 100, 0));
  r.checks.push_back(flag("regime=homeomorphic-like", rep.regime == Regime::HomeomorphicLike));
  r.checks.push_back(at_most("|delta_formula-delta_empirical|/delta_formula",
                             std::abs(rep.delta_formula - rep.delta_empirical) / rep.delta_formula, 0.1));
  r.checks.push_back(ratio_within("delta_formula/1.4652", rep.delta_formula, kHomeoDelta, 1.05));
  r.checks.back().lower = 0.95;
}

void comparability(Context& ctx, CriterionResult& r) {
  r.checks.push_back(at_most("C(Zero)", ctx.grid_zero().worst_ratio, 10.0));
  const GibbsModel gm = build_gibbs(ctx.product18(), Potential::angle_harmonic(0.1), 2);
  ComparabilityOptions o;
  o.counting = ctx.counting(1 << 22, 8);
  const ComparabilityResult grid = comparability_grid(gm, ctx.product, o);
  r.checks.push_back(at_most("C(AngleHarmonic 0.1)", grid.worst_ratio, 10.0));
}

void round_ball(Context& ctx, CriterionResult& r) {
  const DimensionReport& rep = ctx.product_classification();
  Check c = ratio_within("k(z,30)/30 / 2.1494", rep.k_ratio, -kChiS / kLog2, 1.05);
  c.lower = 0.95;
  r.checks.push_back(c);
}

void jacobian(Context& ctx, CriterionResult& r) {
  const double factor = std::sqrt(10.0);
  const GibbsModel two = build_gibbs(ctx.product18(), Potential::zero(), 2);
  const GibbsModel one = build_gibbs(ctx.perturbed16(), Potential::zero(), 1);
  ComparabilityOptions small;
  small.n_max = 4;
  small.k_max = 7;
  small.centers = 3;
  small.counting = ctx.counting(1 << 20, 9);
  const ComparabilityResult grid_one = comparability_grid(one, ctx.perturbed, small);
  for (int m = 1; m <= 3; ++m) {
    const std::string tag = "(m=" + std::to_string(m) + ")";
    const double target2 = std::pow(2.0, m);
    r.checks.push_back(ratio_within("J formula d'=2" + tag,
                                    jacobian_estimate(two, ctx.product, m, 50, ctx.seed).geometric_mean,
                                    target2, factor));
    r.checks.push_back(ratio_within("J Monte Carlo d'=2" + tag,
                                    jacobian_from_counts(ctx.grid_zero(), m).geometric_mean, target2,
                                    factor));
    r.checks.push_back(ratio_within("J formula d'=1" + tag,
                                    jacobian_estimate(one, ctx.perturbed, m, 50, ctx.seed).geometric_mean,
                                    1.0, factor));
    r.checks.push_back(ratio_within("J Monte Carlo d'=1" + tag,
                                    jacobian_from_counts(grid_one, m).geometric_mean, 1.0, factor));
  }
}

void cylinder_comparability(Context& ctx, CriterionResult& r) {
  Rng rng(derive_seed(ctx.seed, 10));
  auto word = [&](std::size_t length) {
    std::vector<std::uint8_t> w(length);
    for (auto& s : w) s = static_cast<std::uint8_t>(rng.below(2));
    return w;
  };
  const std::pair<const char*, Potential> fixtures[] = {{"C(Zero)", Potential::zero()},
                                                       {"C(AngleHarmonic 0.1)", Potential::angle_harmonic(0.1)}};
  for (const auto& [label, phi] : fixtures) {
    const double P = pressure_transfer(ctx.product, phi, 2048).value;
    double worst = 1.0;
    for (int trial = 0; trial < 100; ++trial) {
      auto u = word(1 + rng.below(8));
      auto v = word(1 + rng.below(8));
      // Disjoint cylinders: neither word may be a prefix of the other.
      const std::size_t common = std::min(u.size(), v.size());
      const std::size_t j = rng.below(common);
      v[j] = static_cast<std::uint8_t>(1 - u[j]);
      const auto tail = word(1 + rng.below(8));
      const double ratio = cylinder_comparability(ctx.product, phi, P, u, v, tail);
      worst = std::max(worst, std::max(ratio, 1.0 / ratio));
    }
    r.checks.push_back(at_most(label, worst, 10.0));
  }
}

void fallback(Context& ctx, CriterionResult& r) {
  ClassifyOptions o;
  o.seed = ctx.seed;
  o.empirical_options.n_max = 4;
  o.empirical_options.counting = ctx.counting(1 << 21, 11);
  const DimensionReport rep = classify_degree2(perturbed_set(9e-3), o);
  r.checks.push_back(flag("inconsistent count", rep.inconsistent_count));
  r.checks.push_back(at_most("lower_bound-empirical_slope", rep.delta_formula - rep.delta_empirical, 0.05));
}

struct Criterion {
  int id;
  const char* name;
  void (*run)(Context&, CriterionResult&);
};

const Criterion kCriteria[] = {
    {1, "pressure baseline", pressure_baseline},
    {2, "oracle agreement", oracle_agreement},
    {3, "exact exponents", exact_exponents},
    {4, "bowen root", bowen},
    {5, "dimension expanding case", expanding},
    {6, "dimension homeomorphic case", homeomorphic},
    {7, "ball comparability", comparability},
    {8, "round-ball ratio", round_ball},
    {9, "jacobian", jacobian},
    {10, "cylinder comparability", cylinder_comparability},
    {11, "preimage-count fallback", fallback},
};

std::vector<CriterionResult> run_core(const AcceptanceOptions& options, bool report) {
  Context ctx;
  ctx.seed = options.seed;
  ctx.threads = options.threads;
  std::vector<CriterionResult> results;
  for (const Criterion& c : kCriteria) {
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    const auto start = Clock::now();
    try {
      c.run(ctx, r);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (report && options.on_result) options.on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace

bool CriterionResult::passed() const {
  if (!error.empty() || checks.empty()) return false;
  for (const Check& c : checks)
    if (!c.passed()) return false;
  return true;
}

bool AcceptanceReport::all_passed() const {
  for (const CriterionResult& r : results)
    if (!r.passed()) return false;
  return !results.empty();
}

std::string acceptance_csv(const std::vector<CriterionResult>& results) {
  std::string out = "# criterion,name,quantity,value,lower,upper,pass\n";
  for (const CriterionResult& r : results) {
    if (!r.error.empty()) {
      out += std::to_string(r.id) + "," + r.name + ",error,nan,nan,nan,0\n";
      continue;
    }
    for (const Check& c : r.checks) {
      if (c.timing) continue;
      out += std::to_string(r.id) + "," + r.name + ",\"" + c.quantity + "\"," + format(c.value) + "," +
             format(c.lower) + "," + format(c.upper) + "," + (c.passed() ? "1" : "0") + "\n";
    }
  }
  return out;
}

std::string summary_line(const CriterionResult& r) {
  std::string line = std::string(r.passed() ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name;
  if (!r.error.empty()) return line + ": " + r.error;
  line += ":";
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    const Check& c = r.checks[i];
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s %s=%.9g in [%.9g, %.9g]", i ? ";" : "", c.quantity.c_str(), c.value,
                  c.lower, c.upper);
    line += buf;
  }
  char tail[40];
  std::snprintf(tail, sizeof tail, " (%.2f s)", r.seconds);
  return line + tail;
}

AcceptanceReport run_acceptance(const AcceptanceOptions& options) {
  const auto start = Clock::now();
  AcceptanceReport report;
  report.results = run_core(options, true);
  report.data = acceptance_csv(report.results);
  if (options.determinism) {
    CriterionResult r;
    r.id = 12;
    r.name = "determinism";
    try {
      const std::string again = acceptance_csv(run_core(options, false));
      r.checks.push_back(flag("identical data bytes", again == report.data));
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    Check t = at_most("suite_runtime_s", r.seconds, 300.0);
    t.timing = true;
    r.checks.push_back(t);
    if (options.on_result) options.on_result(r);
    report.results.push_back(std::move(r));
  }
  return report;
}

}  // namespace saddle
