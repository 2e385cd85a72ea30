#include "saddle/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "saddle/acceptance.hpp"
#include "saddle/config.hpp"
#include "saddle/dimension.hpp"
#include "saddle/orbit.hpp"

namespace saddle {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";

/// Raised by a command once its outputs are written but the run must still
/// report a non-zero status.
struct Status {
  int code;
  std::string reason;
};

class Csv {
 public:
  explicit Csv(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  Csv& row() {
    rows_.emplace_back();
    return *this;
  }
  Csv& num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    rows_.back().push_back(buf);
    return *this;
  }
  Csv& integer(long long v) {
    rows_.back().push_back(std::to_string(v));
    return *this;
  }
  Csv& text(const std::string& v) {
    rows_.back().push_back(v);
    return *this;
  }

  std::string str() const {
    std::string out = "# ";
    for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
    out += "\n";
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
      out += "\n";
    }
    return out;
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct Outputs {
  std::filesystem::path dir;
  std::string command;

  void write(const std::string& name, const std::string& text) const {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + (dir / name).string());
    out << text;
  }
  void csv(const Csv& table) const { write(command + ".csv", table.str()); }
  void summary(const ordered_json& j) const { write("summary.json", j.dump(2) + "\n"); }
};

struct Job {
  ExperimentConfig cfg;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  Outputs out;
  std::ostream* log;

  std::uint64_t need_seed() const {
    if (!seed) throw Error(ErrorCode::InvalidConfig, "sampling.seed (or --seed) is required for " + out.command);
    return *seed;
  }

  CountOptions counting() const {
    CountOptions c;
    c.eps = cfg.sampling.eps_ball;
    c.samples = cfg.sampling.samples;
    c.seed = need_seed();
    c.threads = threads;
    return c;
  }
};

struct CountSummary {
  int d_prime = 0;
  int min = 0;
  int max = 0;
  int samples = 0;
  bool counted = false;
};

CountSummary resolve_d_prime(const Job& job, const BasicSetModel& bs) {
  CountSummary s;
  if (job.cfg.options.d_prime > 0) {
    s.d_prime = s.min = s.max = job.cfg.options.d_prime;
    return s;
  }
  const auto counts = sample_preimage_counts(bs, job.cfg.options.count_samples, job.need_seed());
  s.counted = true;
  s.samples = static_cast<int>(counts.size());
  s.min = *std::min_element(counts.begin(), counts.end());
  s.max = *std::max_element(counts.begin(), counts.end());
  s.d_prime = s.max;
  if (s.d_prime < 1) throw Error(ErrorCode::NotOnBasicSet, "sampled point without preimage in Lambda");
  if (s.min != s.max)
    *job.log << "warning: preimage count varies in [" << s.min << ", " << s.max << "]; using d' = " << s.max
             << "\n";
  return s;
}

ordered_json counts_json(const CountSummary& s) {
  return {{"d_prime", s.d_prime}, {"counted", s.counted}, {"count_min", s.min}, {"count_max", s.max},
          {"count_samples", s.samples}};
}

ordered_json pressure_json(const PressureEstimate& P) {
  return {{"value", P.value},
          {"order", P.order},
          {"diagnostic", P.diagnostic},
          {"method", P.method == PressureMethod::Periodic ? "periodic" : "transfer"},
          {"converged", P.converged}};
}

ordered_json admissibility_json(const Admissibility& a) {
  return {{"sup_phi", a.sup_phi}, {"margin", a.margin}, {"admissible", a.admissible}};
}

Regime regime_for(int d_prime, int degree) {
  if (d_prime == 1) return Regime::HomeomorphicLike;
  if (d_prime == degree) return Regime::Expanding;
  return Regime::Generic;
}

// The expanding branch (d' = d) bypasses admissibility, everything else
// needs phi + log d' < P(phi).
void require_admissible(const Admissibility& a, int d_prime, int degree, Status& status) {
  if (a.admissible || d_prime == degree) return;
  status = {kExitNotAdmissible, "potential not admissible: margin " + std::to_string(a.margin)};
}

// -- commands ---------------------------------------------------------------

Status cmd_pressure(const Job& job) {
  const BasicSetModel bs = job.cfg.basic_set();
  const int N = job.cfg.orders.pressure_n;
  const LinearPotential lin = linearize(job.cfg.potential);
  Csv table({"n", "P_n", "gap"});
  double previous = 0.0;
  PressureEstimate last;
  for (int n = 1; n <= N; ++n) {
    const PeriodicEnsemble ens = build_ensemble(bs, n);
    const double P = pressure_at(ens, lin);
    const double gap = n == 1 ? std::nan("") : std::abs(P - previous);
    table.row().integer(n).num(P).num(gap);
    previous = P;
    last.value = P;
    last.order = n;
    last.diagnostic = gap;
  }
  last.converged = last.diagnostic <= job.cfg.options.gap_threshold;
  job.out.csv(table);

  ordered_json summary = {{"command", "pressure"},
                          {"potential", describe(job.cfg.potential)},
                          {"pressure", pressure_json(last)}};
  if (base_only(bs.map(), job.cfg.potential)) {
    const PressureEstimate t = pressure_transfer(bs, job.cfg.potential, job.cfg.orders.grid_size);
    summary["transfer"] = pressure_json(t);
    summary["periodic_minus_transfer"] = last.value - t.value;
  }
  job.out.summary(summary);
  if (!last.converged) return {kExitNonConvergent, "Cauchy gap above gap_threshold"};
  return {kExitOk, ""};
}

Status cmd_lyapunov(const Job& job) {
  const BasicSetModel bs = job.cfg.basic_set();
  require_c_hyperbolic(bs);
  const CountSummary count = resolve_d_prime(job, bs);
  const int N = job.cfg.orders.pressure_n;
  Csv table({"n", "chi_s", "chi_u", "entropy", "pressure"});
  ordered_json summary = {{"command", "lyapunov"}, {"potential", describe(job.cfg.potential)}};
  for (int n = 2; n <= N; ++n) {
    const GibbsModel gm = build_gibbs(build_ensemble_pair(bs, n), job.cfg.potential, count.d_prime);
    const LyapunovExponents chi = lyapunov(gm);
    const double h = entropy(gm);
    table.row().integer(n).num(chi.stable).num(chi.unstable).num(h).num(gm.pressure.value);
    if (n == N) {
      summary["chi_s"] = chi.stable;
      summary["chi_u"] = chi.unstable;
      summary["entropy"] = h;
      summary["pressure"] = pressure_json(gm.pressure);
      summary["preimages"] = counts_json(count);
      summary["admissibility"] = admissibility_json(check_admissible(job.cfg.potential, count.d_prime, gm.pressure, bs));
    }
  }
  job.out.csv(table);
  job.out.summary(summary);
  return {kExitOk, ""};
}

void rows_table(const Job& job, const std::vector<DimensionRow>& rows) {
  Csv table({"n", "k", "rho", "log_mu_formula", "log_mu_mc", "slope_partial"});
  for (const DimensionRow& r : rows)
    table.row().integer(r.n).integer(r.k).num(r.rho).num(r.log_mu_formula).num(r.log_mu_mc).num(r.slope_partial);
  job.out.csv(table);
}

Status cmd_dimension(const Job& job) {
  const BasicSetModel bs = job.cfg.basic_set();
  require_c_hyperbolic(bs);
  const std::uint64_t seed = job.need_seed();
  const CountSummary count = resolve_d_prime(job, bs);
  const GibbsModel gm = build_gibbs(build_ensemble_pair(bs, job.cfg.orders.pressure_n), job.cfg.potential,
                                    count.d_prime);
  const Admissibility adm = check_admissible(job.cfg.potential, count.d_prime, gm.pressure, bs);
  Status status{kExitOk, ""};
  require_admissible(adm, count.d_prime, bs.degree(), status);
  if (status.code != kExitOk) {
    job.out.summary({{"command", "dimension"}, {"admissibility", admissibility_json(adm)}});
    return status;
  }
  const LyapunovExponents chi = lyapunov(gm);
  const double h = entropy(gm);
  const Regime regime = regime_for(count.d_prime, bs.degree());
  const double delta = dimension_formula(h, chi.stable, chi.unstable, count.d_prime, regime);

  EmpiricalOptions emp;
  emp.eps = job.cfg.sampling.eps_ball;
  emp.n_min = job.cfg.options.n_min;
  emp.n_max = job.cfg.options.n_max;
  emp.counting = job.counting();
  const EmpiricalDimension result = empirical_dimension(gm, bs, emp);
  rows_table(job, result.rows);

  job.out.summary({{"command", "dimension"},
                   {"potential", describe(job.cfg.potential)},
                   {"chi_s", chi.stable},
                   {"chi_u", chi.unstable},
                   {"entropy", h},
                   {"d_prime", count.d_prime},
                   {"delta_formula", delta},
                   {"delta_empirical", result.slope},
                   {"delta_half_width", result.half_width},
                   {"regime", to_string(regime)},
                   {"k_ratio", typical_k_ratio(gm, bs, job.cfg.options.k_ratio_n, seed)},
                   {"k_ratio_n", job.cfg.options.k_ratio_n},
                   {"pressure", pressure_json(gm.pressure)},
                   {"admissibility", admissibility_json(adm)},
                   {"preimages", counts_json(count)}});
  return status;
}

Status cmd_ball_measure(const Job& job) {
  const BasicSetModel bs = job.cfg.basic_set();
  require_c_hyperbolic(bs);
  const CountSummary count = resolve_d_prime(job, bs);
  const GibbsModel gm = build_gibbs(build_ensemble_pair(bs, job.cfg.orders.pressure_n), job.cfg.potential,
                                    count.d_prime);
  const Admissibility adm = check_admissible(job.cfg.potential, count.d_prime, gm.pressure, bs);
  Status status{kExitOk, ""};
  require_admissible(adm, count.d_prime, bs.degree(), status);
  if (status.code != kExitOk) {
    job.out.summary({{"command", "ball-measure"}, {"admissibility", admissibility_json(adm)}});
    return status;
  }
  ComparabilityOptions o;
  o.eps = job.cfg.sampling.eps_ball;
  o.n_max = job.cfg.options.n_max;
  o.k_max = job.cfg.options.k_max;
  o.centers = job.cfg.options.centers;
  o.counting = job.counting();
  const ComparabilityResult grid = comparability_grid(gm, bs, o);
  Csv table({"center", "n", "k", "log_mu_formula", "log_mu_mc", "hits"});
  for (const ComparabilityCell& c : grid.cells)
    table.row().integer(c.center).integer(c.n).integer(c.k).num(c.log_formula).num(c.log_mc).integer(
        static_cast<long long>(c.hits));
  job.out.csv(table);
  job.out.summary({{"command", "ball-measure"},
                   {"potential", describe(job.cfg.potential)},
                   {"d_prime", count.d_prime},
                   {"worst_ratio", grid.worst_ratio},
                   {"cells", grid.cells.size()},
                   {"samples", grid.samples},
                   {"admissibility", admissibility_json(adm)}});
  return status;
}

Status cmd_bowen_root(const Job& job) {
  const BasicSetModel bs = job.cfg.basic_set();
  require_c_hyperbolic(bs);
  const EnsemblePair pair = build_ensemble_pair(bs, job.cfg.orders.pressure_n);
  std::vector<int> d_values;
  if (job.cfg.options.d_prime > 0) {
    d_values.push_back(job.cfg.options.d_prime);
  } else {
    for (int d = 1; d <= bs.degree(); ++d) d_values.push_back(d);
  }
  Csv table({"d_prime", "root", "g_at_zero", "no_sign_change", "iterations"});
  ordered_json roots = ordered_json::array();
  for (int d : d_values) {
    const BowenRoot r = bowen_root(*pair.current, d);
    table.row().integer(d).num(r.root).num(r.g_at_zero).integer(r.no_sign_change).integer(r.iterations);
    roots.push_back({{"d_prime", d}, {"root", r.root}, {"g_at_zero", r.g_at_zero},
                     {"no_sign_change", r.no_sign_change}});
  }
  job.out.csv(table);
  job.out.summary({{"command", "bowen-root"}, {"order", job.cfg.orders.pressure_n}, {"roots", roots}});
  return {kExitOk, ""};
}

Status cmd_classify(const Job& job) {
  const BasicSetModel bs = job.cfg.basic_set();
  require_c_hyperbolic(bs);
  ClassifyOptions o;
  o.count_samples = job.cfg.options.count_samples;
  o.pressure_order = job.cfg.orders.pressure_n;
  o.k_ratio_n = job.cfg.options.k_ratio_n;
  o.empirical = job.cfg.options.empirical;
  o.seed = job.need_seed();
  o.empirical_options.eps = job.cfg.sampling.eps_ball;
  o.empirical_options.n_min = job.cfg.options.n_min;
  o.empirical_options.n_max = job.cfg.options.n_max;
  o.empirical_options.counting = job.counting();
  const DimensionReport r = classify_degree2(bs, o);
  rows_table(job, r.rows);
  ordered_json summary = {{"command", "classify"},
                          {"chi_s", r.chi_s},
                          {"chi_u", r.chi_u},
                          {"entropy", r.entropy},
                          {"d_prime", r.d_prime},
                          {"regime", to_string(r.regime)},
                          {"delta", r.delta_formula},
                          {"delta_formula", r.delta_formula},
                          {"delta_is_lower_bound", r.inconsistent_count},
                          {"delta_empirical", r.delta_empirical},
                          {"delta_half_width", r.delta_half_width},
                          {"k_ratio", r.k_ratio},
                          {"k_ratio_n", r.k_ratio_n},
                          {"bowen_root", r.bowen_root},
                          {"bowen_no_sign_change", r.bowen_no_sign_change},
                          {"count_min", r.count_min},
                          {"count_max", r.count_max},
                          {"count_samples", r.count_samples},
                          {"young_spread", r.young_spread},
                          {"hd_equals_delta", r.hd_equals_delta}};
  job.out.summary(summary);
  return {kExitOk, ""};
}

Status cmd_jacobian(const Job& job) {
  const BasicSetModel bs = job.cfg.basic_set();
  require_c_hyperbolic(bs);
  const std::uint64_t seed = job.need_seed();
  const CountSummary count = resolve_d_prime(job, bs);
  const GibbsModel gm = build_gibbs(build_ensemble_pair(bs, job.cfg.orders.pressure_n), job.cfg.potential,
                                    count.d_prime);
  const Admissibility adm = check_admissible(job.cfg.potential, count.d_prime, gm.pressure, bs);
  Status status{kExitOk, ""};
  require_admissible(adm, count.d_prime, bs.degree(), status);
  if (status.code != kExitOk) {
    job.out.summary({{"command", "jacobian"}, {"admissibility", admissibility_json(adm)}});
    return status;
  }
  std::optional<ComparabilityResult> grid;
  if (job.cfg.options.empirical) {
    ComparabilityOptions o;
    o.eps = job.cfg.sampling.eps_ball;
    o.n_max = job.cfg.options.n_max;
    o.k_max = job.cfg.options.k_max;
    o.centers = job.cfg.options.centers;
    o.counting = job.counting();
    grid = comparability_grid(gm, bs, o);
  }
  Csv table({"m", "target", "formula_mean", "formula_spread", "mc_mean", "mc_spread", "mc_pairs"});
  ordered_json rows = ordered_json::array();
  for (int m : job.cfg.options.m_values) {
    const double target = std::pow(static_cast<double>(count.d_prime), m);
    const JacobianEstimate f = jacobian_estimate(gm, bs, m, job.cfg.options.trials, seed);
    JacobianEstimate mc;
    if (grid) mc = jacobian_from_counts(*grid, m);
    const double nan = std::nan("");
    table.row()
        .integer(m)
        .num(target)
        .num(f.geometric_mean)
        .num(f.spread)
        .num(mc.trials ? mc.geometric_mean : nan)
        .num(mc.trials ? mc.spread : nan)
        .integer(mc.trials);
    ordered_json row = {{"m", m}, {"target", target}, {"formula_mean", f.geometric_mean},
                        {"formula_spread", f.spread}};
    if (mc.trials) {
      row["mc_mean"] = mc.geometric_mean;
      row["mc_spread"] = mc.spread;
    }
    row["mc_pairs"] = mc.trials;
    rows.push_back(row);
  }
  job.out.csv(table);
  job.out.summary({{"command", "jacobian"},
                   {"potential", describe(job.cfg.potential)},
                   {"d_prime", count.d_prime},
                   {"rows", rows},
                   {"admissibility", admissibility_json(adm)}});
  return status;
}

Status cmd_verify(const Job& job) {
  AcceptanceOptions o;
  o.seed = job.need_seed();
  o.threads = job.threads;
  o.on_result = [&](const CriterionResult& r) { *job.log << summary_line(r) << "\n" << std::flush; };
  const AcceptanceReport report = run_acceptance(o);
  job.out.write("verify.csv", report.data);
  ordered_json criteria = ordered_json::array();
  for (const CriterionResult& r : report.results)
    criteria.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed()}});
  job.out.summary({{"command", "verify"}, {"passed", report.all_passed()}, {"criteria", criteria}});
  if (!report.all_passed()) return {kExitFailure, "acceptance suite failed"};
  return {kExitOk, ""};
}

struct Command {
  const char* name;
  Status (*run)(const Job&);
};

const Command kCommands[] = {
    {"pressure", cmd_pressure},     {"lyapunov", cmd_lyapunov}, {"dimension", cmd_dimension},
    {"ball-measure", cmd_ball_measure}, {"bowen-root", cmd_bowen_root}, {"classify", cmd_classify},
    {"jacobian", cmd_jacobian},     {"verify", cmd_verify},
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NotAttracting:
    case ErrorCode::Superattracting:
    case ErrorCode::CriticalOnSet:
    case ErrorCode::PeriodTooLarge:
    case ErrorCode::NotBaseOnly:
      return kExitInvalidConfig;
    case ErrorCode::ConeCollapse:
    case ErrorCode::DepthInsufficient:
    case ErrorCode::AmbiguousMembership:
    case ErrorCode::NewtonDiverged:
    case ErrorCode::InsufficientSamples:
    case ErrorCode::DegenerateExponents:
    case ErrorCode::SignViolation:
      return kExitNonConvergent;
    case ErrorCode::NotOnBasicSet:
    case ErrorCode::NotNormalized:
      return kExitFailure;
  }
  return kExitFailure;
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void write_manifest(const Job& job, const std::optional<ExperimentConfig>& cfg, int code) {
  ordered_json m = {{"command", job.out.command},
                    {"version", kVersion},
                    {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                  "." + std::to_string(EIGEN_MINOR_VERSION)},
                    {"compiler", __VERSION__},
                    {"seed", job.seed ? json(*job.seed) : json(nullptr)},
                    {"threads", job.threads},
                    {"config", cfg ? ordered_json::parse(dump_config(*cfg)) : ordered_json(nullptr)},
                    {"exit_code", code},
                    {"timestamp", timestamp()}};
  job.out.write("manifest.json", m.dump(2) + "\n");
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const Command& c : kCommands) v.push_back(c.name);
    return v;
  }();
  return names;
}

int run(const RunRequest& request, std::ostream& log) {
  const Command* command = nullptr;
  for (const Command& c : kCommands)
    if (request.command == c.name) command = &c;
  if (!command) {
    log << "error: unknown command " << request.command << "\n";
    return kExitInvalidConfig;
  }
  if (request.threads < 1) {
    log << "error: --threads must be >= 1\n";
    return kExitInvalidConfig;
  }

  Job job;
  job.threads = request.threads;
  job.log = &log;
  job.out.command = request.command;
  job.out.dir = request.out_dir;
  std::optional<ExperimentConfig> cfg;
  int code = kExitOk;
  const auto start = std::chrono::steady_clock::now();
  try {
    std::filesystem::create_directories(job.out.dir);
    if (!request.config_path.empty()) {
      cfg = load_config(request.config_path);
    } else if (request.command != "verify") {
      throw Error(ErrorCode::InvalidConfig, "--config is required for " + request.command);
    }
    if (cfg) job.cfg = *cfg;
    job.seed = request.seed ? request.seed : job.cfg.sampling.seed;
    if (cfg) cfg->sampling.seed = job.seed;
    const Status status = command->run(job);
    code = status.code;
    if (code != kExitOk) log << "error: " << status.reason << "\n";
  } catch (const Error& e) {
    code = exit_code_for(e.code());
    log << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    code = kExitFailure;
    log << "error: " << e.what() << "\n";
  }
  try {
    write_manifest(job, cfg, code);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    if (code == kExitOk) code = kExitFailure;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", seconds);
  log << request.command << " finished with exit code " << code << " in " << buf << " s\n";
  return code;
}

}  // namespace saddle
