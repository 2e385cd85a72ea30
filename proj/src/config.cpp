#include "saddle/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace saddle {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

void only_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) fail(where + " must be an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) fail("unknown key " + where + "." + item.key());
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where + " must be finite");
  return v;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where + " must be an integer");
  return j.get<int>();
}

std::uint64_t unsigned64(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return j.get<std::uint64_t>();
  if (j.is_string()) {
    // Seeds above 2^53 survive JSON tooling only as strings.
    const std::string s = j.get<std::string>();
    std::size_t used = 0;
    try {
      const std::uint64_t v = std::stoull(s, &used, 0);
      if (used == s.size() && !s.empty() && s[0] != '-') return v;
    } catch (const std::exception&) {
    }
  }
  fail(where + " must be a non-negative integer");
}

cplx complex_value(const json& j, const std::string& where) {
  if (j.is_number()) return {number(j, where), 0.0};
  if (j.is_array() && j.size() == 2) return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
  fail(where + " must be a number or [re, im]");
}

json complex_json(cplx v) { return json::array({v.real(), v.imag()}); }

Potential parse_potential(const json& j, const std::string& where) {
  only_keys(j, where, {"variant", "value", "terms"});
  if (!j.contains("variant") || !j["variant"].is_string()) fail(where + ".variant missing");
  const std::string variant = j["variant"].get<std::string>();
  auto value = [&]() {
    if (!j.contains("value")) fail(where + ".value missing for " + variant);
    return number(j["value"], where + ".value");
  };
  auto no_extra = [&](const char* key) {
    if (j.contains(key)) fail(where + "." + key + " not used by " + variant);
  };
  if (variant == "Sum") {
    no_extra("value");
    if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty())
      fail(where + ".terms must be a non-empty array");
    std::vector<Potential> terms;
    for (std::size_t i = 0; i < j["terms"].size(); ++i)
      terms.push_back(parse_potential(j["terms"][i], where + ".terms[" + std::to_string(i) + "]"));
    return Potential::sum(std::move(terms));
  }
  no_extra("terms");
  if (variant == "Zero") {
    no_extra("value");
    return Potential::zero();
  }
  if (variant == "Constant") return Potential::constant(value());
  if (variant == "StableLog") return Potential::stable_log(value());
  if (variant == "UnstableLog") return Potential::unstable_log(value());
  if (variant == "AngleHarmonic") return Potential::angle_harmonic(value());
  fail(where + ".variant " + variant + " is not in the closed family");
}

json potential_json(const Potential& phi) {
  switch (phi.kind) {
    case PotentialKind::Zero: return {{"variant", "Zero"}};
    case PotentialKind::Constant: return {{"variant", "Constant"}, {"value", phi.value}};
    case PotentialKind::StableLog: return {{"variant", "StableLog"}, {"value", phi.value}};
    case PotentialKind::UnstableLog: return {{"variant", "UnstableLog"}, {"value", phi.value}};
    case PotentialKind::AngleHarmonic: return {{"variant", "AngleHarmonic"}, {"value", phi.value}};
    case PotentialKind::Sum: {
      json terms = json::array();
      for (const Potential& t : phi.terms) terms.push_back(potential_json(t));
      return {{"variant", "Sum"}, {"terms", terms}};
    }
  }
  return {};
}

MapFamily parse_map(const json& j) {
  only_keys(j, "map", {"family", "c", "a", "b", "dd", "e", "eps", "base_degree"});
  if (!j.contains("family") || !j["family"].is_string()) fail("map.family missing");
  if (!j.contains("c")) fail("map.c missing");
  const std::string family = j["family"].get<std::string>();
  const cplx c = complex_value(j["c"], "map.c");
  MapFamily map;
  if (family == "Product") {
    for (const char* key : {"a", "b", "dd", "e", "eps"})
      if (j.contains(key)) fail(std::string("map.") + key + " not used by Product");
    const int d = j.contains("base_degree") ? integer(j["base_degree"], "map.base_degree") : 2;
    map = MapFamily::product(c, d);
  } else if (family == "Perturbed") {
    if (j.contains("base_degree") && integer(j["base_degree"], "map.base_degree") != 2)
      fail("map.base_degree must be 2 for Perturbed");
    Perturbation q;
    if (j.contains("a")) q.a = complex_value(j["a"], "map.a");
    if (j.contains("b")) q.b = complex_value(j["b"], "map.b");
    if (j.contains("dd")) q.dd = complex_value(j["dd"], "map.dd");
    if (j.contains("e")) q.e = complex_value(j["e"], "map.e");
    const double eps = j.contains("eps") ? number(j["eps"], "map.eps") : 0.0;
    if (eps < 0.0) fail("map.eps must be >= 0");
    map = MapFamily::perturbed(c, q, eps);
  } else {
    fail("map.family must be Product or Perturbed");
  }
  try {
    validate(map);
  } catch (const Error& e) {
    fail(e.what());
  }
  return map;
}

void parse_options(const json& j, CommandOptions& o) {
  only_keys(j, "options",
            {"d_prime", "membership_tol", "gap_threshold", "n_min", "n_max", "k_max", "centers",
             "count_samples", "trials", "m_values", "k_ratio_n", "empirical"});
  if (j.contains("d_prime")) o.d_prime = integer(j["d_prime"], "options.d_prime");
  if (j.contains("membership_tol")) o.membership_tol = number(j["membership_tol"], "options.membership_tol");
  if (j.contains("gap_threshold")) o.gap_threshold = number(j["gap_threshold"], "options.gap_threshold");
  if (j.contains("n_min")) o.n_min = integer(j["n_min"], "options.n_min");
  if (j.contains("n_max")) o.n_max = integer(j["n_max"], "options.n_max");
  if (j.contains("k_max")) o.k_max = integer(j["k_max"], "options.k_max");
  if (j.contains("centers")) o.centers = integer(j["centers"], "options.centers");
  if (j.contains("count_samples")) o.count_samples = integer(j["count_samples"], "options.count_samples");
  if (j.contains("trials")) o.trials = integer(j["trials"], "options.trials");
  if (j.contains("k_ratio_n")) o.k_ratio_n = integer(j["k_ratio_n"], "options.k_ratio_n");
  if (j.contains("empirical")) {
    if (!j["empirical"].is_boolean()) fail("options.empirical must be a boolean");
    o.empirical = j["empirical"].get<bool>();
  }
  if (j.contains("m_values")) {
    if (!j["m_values"].is_array() || j["m_values"].empty()) fail("options.m_values must be a non-empty array");
    o.m_values.clear();
    for (const auto& m : j["m_values"]) o.m_values.push_back(integer(m, "options.m_values[]"));
  }
  if (o.d_prime < 0) fail("options.d_prime must be >= 0");
  if (!(o.membership_tol > 0.0)) fail("options.membership_tol must be > 0");
  if (!(o.gap_threshold > 0.0)) fail("options.gap_threshold must be > 0");
  if (o.n_min < 1 || o.n_max <= o.n_min) fail("options need 1 <= n_min < n_max");
  if (o.k_max < 1 || o.k_max > 40) fail("options.k_max must be in [1, 40]");
  if (o.centers < 1) fail("options.centers must be >= 1");
  if (o.count_samples < 1) fail("options.count_samples must be >= 1");
  if (o.trials < 1) fail("options.trials must be >= 1");
  if (o.k_ratio_n < 1) fail("options.k_ratio_n must be >= 1");
  for (int m : o.m_values)
    if (m < 1 || m > 12) fail("options.m_values entries must be in [1, 12]");
}

}  // namespace

BasicSetModel ExperimentConfig::basic_set() const {
  BasicSetOptions o;
  o.depth = orders.depth_N;
  o.tol = options.membership_tol;
  return BasicSetModel(map, o);
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  only_keys(j, "config", {"map", "potential", "orders", "sampling", "options"});
  if (!j.contains("map")) fail("map section missing");
  ExperimentConfig cfg;
  cfg.map = parse_map(j["map"]);
  cfg.potential = j.contains("potential") ? parse_potential(j["potential"], "potential") : Potential::zero();

  if (j.contains("orders")) {
    const json& o = j["orders"];
    only_keys(o, "orders", {"pressure_n", "depth_N", "grid_size"});
    if (o.contains("pressure_n")) cfg.orders.pressure_n = integer(o["pressure_n"], "orders.pressure_n");
    if (o.contains("depth_N")) cfg.orders.depth_N = integer(o["depth_N"], "orders.depth_N");
    if (o.contains("grid_size")) cfg.orders.grid_size = integer(o["grid_size"], "orders.grid_size");
  }
  if (cfg.orders.pressure_n < 2 || cfg.orders.pressure_n > 24) fail("orders.pressure_n must be in [2, 24]");
  if (cfg.orders.depth_N < 1 || cfg.orders.depth_N > 200) fail("orders.depth_N must be in [1, 200]");
  if (cfg.orders.grid_size < 256 || cfg.orders.grid_size > (1 << 20))
    fail("orders.grid_size must be in [256, 2^20]");

  if (j.contains("sampling")) {
    const json& s = j["sampling"];
    only_keys(s, "sampling", {"eps_ball", "samples", "seed"});
    if (s.contains("eps_ball")) cfg.sampling.eps_ball = number(s["eps_ball"], "sampling.eps_ball");
    if (s.contains("samples")) cfg.sampling.samples = unsigned64(s["samples"], "sampling.samples");
    if (s.contains("seed")) cfg.sampling.seed = unsigned64(s["seed"], "sampling.seed");
  }
  if (!(cfg.sampling.eps_ball > 0.0) || cfg.sampling.eps_ball > 1.0)
    fail("sampling.eps_ball must be in (0, 1]");
  if (cfg.sampling.samples < 1 || cfg.sampling.samples > (std::uint64_t{1} << 32))
    fail("sampling.samples must be in [1, 2^32]");

  if (j.contains("options")) parse_options(j["options"], cfg.options);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  json map = {{"family", cfg.map.is_product() ? "Product" : "Perturbed"},
              {"c", complex_json(cfg.map.c)},
              {"base_degree", cfg.map.base_degree}};
  if (!cfg.map.is_product()) {
    map["a"] = complex_json(cfg.map.pert.a);
    map["b"] = complex_json(cfg.map.pert.b);
    map["dd"] = complex_json(cfg.map.pert.dd);
    map["e"] = complex_json(cfg.map.pert.e);
    map["eps"] = cfg.map.eps;
  }
  const CommandOptions& o = cfg.options;
  json sampling = {{"eps_ball", cfg.sampling.eps_ball}, {"samples", cfg.sampling.samples}};
  if (cfg.sampling.seed) sampling["seed"] = *cfg.sampling.seed;
  json out = {
      {"map", map},
      {"potential", potential_json(cfg.potential)},
      {"orders",
       {{"pressure_n", cfg.orders.pressure_n},
        {"depth_N", cfg.orders.depth_N},
        {"grid_size", cfg.orders.grid_size}}},
      {"sampling", sampling},
      {"options",
       {{"d_prime", o.d_prime},
        {"membership_tol", o.membership_tol},
        {"gap_threshold", o.gap_threshold},
        {"n_min", o.n_min},
        {"n_max", o.n_max},
        {"k_max", o.k_max},
        {"centers", o.centers},
        {"count_samples", o.count_samples},
        {"trials", o.trials},
        {"m_values", o.m_values},
        {"k_ratio_n", o.k_ratio_n},
        {"empirical", o.empirical}}},
  };
  return out.dump(2);
}

std::uint64_t require_seed(const ExperimentConfig& config) {
  if (!config.sampling.seed) fail("sampling.seed is required for this command");
  return *config.sampling.seed;
}

}  // namespace saddle
