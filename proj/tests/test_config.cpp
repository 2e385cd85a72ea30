#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "saddle/config.hpp"
#include "saddle/runner.hpp"

using namespace saddle;

namespace {

namespace fs = std::filesystem;

ErrorCode parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("config was accepted: " << text);
  return ErrorCode::InvalidArgument;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("saddle_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_with(const std::string& command, const std::string& config, const fs::path& dir,
             std::optional<std::uint64_t> seed = std::nullopt) {
  const fs::path path = dir / "config.json";
  std::ofstream(path) << config;
  RunRequest r;
  r.command = command;
  r.config_path = path.string();
  r.out_dir = (dir / "out").string();
  r.seed = seed;
  std::ostringstream log;
  return run(r, log);
}

const char* kProduct = R"({"map": {"family": "Product", "c": 0.1}})";

}  // namespace

TEST_CASE("parse a full config") {
  const ExperimentConfig cfg = parse_config(R"({
    "map": {"family": "Perturbed", "c": [0.1, 0.0], "a": 0.5, "b": [1, 0], "dd": 0, "e": 0, "eps": 0.001,
            "base_degree": 2},
    "potential": {"variant": "Sum", "terms": [{"variant": "AngleHarmonic", "value": 0.1},
                                              {"variant": "Constant", "value": -1}]},
    "orders": {"pressure_n": 14, "depth_N": 30, "grid_size": 1024},
    "sampling": {"eps_ball": 0.25, "samples": 1000, "seed": "18446744073709551615"},
    "options": {"d_prime": 1, "m_values": [1, 4], "empirical": false}
  })");
  CHECK_FALSE(cfg.map.is_product());
  CHECK(cfg.map.pert.a == cplx(0.5, 0.0));
  CHECK(cfg.map.eps == 0.001);
  CHECK(cfg.potential.kind == PotentialKind::Sum);
  CHECK(cfg.potential.terms.size() == 2);
  CHECK(cfg.orders.pressure_n == 14);
  CHECK(cfg.basic_set().options().depth == 30);
  CHECK(cfg.sampling.eps_ball == 0.25);
  CHECK(*cfg.sampling.seed == 18446744073709551615ULL);
  CHECK(cfg.options.m_values == std::vector<int>{1, 4});
  CHECK_FALSE(cfg.options.empirical);

  const ExperimentConfig again = parse_config(dump_config(cfg));
  CHECK(dump_config(again) == dump_config(cfg));
}

TEST_CASE("defaults") {
  const ExperimentConfig cfg = parse_config(kProduct);
  CHECK(cfg.map.is_product());
  CHECK(cfg.map.base_degree == 2);
  CHECK(cfg.potential.kind == PotentialKind::Zero);
  CHECK(cfg.orders.pressure_n == 18);
  CHECK_FALSE(cfg.sampling.seed.has_value());
  CHECK_THROWS_AS(require_seed(cfg), Error);
}

TEST_CASE("invalid configs fail closed") {
  CHECK(parse_error("{") == ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product", "c": 0.1}, "extra": 1})") == ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product", "c": 0.1, "colour": 1}})") == ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product", "c": 0.1}, "orders": {"n": 3}})") == ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product", "c": 0.1}, "sampling": {"seed": -1}})") ==
        ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product", "c": 0.1, "eps": 0.1}})") == ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Perturbed", "c": 0.1, "base_degree": 3}})") == ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Henon", "c": 0.1}})") == ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product"}})") == ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product", "c": "0.1"}})") == ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product", "c": 1e999}})") == ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product", "c": 0.1}, "potential": {"variant": "Tabulated"}})") ==
        ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product", "c": 0.1}, "potential": {"variant": "Constant"}})") ==
        ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product", "c": 0.1}, "potential": {"variant": "Zero", "value": 1}})") ==
        ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product", "c": 0.1}, "orders": {"pressure_n": 30}})") ==
        ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product", "c": 0.1}, "orders": {"grid_size": 100}})") ==
        ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product", "c": 0.1}, "sampling": {"eps_ball": 0}})") ==
        ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product", "c": 0.1}, "options": {"n_min": 4, "n_max": 4}})") ==
        ErrorCode::InvalidConfig);
  CHECK(parse_error(R"({"map": {"family": "Product", "c": 0.1}, "options": {"m_values": []}})") ==
        ErrorCode::InvalidConfig);
}

TEST_CASE("pressure command output") {
  const fs::path dir = scratch("pressure");
  CHECK(run_with("pressure", R"({"map": {"family": "Product", "c": 0.1}, "orders": {"pressure_n": 12}})", dir) ==
        kExitOk);
  const std::string csv = read(dir / "out" / "pressure.csv");
  CHECK(csv.rfind("# n,P_n,gap\n", 0) == 0);
  std::istringstream lines(csv);
  std::string line, last;
  int rows = 0;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    last = line;
    ++rows;
  }
  CHECK(rows == 12);
  const std::string value = last.substr(last.find(',') + 1, last.rfind(',') - last.find(',') - 1);
  const std::string digits = value.substr(value.find('.') + 1);
  CHECK(digits.size() + 1 >= 9);
  CHECK(std::stod(value) == doctest::Approx(std::log(4095.0) / 12));
  CHECK(fs::exists(dir / "out" / "summary.json"));
  CHECK(read(dir / "out" / "manifest.json").find("\"timestamp\"") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run_with("pressure", R"({"map": {"family": "Product", "c": 0.1}, "typo": 1})", scratch("bad")) ==
        kExitInvalidConfig);
  CHECK(run_with("lyapunov", R"({"map": {"family": "Product", "c": 0.3}})", scratch("notattr")) ==
        kExitInvalidConfig);
  CHECK(run_with("dimension", kProduct, scratch("noseed")) == kExitInvalidConfig);
  CHECK(run_with("pressure",
                 R"({"map": {"family": "Product", "c": 0.1}, "orders": {"pressure_n": 4},
                     "options": {"gap_threshold": 1e-6}})",
                 scratch("gap")) == kExitNonConvergent);
  CHECK(run_with("dimension",
                 R"({"map": {"family": "Product", "c": 0.1, "base_degree": 3},
                     "potential": {"variant": "AngleHarmonic", "value": 1}, "orders": {"pressure_n": 10},
                     "sampling": {"seed": 1, "samples": 4096}, "options": {"d_prime": 2, "n_max": 3}})",
                 scratch("admissible")) == kExitNotAdmissible);
  CHECK(run_with("dimension",
                 R"({"map": {"family": "Product", "c": 0.1}, "sampling": {"seed": 1, "samples": 1024}})",
                 scratch("insufficient")) == kExitNonConvergent);
  RunRequest r;
  r.command = "plot";
  std::ostringstream log;
  CHECK(run(r, log) == kExitInvalidConfig);
}

TEST_CASE("identical config and seed give identical data files") {
  const std::string config = R"({"map": {"family": "Product", "c": 0.1},
      "potential": {"variant": "AngleHarmonic", "value": 0.1}, "orders": {"pressure_n": 12},
      "sampling": {"samples": 262144}, "options": {"d_prime": 2, "n_max": 4}})";
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  CHECK(run_with("dimension", config, a, 42) == kExitOk);
  CHECK(run_with("dimension", config, b, 42) == kExitOk);
  CHECK(read(a / "out" / "dimension.csv") == read(b / "out" / "dimension.csv"));
  CHECK(read(a / "out" / "summary.json") == read(b / "out" / "summary.json"));
  CHECK(read(a / "out" / "dimension.csv").rfind("# n,k,rho,log_mu_formula,log_mu_mc,slope_partial\n", 0) == 0);
  const fs::path c = scratch("det_c");
  CHECK(run_with("dimension", config, c, 43) == kExitOk);
  CHECK(read(a / "out" / "dimension.csv") != read(c / "out" / "dimension.csv"));
}

TEST_CASE("classify reports the expanding case") {
  const fs::path dir = scratch("classify");
  CHECK(run_with("classify",
                 R"({"map": {"family": "Product", "c": 0.1}, "orders": {"pressure_n": 14},
                     "sampling": {"seed": 1}, "options": {"empirical": false}})",
                 dir) == kExitOk);
  const std::string summary = read(dir / "out" / "summary.json");
  CHECK(summary.find("\"d_prime\": 2") != std::string::npos);
  CHECK(summary.find("\"regime\": \"expanding\"") != std::string::npos);
}
