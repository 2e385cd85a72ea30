#include <iostream>

#include <CLI11.hpp>

#include "saddle/runner.hpp"

namespace {

std::string describe(const std::string& name) {
  if (name == "pressure") return "periodic-point pressure P_n and Cauchy gaps";
  if (name == "lyapunov") return "stable and unstable exponents of the equilibrium state";
  if (name == "dimension") return "empirical pointwise dimension from Monte Carlo ball counts";
  if (name == "ball-measure") return "formula vs Monte Carlo ball measures over an (n, k) grid";
  if (name == "bowen-root") return "zero of t -> P(t log|Df_s| - log d')";
  if (name == "classify") return "preimage count, regime and dimension of the measure of maximal entropy";
  if (name == "jacobian") return "Jacobian of iterates on small iterated balls";
  return "run the acceptance suite";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermodynamic formalism experiments on saddle basic sets of polynomial skew products"};
  app.require_subcommand(1);

  saddle::RunRequest request;
  std::uint64_t seed = 0;
  for (const std::string& name : saddle::commands()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    auto* config = sub->add_option("--config", request.config_path, "experiment JSON")->check(CLI::ExistingFile);
    if (name != "verify") config->required();
    sub->add_option("--out", request.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "seed, overrides the config");
    sub->add_option("--threads", request.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->callback([&, sub, name] {
      request.command = name;
      if (sub->count("--seed")) request.seed = seed;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : saddle::kExitInvalidConfig;
  }
  return saddle::run(request, std::cerr);
}
