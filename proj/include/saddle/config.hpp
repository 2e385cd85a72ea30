#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "saddle/basic_set.hpp"
#include "saddle/potential.hpp"

namespace saddle {

struct Orders {
  int pressure_n = 18;
  int depth_N = 24;
  int grid_size = 2048;
};

struct Sampling {
  double eps_ball = 0.5;
  std::uint64_t samples = 1 << 22;
  std::optional<std::uint64_t> seed;
};

/// Options read by individual commands. Zero d_prime means "count it".
struct CommandOptions {
  int d_prime = 0;
  double membership_tol = 1e-6;
  double gap_threshold = 1e-3;
  int n_min = 1;
  int n_max = 8;
  int k_max = 12;
  int centers = 30;
  int count_samples = 100;
  int trials = 100;
  std::vector<int> m_values{1, 2, 3};
  int k_ratio_n = 30;
  bool empirical = true;
};

struct ExperimentConfig {
  MapFamily map;
  Potential potential;
  Orders orders;
  Sampling sampling;
  CommandOptions options;

  BasicSetModel basic_set() const;
};

/// Parses the JSON text of an experiment. Unknown keys, wrong types and
/// non-finite numbers throw InvalidConfig.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON echo of a config (stable key order).
std::string dump_config(const ExperimentConfig& config);

/// Throws InvalidConfig unless the seed is set.
std::uint64_t require_seed(const ExperimentConfig& config);

}  // namespace saddle
