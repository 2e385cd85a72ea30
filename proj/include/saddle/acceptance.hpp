#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace saddle {

/// One measured quantity with the closed interval it must fall in.
struct Check {
  std::string quantity;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool timing = false;  // wall-clock checks stay out of the data file

  bool passed() const { return value >= lower && value <= upper; }
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<Check> checks;
  std::string error;  // set when the criterion threw
  double seconds = 0.0;

  bool passed() const;
};

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  bool determinism = true;  // criterion 12 reruns 1-11 and compares bytes
  std::function<void(const CriterionResult&)> on_result;
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;
  std::string data;  // CSV text of 1-11, deterministic

  bool all_passed() const;
};

AcceptanceReport run_acceptance(const AcceptanceOptions& options = {});

/// CSV with one row per non-timing check.
std::string acceptance_csv(const std::vector<CriterionResult>& results);

/// "[PASS] 3 exact exponents: chi_u=0.693... in [...]".
std::string summary_line(const CriterionResult& result);

}  // namespace saddle
