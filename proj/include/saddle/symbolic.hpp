#pragma once

#include <cstdint>
#include <vector>

#include "saddle/basic_set.hpp"

namespace saddle {

/// A word over {0, ..., d-1}. Periodic words are kept in canonical form (the
/// lexicographically minimal rotation).
struct Itinerary {
  std::vector<std::uint8_t> word;
  bool periodic = false;
};

Itinerary make_itinerary(std::vector<std::uint8_t> word, bool periodic);

/// Lexicographically minimal rotation.
std::vector<std::uint8_t> canonical_rotation(const std::vector<std::uint8_t>& word);

/// Index k of the period-n angle 2 pi k / (d^n - 1) whose forward digits
/// repeat word. The all-(d-1) word wraps to 0.
std::uint64_t periodic_index(const std::vector<std::uint8_t>& word, int base_degree);

/// Forward digits of index k at period n (most significant first).
std::vector<std::uint8_t> periodic_word(std::uint64_t index, int period, int base_degree);

/// d^n - 1, the number of genuine period-n points. Throws PeriodTooLarge
/// above 2^26 points.
std::uint64_t periodic_point_count(int period, int base_degree);

struct NewtonOptions {
  double step_cap = 0.1;
  int max_iterations = 50;
  double tolerance = 1e-14;
};

/// The orbit y, f(y), ..., f^{n-1}(y) of the period-n point with angle index
/// k, each carrying its unstable slope. Exact for product maps, damped
/// Newton on the fiber composition otherwise. Throws NewtonDiverged.
std::vector<OrbitPoint> periodic_orbit(const BasicSetModel& bs, int period, std::uint64_t index,
                                       const NewtonOptions& newton = {});
std::vector<OrbitPoint> periodic_orbit(const BasicSetModel& bs, const Itinerary& itinerary,
                                       const NewtonOptions& newton = {});

struct PeriodicPoint {
  Itinerary itinerary;  // forward digits, not rotated
  std::uint64_t index = 0;
  OrbitPoint point;
};

/// All d^n - 1 points of period n (1 <= n <= 24). Throws PeriodTooLarge or
/// NewtonDiverged.
std::vector<PeriodicPoint> periodic_points(const BasicSetModel& bs, int period,
                                           const NewtonOptions& newton = {});

/// Birkhoff sums over one period of the three basis functions
/// log|Dfs|, log|Dfu| and cos(arg w).
struct BasisSums {
  double stable = 0.0;
  double unstable = 0.0;
  double angle = 0.0;
};

/// One periodic orbit of the ensemble. Birkhoff sums over the full period n
/// are shared by all of its points.
struct OrbitRecord {
  std::uint64_t representative = 0;  // smallest index on the orbit
  int length = 0;                    // minimal period; divides n
  BasisSums sums;
};

/// Period-n periodic orbits of f on Lambda with their basis Birkhoff sums.
struct PeriodicEnsemble {
  int period = 0;
  int degree = 2;
  std::uint64_t point_count = 0;
  std::vector<OrbitRecord> orbits;
  std::vector<std::uint32_t> orbit_of;  // point index -> position in orbits
  double max_residual = 0.0;            // max |f^n(y) - y|

  const BasisSums& sums_at(std::uint64_t index) const { return orbits[orbit_of[index]].sums; }
};

PeriodicEnsemble build_ensemble(const BasicSetModel& bs, int period,
                                const NewtonOptions& newton = {});

/// Random prehistory of x: at each step a uniformly chosen preimage in
/// Lambda. Throws NotOnBasicSet.
SolenoidPoint sample_prehistory(const BasicSetModel& bs, const Point& x, int depth,
                                std::uint64_t seed);

}  // namespace saddle
