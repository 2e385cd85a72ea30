#pragma once

#include <vector>

#include "saddle/basic_set.hpp"

namespace saddle {

/// Attaches the unstable slope to a point of Lambda by recoding and
/// re-realizing it. The coordinates of p are kept.
OrbitPoint lift(const BasicSetModel& bs, const Point& p);

/// One forward step; |w| is projected back to the unit circle.
OrbitPoint step(const MapFamily& map, const OrbitPoint& x);

/// x, f(x), ..., f^n(x).
std::vector<OrbitPoint> trace_orbit(const MapFamily& map, const OrbitPoint& x, int n);

struct DerivativeNorms {
  double log_stable = 0.0;
  double log_unstable = 0.0;

  double stable() const;
  double unstable() const;
};

struct ConeOptions {
  double slope_bound = 1.0;  // unstable cone |v| <= slope_bound around the w-tangent
};

/// Accumulated |Df^n_s(x)| and |Df^n_u(x)| in log space. Exact constants
/// for product maps. Throws NotOnBasicSet or ConeCollapse.
DerivativeNorms stable_unstable_norms(const BasicSetModel& bs, const Point& x, int n,
                                      const ConeOptions& cone = {});

/// Same, starting from an already lifted point (no membership test).
DerivativeNorms orbit_norms(const BasicSetModel& bs, const OrbitPoint& x, int n,
                            const ConeOptions& cone = {});

/// Distance from p to the critical set {det Df = 0}.
double distance_to_critical_set(const MapFamily& map, const Point& p);

/// Minimum over the realized net of the distance to the critical set.
/// Throws CriticalOnSet when it is below the membership tolerance.
double critical_distance(const BasicSetModel& bs);

struct HyperbolicityOptions {
  double stable_max = 0.9;
  double unstable_min = 1.1;
  ConeOptions cone{};
  int net_stride = 16;  // every stride-th net point is checked
};

struct HyperbolicityReport {
  double max_stable = 0.0;
  double min_unstable = 0.0;
  double max_slope = 0.0;
  double critical_distance = 0.0;
  double invariance_defect = 0.0;
  bool passed = false;
};

/// c-hyperbolicity witnesses on the realized net: contraction and expansion
/// bounds, cone confinement, distance to the critical set and forward
/// invariance. Never throws on a failed witness.
HyperbolicityReport hyperbolicity_witness(const BasicSetModel& bs,
                                          const HyperbolicityOptions& options = {});

/// Throws Superattracting, CriticalOnSet or ConeCollapse on the first failed
/// witness.
HyperbolicityReport require_c_hyperbolic(const BasicSetModel& bs,
                                         const HyperbolicityOptions& options = {});

}  // namespace saddle
