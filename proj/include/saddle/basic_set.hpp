#pragma once

#include <cstdint>
#include <vector>

#include "saddle/maps.hpp"

namespace saddle {

/// A point of the natural extension truncated at a finite depth: the base
/// angle theta of w = e^{i theta} and the backward branch choices
/// word[0], word[1], ... taken from x_0 towards x_{-N}.
///
/// Stepping back once maps theta to (theta + 2 pi beta) / d.
struct SolenoidPoint {
  double theta = 0.0;
  std::vector<std::uint8_t> word;

  std::size_t depth() const { return word.size(); }
};

/// Prehistory of f(x): prepends the branch leading back to x and drops the
/// deepest choice so the depth is unchanged.
SolenoidPoint shift(const SolenoidPoint& sp, int base_degree);

struct BasicSetOptions {
  int depth = 24;                     // default realization depth N
  double tol = 1e-6;                  // membership tolerance
  double neighborhood_radius = 0.2;   // isolating neighbourhood U of {p0} x S^1
  int confinement_steps = 50;         // forward steps that must stay inside U
  int net_angles = 1 << 14;           // resolution of sampled nets
  std::uint64_t net_seed = 0x5eedULL;
};

/// The basic set Lambda of a skew product near {p0} x S^1. Immutable.
class BasicSetModel {
 public:
  explicit BasicSetModel(MapFamily map, BasicSetOptions options = {});

  const MapFamily& map() const { return map_; }
  const BasicSetOptions& options() const { return options_; }
  int degree() const { return map_.base_degree; }
  cplx p0() const { return p0_; }
  double tol() const { return options_.tol; }

  /// Copy with a different membership tolerance.
  BasicSetModel with_tolerance(double tol) const;

 private:
  MapFamily map_;
  BasicSetOptions options_;
  cplx p0_;
};

/// A point of Lambda together with the slope v of its unstable direction
/// (v, 1). Product maps have v = 0.
struct OrbitPoint {
  Point p;
  cplx slope{0.0, 0.0};
};

/// The realized backward chain x_{-N}, ..., x_0 (chain.front() is the seed).
struct Realization {
  std::vector<OrbitPoint> chain;
  /// Bound on the z-error of the endpoint: radius of U times the product of
  /// stable derivatives along the chain.
  double contraction_bound = 0.0;

  const OrbitPoint& endpoint() const { return chain.back(); }
};

/// Seeds z_{-N} = p0 at the deepest angle and iterates the fiber maps
/// forward. Throws DepthInsufficient if the contraction bound exceeds tol.
Realization realize_chain(const BasicSetModel& bs, const SolenoidPoint& sp);

Point realize(const BasicSetModel& bs, const SolenoidPoint& sp);

/// Backward symbolic coding of a point near Lambda: at every step picks the
/// branch whose image piece F(p0, w') is closest to the current fiber
/// coordinate, then pulls the fiber coordinate back through that branch.
SolenoidPoint encode(const BasicSetModel& bs, const Point& p, int depth);
SolenoidPoint encode(const BasicSetModel& bs, const Point& p);

/// Distance from p to the realized point of its own coding, i.e. to the
/// locally refined net of Lambda.
double net_distance(const BasicSetModel& bs, const Point& p);

/// True when the forward orbit stays in U for confinement_steps steps.
bool forward_confined(const BasicSetModel& bs, const Point& p);

bool membership(const BasicSetModel& bs, const Point& p);

/// Every solution of f(y) = x in C^2 and the subset that passes membership.
struct PreimageCensus {
  std::vector<Point> all;
  std::vector<double> distances;  // net distance of each candidate
  std::vector<bool> in_set;
  bool ambiguous = false;         // a candidate sits within [tol/2, 2 tol]

  int count() const;
  int total() const { return static_cast<int>(all.size()); }
  std::vector<Point> members() const;
};

/// Does not check membership of x itself.
PreimageCensus preimage_census(const BasicSetModel& bs, const Point& x);

/// d(x). Throws NotOnBasicSet or AmbiguousMembership.
int preimage_count(const BasicSetModel& bs, const Point& x);

/// The preimages of x inside Lambda. Closed form for product maps.
std::vector<Point> in_set_preimages(const BasicSetModel& bs, const Point& x);

/// Net of Lambda: net_angles equally spaced angles, each with a seeded random
/// backward word of depth N.
std::vector<Point> realized_net(const BasicSetModel& bs);
std::vector<OrbitPoint> realized_orbit_net(const BasicSetModel& bs);

/// Maximum over the net of the net distance of f(x); the forward invariance
/// witness for f(Lambda) = Lambda.
double forward_invariance_defect(const BasicSetModel& bs);

}  // namespace saddle
