#include "saddle/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace saddle {

OrbitPoint lift(const BasicSetModel& bs, const Point& p) {
  if (bs.map().is_product()) return {p, cplx{0.0, 0.0}};
  const Realization chain = realize_chain(bs, encode(bs, p));
  return {p, chain.endpoint().slope};
}

OrbitPoint step(const MapFamily& map, const OrbitPoint& x) {
  OrbitPoint next;
  next.slope = push_slope(map, x.p, x.slope);
  next.p = apply(map, x.p);
  next.p(1) /= std::abs(next.p(1));
  return next;
}

std::vector<OrbitPoint> trace_orbit(const MapFamily& map, const OrbitPoint& x, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative orbit length");
  std::vector<OrbitPoint> orbit;
  orbit.reserve(static_cast<std::size_t>(n) + 1);
  orbit.push_back(x);
  for (int j = 0; j < n; ++j) orbit.push_back(step(map, orbit.back()));
  return orbit;
}

double DerivativeNorms::stable() const { return std::exp(log_stable); }
double DerivativeNorms::unstable() const { return std::exp(log_unstable); }

DerivativeNorms orbit_norms(const BasicSetModel& bs, const OrbitPoint& x, int n,
                            const ConeOptions& cone) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative orbit length");
  const MapFamily& map = bs.map();
  DerivativeNorms norms;
  if (map.is_product()) {
    norms.log_stable = n * std::log(std::abs(2.0 * bs.p0()));
    norms.log_unstable = n * std::log(static_cast<double>(map.base_degree));
    return norms;
  }
  OrbitPoint y = x;
  for (int j = 0; j < n; ++j) {
    if (!(std::abs(y.slope) <= cone.slope_bound))
      throw Error(ErrorCode::ConeCollapse, "unstable direction left the cone at step " +
                                               std::to_string(j));
    norms.log_stable += std::log(std::abs(fiber_derivative(map, y.p(0), y.p(1))));
    norms.log_unstable += std::log(unstable_stretch(map, y.p, y.slope));
    y = step(map, y);
  }
  return norms;
}

DerivativeNorms stable_unstable_norms(const BasicSetModel& bs, const Point& x, int n,
                                      const ConeOptions& cone) {
  if (!membership(bs, x)) throw Error(ErrorCode::NotOnBasicSet, "norms requested off Lambda");
  return orbit_norms(bs, lift(bs, x), n, cone);
}

double distance_to_critical_set(const MapFamily& map, const Point& p) {
  const cplx z = p(0);
  const cplx w = p(1);
  // det Df = dF/dz * d w^(d-1); dF/dz = 2z + eps(a + dd w) vanishes on a
  // complex line (or the hyperplane z = 0).
  double to_line = std::abs(z);
  if (!map.is_product()) {
    const cplx slope = 0.5 * map.eps * map.pert.dd;
    const cplx zc = -0.5 * map.eps * (map.pert.a + map.pert.dd * w);
    to_line = std::abs(z - zc) / std::sqrt(1.0 + std::norm(slope));
  }
  return std::min(to_line, std::abs(w));
}

double critical_distance(const BasicSetModel& bs) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point& p : realized_net(bs))
    best = std::min(best, distance_to_critical_set(bs.map(), p));
  if (best < bs.tol())
    throw Error(ErrorCode::CriticalOnSet, "critical set meets Lambda (distance " +
                                              std::to_string(best) + ")");
  return best;
}

HyperbolicityReport hyperbolicity_witness(const BasicSetModel& bs,
                                          const HyperbolicityOptions& options) {
  const MapFamily& map = bs.map();
  HyperbolicityReport report;
  report.min_unstable = std::numeric_limits<double>::infinity();
  report.critical_distance = std::numeric_limits<double>::infinity();
  const std::vector<OrbitPoint> net = realized_orbit_net(bs);
  const std::size_t stride = static_cast<std::size_t>(std::max(1, options.net_stride));
  for (std::size_t i = 0; i < net.size(); i += stride) {
    const OrbitPoint& x = net[i];
    report.max_stable =
        std::max(report.max_stable, std::abs(fiber_derivative(map, x.p(0), x.p(1))));
    report.min_unstable = std::min(report.min_unstable, unstable_stretch(map, x.p, x.slope));
    report.max_slope = std::max(report.max_slope, std::abs(x.slope));
    report.critical_distance =
        std::min(report.critical_distance, distance_to_critical_set(map, x.p));
    Point image = apply(map, x.p);
    image(1) /= std::abs(image(1));
    report.invariance_defect = std::max(report.invariance_defect, net_distance(bs, image));
  }
  report.passed = std::abs(2.0 * bs.p0()) >= 1e-8 && report.max_stable <= options.stable_max &&
                  report.min_unstable >= options.unstable_min &&
                  report.max_slope <= options.cone.slope_bound &&
                  report.critical_distance >= bs.tol() && report.invariance_defect < bs.tol();
  return report;
}

HyperbolicityReport require_c_hyperbolic(const BasicSetModel& bs,
                                         const HyperbolicityOptions& options) {
  attracting_fixed_point(bs.map().c);
  const HyperbolicityReport report = hyperbolicity_witness(bs, options);
  if (report.critical_distance < bs.tol())
    throw Error(ErrorCode::CriticalOnSet, "critical set meets Lambda");
  if (!report.passed)
    throw Error(ErrorCode::ConeCollapse,
                "hyperbolicity witness failed (max |Dfs| " + std::to_string(report.max_stable) +
                    ", min |Dfu| " + std::to_string(report.min_unstable) + ", max slope " +
                    std::to_string(report.max_slope) + ")");
  return report;
}

}  // namespace saddle
