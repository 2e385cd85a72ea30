#include "saddle/basic_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "saddle/random.hpp"

namespace saddle {

SolenoidPoint shift(const SolenoidPoint& sp, int base_degree) {
  SolenoidPoint out;
  const double image = wrap_angle(static_cast<double>(base_degree) * sp.theta);
  // theta = (image + 2 pi beta) / d, so beta = (d theta - image) / 2 pi.
  const double raw = (static_cast<double>(base_degree) * sp.theta - image) / kTwoPi;
  int beta = static_cast<int>(std::lround(raw));
  beta = ((beta % base_degree) + base_degree) % base_degree;
  out.theta = image;
  if (!sp.word.empty()) {
    out.word.reserve(sp.word.size());
    out.word.push_back(static_cast<std::uint8_t>(beta));
    out.word.insert(out.word.end(), sp.word.begin(), sp.word.end() - 1);
  }
  return out;
}

BasicSetModel::BasicSetModel(MapFamily map, BasicSetOptions options)
    : map_(map), options_(options) {
  validate(map_);
  if (options_.depth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be >= 0");
  if (!(options_.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be > 0");
  if (!(options_.neighborhood_radius > 0.0))
    throw Error(ErrorCode::InvalidArgument, "neighborhood radius must be > 0");
  if (options_.net_angles < 1) throw Error(ErrorCode::InvalidArgument, "empty net");
  p0_ = attracting_fixed_point_unchecked(map_.c);
}

BasicSetModel BasicSetModel::with_tolerance(double tol) const {
  BasicSetOptions options = options_;
  options.tol = tol;
  return BasicSetModel(map_, options);
}

namespace {

double back_angle(double theta, int beta, int d) {
  return (theta + kTwoPi * beta) / static_cast<double>(d);
}

cplx unit(double theta) { return std::polar(1.0, theta); }

// Root of F(., w) = target inside U (the one closest to p0).
cplx pull_back_fiber(const BasicSetModel& bs, cplx target, cplx w) {
  const auto roots = fiber_preimages(bs.map(), target, w);
  return std::abs(roots[0] - bs.p0()) <= std::abs(roots[1] - bs.p0()) ? roots[0] : roots[1];
}

}  // namespace

Realization realize_chain(const BasicSetModel& bs, const SolenoidPoint& sp) {
  const MapFamily& map = bs.map();
  const int d = map.base_degree;
  const std::size_t depth = sp.depth();
  if (!map.is_product() && depth == 0)
    throw Error(ErrorCode::InvalidArgument, "perturbed realization needs depth >= 1");
  for (auto beta : sp.word)
    if (beta >= d) throw Error(ErrorCode::InvalidArgument, "branch index out of range");

  std::vector<double> thetas(depth + 1);
  thetas[0] = wrap_angle(sp.theta);
  for (std::size_t k = 1; k <= depth; ++k) thetas[k] = back_angle(thetas[k - 1], sp.word[k - 1], d);

  Realization out;
  out.chain.reserve(depth + 1);
  if (map.is_product()) {
    for (std::size_t k = depth + 1; k-- > 0;)
      out.chain.push_back({make_point(bs.p0(), unit(thetas[k])), cplx{0.0, 0.0}});
    out.contraction_bound = 0.0;
    return out;
  }

  cplx z = bs.p0();
  cplx slope{0.0, 0.0};
  double bound = bs.options().neighborhood_radius;
  out.chain.push_back({make_point(z, unit(thetas[depth])), slope});
  for (std::size_t k = depth; k >= 1; --k) {
    const Point here = out.chain.back().p;
    bound *= std::abs(fiber_derivative(map, here(0), here(1)));
    slope = push_slope(map, here, slope);
    z = fiber_map(map, here(0), here(1));
    out.chain.push_back({make_point(z, unit(thetas[k - 1])), slope});
  }
  out.contraction_bound = bound;
  if (bound > bs.tol())
    throw Error(ErrorCode::DepthInsufficient,
                "contraction bound " + std::to_string(bound) + " exceeds tolerance");
  return out;
}

Point realize(const BasicSetModel& bs, const SolenoidPoint& sp) {
  if (bs.map().is_product()) return make_point(bs.p0(), unit(wrap_angle(sp.theta)));
  return realize_chain(bs, sp).endpoint().p;
}

SolenoidPoint encode(const BasicSetModel& bs, const Point& p, int depth) {
  const MapFamily& map = bs.map();
  const int d = map.base_degree;
  SolenoidPoint sp;
  sp.theta = angle_of(p(1));
  sp.word.assign(static_cast<std::size_t>(depth), 0);
  if (map.is_product()) return sp;

  double theta = sp.theta;
  cplx z = p(0);
  for (int k = 0; k < depth; ++k) {
    int best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int beta = 0; beta < d; ++beta) {
      const cplx w = unit(back_angle(theta, beta, d));
      const double gap = std::abs(z - fiber_map(map, bs.p0(), w));
      if (gap < best_gap) {
        best_gap = gap;
        best = beta;
      }
    }
    sp.word[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(best);
    theta = back_angle(theta, best, d);
    z = pull_back_fiber(bs, z, unit(theta));
    // Deep pull-backs amplify rounding; once the fiber coordinate leaves U the
    // remaining letters no longer matter for the realized point.
    if (!std::isfinite(std::abs(z)) || std::abs(z - bs.p0()) > bs.options().neighborhood_radius)
      z = bs.p0();
  }
  return sp;
}

SolenoidPoint encode(const BasicSetModel& bs, const Point& p) {
  return encode(bs, p, bs.options().depth);
}

double net_distance(const BasicSetModel& bs, const Point& p) {
  if (!std::isfinite(p.norm())) return std::numeric_limits<double>::infinity();
  if (bs.map().is_product()) {
    const double dz = std::abs(p(0) - bs.p0());
    const double dw = std::abs(std::abs(p(1)) - 1.0);
    return std::hypot(dz, dw);
  }
  return distance(p, realize(bs, encode(bs, p)));
}

bool forward_confined(const BasicSetModel& bs, const Point& p) {
  const MapFamily& map = bs.map();
  const double radius = bs.options().neighborhood_radius;
  const double modulus = std::abs(p(1));
  if (!(modulus > 0.0) || !std::isfinite(modulus)) return false;
  // The radial part of w evolves as log|w| -> d log|w| and is tracked
  // separately so that rounding in repeated powers does not masquerade as
  // escape.
  double log_radius = std::log(modulus);
  // |w| = 1 up to rounding counts as the circle itself.
  if (std::abs(log_radius) < 1e-12) log_radius = 0.0;
  cplx direction = p(1) / modulus;
  cplx z = p(0);
  for (int j = 0; j <= bs.options().confinement_steps; ++j) {
    const double r = std::exp(log_radius);
    if (!(std::abs(z - bs.p0()) < radius) || !(std::abs(r - 1.0) < radius)) return false;
    if (j == bs.options().confinement_steps) break;
    const cplx w = r * direction;
    z = fiber_map(map, z, w);
    cplx next = direction;
    for (int i = 1; i < map.base_degree; ++i) next *= direction;
    direction = next / std::abs(next);
    log_radius *= static_cast<double>(map.base_degree);
  }
  return true;
}

bool membership(const BasicSetModel& bs, const Point& p) {
  if (!std::isfinite(p.norm())) return false;
  if (!forward_confined(bs, p)) return false;
  try {
    return net_distance(bs, p) < bs.tol();
  } catch (const Error&) {
    return false;
  }
}

int PreimageCensus::count() const {
  return static_cast<int>(std::count(in_set.begin(), in_set.end(), true));
}

std::vector<Point> PreimageCensus::members() const {
  std::vector<Point> out;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (in_set[i]) out.push_back(all[i]);
  return out;
}

PreimageCensus preimage_census(const BasicSetModel& bs, const Point& x) {
  const MapFamily& map = bs.map();
  const int d = map.base_degree;
  const double theta = angle_of(x(1));
  const double modulus = std::pow(std::abs(x(1)), 1.0 / d);
  PreimageCensus census;
  for (int beta = 0; beta < d; ++beta) {
    const cplx w = std::polar(modulus, back_angle(theta, beta, d));
    for (cplx z : fiber_preimages(map, x(0), w)) {
      const Point candidate = make_point(z, w);
      const bool confined = forward_confined(bs, candidate);
      double dist = std::numeric_limits<double>::infinity();
      try {
        dist = net_distance(bs, candidate);
      } catch (const Error&) {
      }
      census.all.push_back(candidate);
      census.distances.push_back(dist);
      census.in_set.push_back(confined && dist < bs.tol());
      if (confined && dist >= 0.5 * bs.tol() && dist <= 2.0 * bs.tol()) census.ambiguous = true;
    }
  }
  return census;
}

int preimage_count(const BasicSetModel& bs, const Point& x) {
  if (!membership(bs, x)) throw Error(ErrorCode::NotOnBasicSet, "preimage count off Lambda");
  const PreimageCensus census = preimage_census(bs, x);
  if (census.ambiguous)
    throw Error(ErrorCode::AmbiguousMembership,
                "a preimage lies within 2x tolerance of the membership boundary");
  return census.count();
}

std::vector<Point> in_set_preimages(const BasicSetModel& bs, const Point& x) {
  if (bs.map().is_product()) {
    const int d = bs.degree();
    const double theta = angle_of(x(1));
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(d));
    for (int beta = 0; beta < d; ++beta)
      out.push_back(make_point(bs.p0(), unit(back_angle(theta, beta, d))));
    return out;
  }
  return preimage_census(bs, x).members();
}

std::vector<OrbitPoint> realized_orbit_net(const BasicSetModel& bs) {
  const int count = bs.options().net_angles;
  const int d = bs.degree();
  const std::size_t depth = bs.map().is_product() ? 0 : static_cast<std::size_t>(bs.options().depth);
  Rng rng(bs.options().net_seed);
  std::vector<OrbitPoint> net;
  net.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    SolenoidPoint sp;
    sp.theta = kTwoPi * i / count;
    sp.word.resize(depth);
    for (auto& beta : sp.word) beta = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(d)));
    net.push_back(realize_chain(bs, sp).endpoint());
  }
  return net;
}

std::vector<Point> realized_net(const BasicSetModel& bs) {
  std::vector<Point> net;
  for (const OrbitPoint& x : realized_orbit_net(bs)) net.push_back(x.p);
  return net;
}

double forward_invariance_defect(const BasicSetModel& bs) {
  double worst = 0.0;
  for (const Point& x : realized_net(bs)) {
    Point y = apply(bs.map(), x);
    y(1) /= std::abs(y(1));
    worst = std::max(worst, net_distance(bs, y));
  }
  return worst;
}

}  // namespace saddle
