#include "saddle/symbolic.hpp"

#include <algorithm>
#include <cmath>

#include "saddle/random.hpp"

namespace saddle {

std::vector<std::uint8_t> canonical_rotation(const std::vector<std::uint8_t>& word) {
  std::vector<std::uint8_t> best = word;
  std::vector<std::uint8_t> rotated = word;
  for (std::size_t r = 1; r < word.size(); ++r) {
    std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
    if (rotated < best) best = rotated;
  }
  return best;
}

Itinerary make_itinerary(std::vector<std::uint8_t> word, bool periodic) {
  if (word.empty()) throw Error(ErrorCode::InvalidArgument, "empty itinerary");
  Itinerary it;
  it.word = periodic ? canonical_rotation(word) : std::move(word);
  it.periodic = periodic;
  return it;
}

std::uint64_t periodic_point_count(int period, int base_degree) {
  if (period < 1) throw Error(ErrorCode::InvalidArgument, "period must be >= 1");
  if (base_degree < 2) throw Error(ErrorCode::InvalidArgument, "degree must be >= 2");
  std::uint64_t total = 1;
  for (int i = 0; i < period; ++i) {
    total *= static_cast<std::uint64_t>(base_degree);
    if (total > (std::uint64_t{1} << 26) + 1)
      throw Error(ErrorCode::PeriodTooLarge, "more than 2^26 periodic points");
  }
  return total - 1;
}

std::uint64_t periodic_index(const std::vector<std::uint8_t>& word, int base_degree) {
  const std::uint64_t modulus =
      periodic_point_count(static_cast<int>(word.size()), base_degree);
  std::uint64_t k = 0;
  for (auto digit : word) {
    if (digit >= base_degree) throw Error(ErrorCode::InvalidArgument, "digit out of range");
    k = k * static_cast<std::uint64_t>(base_degree) + digit;
  }
  return k % modulus;
}

std::vector<std::uint8_t> periodic_word(std::uint64_t index, int period, int base_degree) {
  std::vector<std::uint8_t> word(static_cast<std::size_t>(period));
  for (int i = period - 1; i >= 0; --i) {
    word[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(index % base_degree);
    index /= static_cast<std::uint64_t>(base_degree);
  }
  return word;
}

namespace {

struct FiberOrbit {
  std::vector<cplx> w;  // base points along the orbit
};

FiberOrbit base_orbit(int period, std::uint64_t index, int d, std::uint64_t modulus) {
  FiberOrbit orbit;
  orbit.w.reserve(static_cast<std::size_t>(period));
  std::uint64_t k = index;
  for (int j = 0; j < period; ++j) {
    orbit.w.push_back(std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(modulus)));
    k = (k * static_cast<std::uint64_t>(d)) % modulus;
  }
  return orbit;
}

cplx solve_fiber_cycle(const BasicSetModel& bs, const FiberOrbit& orbit,
                       const NewtonOptions& newton, double& residual) {
  const MapFamily& map = bs.map();
  cplx z = bs.p0();
  for (int iter = 0; iter <= newton.max_iterations; ++iter) {
    cplx value = z;
    cplx derivative{1.0, 0.0};
    for (cplx w : orbit.w) {
      derivative *= fiber_derivative(map, value, w);
      value = fiber_map(map, value, w);
    }
    const cplx g = value - z;
    residual = std::abs(g);
    if (!std::isfinite(residual)) break;
    if (residual <= newton.tolerance) return z;
    if (iter == newton.max_iterations) break;
    cplx delta = g / (derivative - 1.0);
    const double size = std::abs(delta);
    if (size > newton.step_cap) delta *= newton.step_cap / size;
    z -= delta;
    if (!(std::abs(z - bs.p0()) < bs.options().neighborhood_radius)) break;
  }
  // Rounding can stall slightly above the tolerance; accept a converged cycle
  // whose residual is still far below the membership tolerance.
  if (std::isfinite(residual) && residual < 1e-12 &&
      std::abs(z - bs.p0()) < bs.options().neighborhood_radius)
    return z;
  throw Error(ErrorCode::NewtonDiverged,
              "fiber cycle did not converge (residual " + std::to_string(residual) + ")");
}

}  // namespace

std::vector<OrbitPoint> periodic_orbit(const BasicSetModel& bs, int period, std::uint64_t index,
                                       const NewtonOptions& newton) {
  const MapFamily& map = bs.map();
  const int d = map.base_degree;
  const std::uint64_t modulus = periodic_point_count(period, d);
  if (index >= modulus) throw Error(ErrorCode::InvalidArgument, "periodic index out of range");
  const FiberOrbit orbit = base_orbit(period, index, d, modulus);
  std::vector<OrbitPoint> points(static_cast<std::size_t>(period));
  if (map.is_product()) {
    for (int j = 0; j < period; ++j)
      points[static_cast<std::size_t>(j)] = {make_point(bs.p0(), orbit.w[static_cast<std::size_t>(j)]),
                                             cplx{0.0, 0.0}};
    return points;
  }

  double residual = 0.0;
  cplx z = solve_fiber_cycle(bs, orbit, newton, residual);
  // The unstable slope obeys v' = a v + b along the orbit; its periodic
  // solution is the fixed point of the composed affine map.
  cplx a_total{1.0, 0.0};
  cplx b_total{0.0, 0.0};
  std::vector<cplx> zs(static_cast<std::size_t>(period));
  for (int j = 0; j < period; ++j) {
    const cplx w = orbit.w[static_cast<std::size_t>(j)];
    zs[static_cast<std::size_t>(j)] = z;
    const cplx scale = base_derivative(map, w);
    const cplx a = fiber_derivative(map, z, w) / scale;
    const cplx b = fiber_cross_derivative(map, z, w) / scale;
    a_total *= a;
    b_total = a * b_total + b;
    z = fiber_map(map, z, w);
  }
  cplx slope = b_total / (1.0 - a_total);
  for (int j = 0; j < period; ++j) {
    const std::size_t i = static_cast<std::size_t>(j);
    points[i] = {make_point(zs[i], orbit.w[i]), slope};
    slope = push_slope(map, points[i].p, slope);
  }
  return points;
}

std::vector<OrbitPoint> periodic_orbit(const BasicSetModel& bs, const Itinerary& itinerary,
                                       const NewtonOptions& newton) {
  const int period = static_cast<int>(itinerary.word.size());
  return periodic_orbit(bs, period, periodic_index(itinerary.word, bs.degree()), newton);
}

std::vector<PeriodicPoint> periodic_points(const BasicSetModel& bs, int period,
                                           const NewtonOptions& newton) {
  if (period < 1 || period > 24)
    throw Error(ErrorCode::PeriodTooLarge, "period must lie in [1, 24]");
  const int d = bs.degree();
  const std::uint64_t modulus = periodic_point_count(period, d);
  std::vector<PeriodicPoint> out(static_cast<std::size_t>(modulus));
  std::vector<bool> done(static_cast<std::size_t>(modulus), false);
  for (std::uint64_t k = 0; k < modulus; ++k) {
    if (done[k]) continue;
    const std::vector<OrbitPoint> orbit = periodic_orbit(bs, period, k, newton);
    std::uint64_t idx = k;
    for (int j = 0; j < period; ++j) {
      if (!done[idx]) {
        out[idx].index = idx;
        out[idx].itinerary.word = periodic_word(idx, period, d);
        out[idx].itinerary.periodic = true;
        out[idx].point = orbit[static_cast<std::size_t>(j)];
        done[idx] = true;
      }
      idx = (idx * static_cast<std::uint64_t>(d)) % modulus;
    }
  }
  return out;
}

PeriodicEnsemble build_ensemble(const BasicSetModel& bs, int period, const NewtonOptions& newton) {
  if (period < 1 || period > 24)
    throw Error(ErrorCode::PeriodTooLarge, "period must lie in [1, 24]");
  const MapFamily& map = bs.map();
  const int d = map.base_degree;
  const std::uint64_t modulus = periodic_point_count(period, d);
  PeriodicEnsemble ens;
  ens.period = period;
  ens.degree = d;
  ens.point_count = modulus;
  ens.orbit_of.assign(static_cast<std::size_t>(modulus), UINT32_MAX);

  const double product_stable = std::log(std::abs(2.0 * bs.p0()));
  const double product_unstable = std::log(static_cast<double>(d));
  for (std::uint64_t k = 0; k < modulus; ++k) {
    if (ens.orbit_of[k] != UINT32_MAX) continue;
    OrbitRecord record;
    record.representative = k;
    const auto id = static_cast<std::uint32_t>(ens.orbits.size());
    std::uint64_t idx = k;
    do {
      ens.orbit_of[idx] = id;
      ++record.length;
      idx = (idx * static_cast<std::uint64_t>(d)) % modulus;
    } while (idx != k);

    if (map.is_product()) {
      double angle = 0.0;
      idx = k;
      for (int j = 0; j < record.length; ++j) {
        angle += std::cos(kTwoPi * static_cast<double>(idx) / static_cast<double>(modulus));
        idx = (idx * static_cast<std::uint64_t>(d)) % modulus;
      }
      const double repeats = static_cast<double>(period / record.length);
      record.sums = {period * product_stable, period * product_unstable, repeats * angle};
    } else {
      const std::vector<OrbitPoint> orbit = periodic_orbit(bs, period, k, newton);
      BasisSums sums;
      for (const OrbitPoint& y : orbit) {
        sums.stable += std::log(std::abs(fiber_derivative(map, y.p(0), y.p(1))));
        sums.unstable += std::log(unstable_stretch(map, y.p, y.slope));
        sums.angle += std::cos(std::arg(y.p(1)));
      }
      Point last = apply(map, orbit.back().p);
      ens.max_residual = std::max(ens.max_residual, distance(last, orbit.front().p));
      record.sums = sums;
    }
    ens.orbits.push_back(record);
  }
  return ens;
}

SolenoidPoint sample_prehistory(const BasicSetModel& bs, const Point& x, int depth,
                                std::uint64_t seed) {
  if (depth < 0) throw Error(ErrorCode::InvalidArgument, "negative depth");
  if (!membership(bs, x)) throw Error(ErrorCode::NotOnBasicSet, "prehistory of a point off Lambda");
  const int d = bs.degree();
  Rng rng(seed);
  SolenoidPoint sp;
  sp.theta = angle_of(x(1));
  Point current = x;
  for (int i = 0; i < depth; ++i) {
    const double theta = angle_of(current(1));
    const std::vector<Point> options = in_set_preimages(bs, current);
    if (options.empty()) throw Error(ErrorCode::NotOnBasicSet, "no preimage in Lambda");
    const Point& chosen = options[rng.below(options.size())];
    const double raw = (d * angle_of(chosen(1)) - theta) / kTwoPi;
    const int beta = static_cast<int>(((std::lround(raw) % d) + d) % d);
    sp.word.push_back(static_cast<std::uint8_t>(beta));
    current = chosen;
  }
  return sp;
}

}  // namespace saddle
