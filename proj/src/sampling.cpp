#include "saddle/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "saddle/parallel.hpp"
#include "saddle/symbolic.hpp"

namespace saddle {

GibbsSampler::GibbsSampler(const BasicSetModel& bs, const Potential& phi, int K, int past_digits)
    : degree_(bs.degree()), K_(K), past_digits_(past_digits) {
  if (K < 2 || K > 20) throw Error(ErrorCode::InvalidArgument, "sampler depth must lie in [2, 20]");
  if (past_digits < 0 || past_digits > 64)
    throw Error(ErrorCode::InvalidArgument, "past digits must lie in [0, 64]");
  const LinearPotential lin = linearize(phi);
  if (bs.map().is_product() && lin.angle == 0.0) return;  // constant on Lambda
  if (degree_ != 2) throw Error(ErrorCode::InvalidArgument, "Markov sampler needs base degree 2");

  const PeriodicEnsemble ens = build_ensemble(bs, K);
  const std::uint64_t states = std::uint64_t{1} << (K - 1);
  forward_one_.resize(static_cast<std::size_t>(states));
  double worst = 0.0;
  for (std::uint64_t v = 0; v < states; ++v) {
    const std::uint64_t i0 = (2 * v) % ens.point_count;
    const std::uint64_t i1 = (2 * v + 1) % ens.point_count;
    const double s0 = birkhoff(lin, ens.sums_at(i0), K);
    const double s1 = birkhoff(lin, ens.sums_at(i1), K);
    const double p1 = 1.0 / (1.0 + std::exp(s0 - s1));
    forward_one_[static_cast<std::size_t>(v)] = p1;
    worst = std::max(worst, std::abs(p1 - 0.5));
  }
  uniform_ = worst < 1e-12;
  if (uniform_) forward_one_.clear();
}

void GibbsSampler::fill(std::vector<Draw>& out, std::size_t count, Rng& rng) const {
  out.resize(count);
  const std::uint64_t past_mask =
      past_digits_ == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << past_digits_) - 1);
  if (uniform_) {
    for (Draw& x : out) {
      x.future = rng.bits();
      x.past = past_digits_ > 0 ? (rng.bits() & past_mask) : 0;
    }
    return;
  }
  const std::uint64_t mask = (std::uint64_t{1} << (K_ - 1)) - 1;
  std::uint64_t state = rng.bits() & mask;
  auto next_digit = [&]() {
    const std::uint64_t digit = rng.uniform() < forward_one_[static_cast<std::size_t>(state)] ? 1 : 0;
    state = ((state << 1) | digit) & mask;
    return digit;
  };
  for (int i = 0; i < 64; ++i) next_digit();
  for (Draw& x : out) {
    // Digits in time order: s_{-P}, ..., s_{-1}, s_0, ..., s_63.
    x.past = 0;
    for (int i = past_digits_ - 1; i >= 0; --i) x.past |= next_digit() << i;
    x.future = 0;
    for (int i = 63; i >= 0; --i) x.future |= next_digit() << i;
  }
}

std::vector<cplx> realize_draw(const BasicSetModel& bs, const Draw& draw, int depth) {
  std::vector<cplx> z(static_cast<std::size_t>(depth) + 1, bs.p0());
  if (bs.map().is_product()) return z;
  if (depth > 63) throw Error(ErrorCode::InvalidArgument, "draw realization depth above 63");
  for (int i = depth; i >= 1; --i) {
    const cplx w = std::polar(1.0, draw_angle(past_fraction(draw, i)));
    z[static_cast<std::size_t>(i - 1)] = fiber_map(bs.map(), z[static_cast<std::size_t>(i)], w);
  }
  return z;
}

CenterOrbit make_center(const BasicSetModel& bs, const Draw& draw, int length) {
  const MapFamily& map = bs.map();
  const auto d = static_cast<std::uint64_t>(map.base_degree);
  CenterOrbit c;
  c.draw = draw;
  c.angle.resize(static_cast<std::size_t>(length) + 1);
  c.angle[0] = draw.future;
  for (int j = 1; j <= length; ++j) c.angle[static_cast<std::size_t>(j)] = c.angle[static_cast<std::size_t>(j - 1)] * d;

  OrbitPoint x;
  if (map.is_product()) {
    x = {make_point(bs.p0(), std::polar(1.0, draw_angle(draw.future))), cplx{0.0, 0.0}};
  } else {
    SolenoidPoint sp;
    sp.theta = draw_angle(draw.future);
    for (int i = 0; i < bs.options().depth; ++i)
      sp.word.push_back(static_cast<std::uint8_t>((draw.past >> i) & 1ULL));
    x = realize_chain(bs, sp).endpoint();
  }
  c.orbit.push_back(x);
  for (int j = 1; j <= length; ++j) {
    const OrbitPoint& prev = c.orbit.back();
    OrbitPoint next;
    next.slope = push_slope(map, prev.p, prev.slope);
    next.p = make_point(fiber_map(map, prev.p(0), prev.p(1)),
                        std::polar(1.0, draw_angle(c.angle[static_cast<std::size_t>(j)])));
    c.orbit.push_back(next);
  }
  return c;
}

namespace {

std::uint64_t magnitude(std::uint64_t delta) {
  const auto s = static_cast<std::int64_t>(delta);
  return s < 0 ? static_cast<std::uint64_t>(0) - delta : delta;
}

double chord(std::uint64_t delta) {
  const double t = static_cast<double>(static_cast<std::int64_t>(delta)) * 0x1.0p-64;
  return 2.0 * std::abs(std::sin(std::numbers::pi * t));
}

struct Geometry {
  double eps;
  std::uint64_t window;  // |delta| < window  <=>  chord < eps
};

Geometry geometry(double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be > 0");
  Geometry g{eps, 0};
  if (eps >= 2.0) {
    g.window = std::uint64_t{1} << 63;
  } else {
    const double a = 2.0 * std::asin(0.5 * eps);
    g.window = static_cast<std::uint64_t>(a / kTwoPi * 0x1.0p64);
  }
  return g;
}

// Number of leading forward steps that pass, then the backward test.
int test_sample(const BasicSetModel& bs, const Geometry& g, const CenterOrbit& c, int n,
                int k_max, int k_min, const Draw& y, int depth) {
  const MapFamily& map = bs.map();
  const auto d = static_cast<std::uint64_t>(map.base_degree);
  const std::uint64_t delta0 = y.future - c.angle[static_cast<std::size_t>(n)];
  int passes = 0;
  if (map.is_product()) {
    std::uint64_t delta = delta0;
    for (int j = 0; j < k_max; ++j) {
      if (magnitude(delta) >= g.window) break;
      ++passes;
      delta *= d;
    }
    if (passes < k_min) return 0;
    // The nearest in-Lambda preimage divides the angular offset by d.
    auto offset = static_cast<std::int64_t>(delta0);
    for (int i = 1; i <= n; ++i) {
      offset /= static_cast<std::int64_t>(d);
      if (magnitude(static_cast<std::uint64_t>(offset)) >= g.window) return 0;
    }
    return passes;
  }

  {
    // Angles alone must already pass the first k_min steps.
    std::uint64_t delta = delta0;
    for (int j = 0; j < k_min; ++j, delta <<= 1)
      if (magnitude(delta) >= g.window) return 0;
  }
  const double eps2 = g.eps * g.eps;
  const std::vector<cplx> zs = realize_draw(bs, y, depth + n);
  cplx z = zs[0];
  for (int j = 0; j < k_max; ++j) {
    const std::uint64_t angle = y.future << j;
    const std::uint64_t delta = angle - c.angle[static_cast<std::size_t>(n + j)];
    if (magnitude(delta) >= g.window) break;
    const double ch = chord(delta);
    if (std::norm(z - c.orbit[static_cast<std::size_t>(n + j)].p(0)) + ch * ch >= eps2) break;
    ++passes;
    z = fiber_map(map, z, std::polar(1.0, draw_angle(angle)));
  }
  if (passes < k_min) return 0;
  for (int i = 1; i <= n; ++i) {
    const std::uint64_t delta = past_fraction(y, i) - c.angle[static_cast<std::size_t>(n - i)];
    if (magnitude(delta) >= g.window) return 0;
    const double ch = chord(delta);
    if (std::norm(zs[static_cast<std::size_t>(i)] - c.orbit[static_cast<std::size_t>(n - i)].p(0)) +
            ch * ch >=
        eps2)
      return 0;
  }
  return passes;
}

}  // namespace

BallCounts count_balls(const BasicSetModel& bs, const GibbsSampler& sampler,
                       const std::vector<CenterOrbit>& centers, const std::vector<int>& n_values,
                       int k_max, const CountOptions& options) {
  if (k_max < 1) throw Error(ErrorCode::InvalidArgument, "Monte Carlo balls need k >= 1");
  if (options.samples == 0 || options.block_size == 0)
    throw Error(ErrorCode::InvalidArgument, "no samples requested");
  const bool product = bs.map().is_product();
  int n_top = 0;
  for (int n : n_values) {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative n");
    n_top = std::max(n_top, n);
  }
  for (const CenterOrbit& c : centers)
    if (static_cast<int>(c.angle.size()) < n_top + k_max)
      throw Error(ErrorCode::InvalidArgument, "center orbit shorter than n + k");
  const int depth = bs.options().depth;
  if (!product) {
    if (bs.degree() != 2) throw Error(ErrorCode::InvalidArgument, "perturbed maps are quadratic");
    if (depth + n_top > std::min(63, sampler.past_digits()))
      throw Error(ErrorCode::InvalidArgument, "sampler keeps too few past digits");
  }

  const Geometry g = geometry(options.eps);
  const auto d = static_cast<std::uint64_t>(bs.degree());
  const std::size_t stride = static_cast<std::size_t>(k_max + 1);
  const std::size_t cells = centers.size() * n_values.size() * stride;
  const std::uint64_t blocks = (options.samples + options.block_size - 1) / options.block_size;
  // blocks_for[k]: number of leading blocks whose samples feed cell k.
  std::vector<std::uint64_t> blocks_for(stride, blocks);
  if (options.nested) {
    for (int k = k_max - 1; k >= 1; --k)
      blocks_for[static_cast<std::size_t>(k)] =
          std::max<std::uint64_t>(1, blocks_for[static_cast<std::size_t>(k + 1)] / d);
  }
  // The window narrows by d per step only while (d + 1) * a stays below 2 pi.
  const bool narrow = static_cast<double>(g.window) * (d + 1) < 0x1.0p64;
  std::vector<std::vector<std::uint64_t>> partial(static_cast<std::size_t>(blocks));

  parallel_for(blocks, options.threads, [&](std::uint64_t b) {
    int k_min = 1;
    while (k_min <= k_max && b >= blocks_for[static_cast<std::size_t>(k_min)]) ++k_min;
    if (k_min > k_max) return;
    const std::uint64_t first = b * options.block_size;
    const std::size_t count =
        static_cast<std::size_t>(std::min(options.block_size, options.samples - first));
    Rng rng(derive_seed(options.seed, b));
    std::vector<Draw> draws;
    sampler.fill(draws, count, rng);
    std::sort(draws.begin(), draws.end(),
              [](const Draw& x, const Draw& y) { return x.future < y.future; });
    std::vector<std::uint64_t> hits(cells, 0);
    auto lower = [&](std::uint64_t v) {
      return std::lower_bound(draws.begin(), draws.end(), v,
                              [](const Draw& x, std::uint64_t t) { return x.future < t; });
    };
    auto upper = [&](std::uint64_t v) {
      return std::upper_bound(draws.begin(), draws.end(), v,
                              [](std::uint64_t t, const Draw& x) { return t < x.future; });
    };
    std::uint64_t window = g.window;
    if (narrow)
      for (int j = 1; j < k_min; ++j) window = window / d + 1;
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
        const int n = n_values[ni];
        const std::uint64_t mid = centers[ci].angle[static_cast<std::size_t>(n)];
        const std::uint64_t lo = mid - window;
        const std::uint64_t hi = mid + window;
        std::uint64_t* row = &hits[(ci * n_values.size() + ni) * stride];
        auto visit = [&](auto from, auto to) {
          for (auto it = from; it != to; ++it) {
            const int passes = test_sample(bs, g, centers[ci], n, k_max, k_min, *it, depth);
            for (int k = k_min; k <= passes; ++k) ++row[k];
          }
        };
        if (window >= (std::uint64_t{1} << 63)) {
          visit(draws.begin(), draws.end());
        } else if (lo <= hi) {
          visit(lower(lo), upper(hi));
        } else {
          visit(lower(lo), draws.end());
          visit(draws.begin(), upper(hi));
        }
      }
    }
    partial[static_cast<std::size_t>(b)] = std::move(hits);
  });

  BallCounts out;
  out.samples = options.samples;
  out.samples_at.assign(stride, 0);
  for (std::size_t k = 1; k < stride; ++k)
    out.samples_at[k] = std::min(options.samples, blocks_for[k] * options.block_size);
  out.k_max = k_max;
  out.n_values = n_values;
  out.hits.assign(cells, 0);
  for (const auto& hits : partial)
    if (!hits.empty())
      for (std::size_t i = 0; i < cells; ++i) out.hits[i] += hits[i];
  return out;
}

}  // namespace saddle
