#pragma once

#include <cstdint>
#include <vector>

#include "saddle/potential.hpp"
#include "saddle/random.hpp"

namespace saddle {

/// A two-sided symbolic sample. The base angle is 2 pi future / 2^64 (first
/// forward digit in the top bit); bit i of past is the backward choice
/// s_{-(i+1)}. Past digits are only meaningful for base degree 2.
struct Draw {
  std::uint64_t future = 0;
  std::uint64_t past = 0;
};

inline double draw_angle(std::uint64_t fraction) {
  return kTwoPi * static_cast<double>(fraction) * 0x1.0p-64;
}

/// Angle fraction of the i-th backward point of a draw (i <= 63, d = 2).
inline std::uint64_t past_fraction(const Draw& x, int i) {
  if (i == 0) return x.future;
  std::uint64_t top = 0;
  for (int b = 0; b < i; ++b) top |= ((x.past >> b) & 1ULL) << (64 - i + b);
  return top | (x.future >> i);
}

/// Approximate sampler for the Gibbs measure of phi: an order K-1 Markov
/// chain on digits whose conditionals come from the cylinder masses
/// exp(S_K phi) at the period-K points. Falls back to independent uniform
/// digits when every conditional is 1/2.
class GibbsSampler {
 public:
  GibbsSampler(const BasicSetModel& bs, const Potential& phi, int K = 12, int past_digits = 48);

  bool uniform() const { return uniform_; }
  int past_digits() const { return past_digits_; }

  /// count consecutive draws from the stream of rng.
  void fill(std::vector<Draw>& out, std::size_t count, Rng& rng) const;

 private:
  int degree_;
  int K_;
  int past_digits_;
  bool uniform_ = true;
  std::vector<double> forward_one_;  // P(next = 1 | previous K-1 digits)
};

/// Orbit of a sampled center with exact base angles.
struct CenterOrbit {
  Draw draw;
  std::vector<std::uint64_t> angle;  // fraction of w_j
  std::vector<OrbitPoint> orbit;     // x_0 ... x_L
};

CenterOrbit make_center(const BasicSetModel& bs, const Draw& draw, int length);

/// Fiber coordinates of the draw's realized prehistory, index i = x_{-i},
/// i = 0 ... depth. Product maps return p0 throughout.
std::vector<cplx> realize_draw(const BasicSetModel& bs, const Draw& draw, int depth);

/// Monte Carlo hit counts of the iterated balls B(n, k, z, eps) for every
/// center, every n in n_values and every k in [1, k_max].
///
/// A sample y counts when |f^j y - z_{n+j}| < eps for j < k and a prehistory
/// y_{-i} in Lambda satisfies |y_{-i} - z_{n-i}| < eps for i <= n. Product
/// maps use the nearest in-Lambda preimage in closed form; perturbed maps
/// use the sample's own prehistory, which is the only one when d' = 1.
///
/// Blocks are nested by k: cell k uses the first max(1, B / d'^(k_max - k))
/// of the B sample blocks, so every k level costs about the same and
/// collects a comparable number of hits.
struct BallCounts {
  std::uint64_t samples = 0;
  std::vector<std::uint64_t> samples_at;  // samples used for each k
  int k_max = 0;
  std::vector<int> n_values;
  // hits[(c * n_values.size() + i) * (k_max + 1) + k]
  std::vector<std::uint64_t> hits;

  double fraction(std::size_t center, std::size_t n_index, int k) const {
    return static_cast<double>(at(center, n_index, k)) /
           static_cast<double>(samples_at[static_cast<std::size_t>(k)]);
  }

  std::uint64_t at(std::size_t center, std::size_t n_index, int k) const {
    return hits[(center * n_values.size() + n_index) * static_cast<std::size_t>(k_max + 1) +
                static_cast<std::size_t>(k)];
  }
};

struct CountOptions {
  double eps = 0.5;
  std::uint64_t samples = 1 << 22;
  std::uint64_t seed = 1;
  int threads = 1;
  std::uint64_t block_size = 1 << 16;
  bool nested = true;
};

BallCounts count_balls(const BasicSetModel& bs, const GibbsSampler& sampler,
                       const std::vector<CenterOrbit>& centers, const std::vector<int>& n_values,
                       int k_max, const CountOptions& options);

}  // namespace saddle
