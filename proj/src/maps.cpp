#include "saddle/maps.hpp"

#include <cmath>

namespace saddle {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotAttracting: return "NotAttracting";
    case ErrorCode::Superattracting: return "Superattracting";
    case ErrorCode::CriticalOnSet: return "CriticalOnSet";
    case ErrorCode::ConeCollapse: return "ConeCollapse";
    case ErrorCode::NotOnBasicSet: return "NotOnBasicSet";
    case ErrorCode::DepthInsufficient: return "DepthInsufficient";
    case ErrorCode::AmbiguousMembership: return "AmbiguousMembership";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::PeriodTooLarge: return "PeriodTooLarge";
    case ErrorCode::NotBaseOnly: return "NotBaseOnly";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::SignViolation: return "SignViolation";
    case ErrorCode::DegenerateExponents: return "DegenerateExponents";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

MapFamily MapFamily::product(cplx c, int base_degree) {
  MapFamily m;
  m.kind = MapKind::Product;
  m.c = c;
  m.base_degree = base_degree;
  validate(m);
  return m;
}

MapFamily MapFamily::perturbed(cplx c, Perturbation pert, double eps) {
  MapFamily m;
  m.kind = MapKind::Perturbed;
  m.c = c;
  m.pert = pert;
  m.eps = eps;
  m.base_degree = 2;
  validate(m);
  return m;
}

void validate(const MapFamily& map) {
  if (map.base_degree < 2) throw Error(ErrorCode::InvalidArgument, "base degree must be >= 2");
  if (map.kind == MapKind::Perturbed && map.base_degree != 2)
    throw Error(ErrorCode::InvalidArgument, "perturbed family is quadratic in the base");
  if (!(map.eps >= 0.0) || !std::isfinite(map.eps))
    throw Error(ErrorCode::InvalidArgument, "eps must be finite and >= 0");
  auto finite = [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); };
  if (!finite(map.c) || !finite(map.pert.a) || !finite(map.pert.b) || !finite(map.pert.dd) ||
      !finite(map.pert.e))
    throw Error(ErrorCode::InvalidArgument, "non-finite coefficient");
}

namespace {

cplx power(cplx w, int d) {
  cplx r = w;
  for (int i = 1; i < d; ++i) r *= w;
  return r;
}

}  // namespace

cplx fiber_map(const MapFamily& map, cplx z, cplx w) {
  cplx value = z * z + map.c;
  if (map.kind == MapKind::Perturbed) {
    const Perturbation& q = map.pert;
    value += map.eps * (q.a * z + q.b * w + q.dd * z * w + q.e * w * w);
  }
  return value;
}

cplx fiber_derivative(const MapFamily& map, cplx z, cplx w) {
  cplx value = 2.0 * z;
  if (map.kind == MapKind::Perturbed) value += map.eps * (map.pert.a + map.pert.dd * w);
  return value;
}

cplx fiber_cross_derivative(const MapFamily& map, cplx z, cplx w) {
  if (map.kind == MapKind::Product) return {0.0, 0.0};
  return map.eps * (map.pert.b + map.pert.dd * z + 2.0 * map.pert.e * w);
}

cplx base_derivative(const MapFamily& map, cplx w) {
  return static_cast<double>(map.base_degree) * power(w, map.base_degree - 1);
}

Point apply(const MapFamily& map, const Point& p) {
  return make_point(fiber_map(map, p(0), p(1)), power(p(1), map.base_degree));
}

Differential2 differential(const MapFamily& map, const Point& p) {
  Differential2 out;
  const cplx z = p(0);
  const cplx w = p(1);
  out.jacobian << fiber_derivative(map, z, w), fiber_cross_derivative(map, z, w), cplx{0.0, 0.0},
      base_derivative(map, w);
  out.determinant = out.jacobian.determinant();
  return out;
}

cplx attracting_fixed_point_unchecked(cplx c) {
  const cplx root = std::sqrt(cplx{1.0, 0.0} - 4.0 * c);
  const cplx minus = 0.5 * (cplx{1.0, 0.0} - root);
  const cplx plus = 0.5 * (cplx{1.0, 0.0} + root);
  if (std::abs(2.0 * minus) < 1.0) return minus;
  if (std::abs(2.0 * plus) < 1.0) return plus;
  throw Error(ErrorCode::NotAttracting,
              "no fixed point of z^2 + c has multiplier of modulus < 1");
}

cplx attracting_fixed_point(cplx c) {
  const cplx p0 = attracting_fixed_point_unchecked(c);
  if (std::abs(2.0 * p0) < 1e-8)
    throw Error(ErrorCode::Superattracting, "multiplier |2 p0| below 1e-8");
  return p0;
}

std::array<cplx, 2> fiber_preimages(const MapFamily& map, cplx target, cplx w) {
  // z^2 + B z + C = 0
  cplx B{0.0, 0.0};
  cplx C = map.c - target;
  if (map.kind == MapKind::Perturbed) {
    const Perturbation& q = map.pert;
    B = map.eps * (q.a + q.dd * w);
    C += map.eps * (q.b * w + q.e * w * w);
  }
  const cplx disc = std::sqrt(B * B - 4.0 * C);
  // Pick the sign that avoids cancellation, then use Vieta for the other root.
  const cplx s = (std::real(std::conj(B) * disc) >= 0.0) ? disc : -disc;
  const cplx q = -0.5 * (B + s);
  if (std::abs(q) == 0.0) return {cplx{0.0, 0.0}, cplx{0.0, 0.0}};
  return {q, C / q};
}

}  // namespace saddle

namespace saddle {

cplx push_slope(const MapFamily& map, const Point& p, cplx slope) {
  const cplx z = p(0);
  const cplx w = p(1);
  return (fiber_derivative(map, z, w) * slope + fiber_cross_derivative(map, z, w)) /
         base_derivative(map, w);
}

double unstable_stretch(const MapFamily& map, const Point& p, cplx slope) {
  const cplx z = p(0);
  const cplx w = p(1);
  const cplx top = fiber_derivative(map, z, w) * slope + fiber_cross_derivative(map, z, w);
  const cplx bottom = base_derivative(map, w);
  return std::sqrt(std::norm(top) + std::norm(bottom)) / std::sqrt(1.0 + std::norm(slope));
}

}  // namespace saddle
