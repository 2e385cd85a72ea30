#include "saddle/potential.hpp"

#include <cmath>
#include <sstream>

namespace saddle {

Potential Potential::zero() { return {}; }

Potential Potential::constant(double kappa) { return {PotentialKind::Constant, kappa, {}}; }

Potential Potential::stable_log(double t) { return {PotentialKind::StableLog, t, {}}; }

Potential Potential::unstable_log(double s) { return {PotentialKind::UnstableLog, s, {}}; }

Potential Potential::angle_harmonic(double alpha) {
  return {PotentialKind::AngleHarmonic, alpha, {}};
}

Potential Potential::sum(std::vector<Potential> terms) {
  return {PotentialKind::Sum, 0.0, std::move(terms)};
}

LinearPotential linearize(const Potential& phi) {
  LinearPotential out;
  switch (phi.kind) {
    case PotentialKind::Zero: break;
    case PotentialKind::Constant: out.constant = phi.value; break;
    case PotentialKind::StableLog: out.stable = phi.value; break;
    case PotentialKind::UnstableLog: out.unstable = phi.value; break;
    case PotentialKind::AngleHarmonic: out.angle = phi.value; break;
    case PotentialKind::Sum:
      for (const Potential& term : phi.terms) {
        const LinearPotential part = linearize(term);
        out.constant += part.constant;
        out.stable += part.stable;
        out.unstable += part.unstable;
        out.angle += part.angle;
      }
      break;
  }
  if (!std::isfinite(out.constant) || !std::isfinite(out.stable) || !std::isfinite(out.unstable) ||
      !std::isfinite(out.angle))
    throw Error(ErrorCode::InvalidArgument, "non-finite potential parameter");
  return out;
}

Potential shifted(const Potential& phi, double kappa) {
  return Potential::sum({phi, Potential::constant(kappa)});
}

double evaluate(const MapFamily& map, const LinearPotential& phi, const OrbitPoint& x) {
  double value = phi.constant;
  if (phi.stable != 0.0)
    value += phi.stable * std::log(std::abs(fiber_derivative(map, x.p(0), x.p(1))));
  if (phi.unstable != 0.0) value += phi.unstable * std::log(unstable_stretch(map, x.p, x.slope));
  if (phi.angle != 0.0) value += phi.angle * std::cos(std::arg(x.p(1)));
  return value;
}

double evaluate(const MapFamily& map, const Potential& phi, const OrbitPoint& x) {
  return evaluate(map, linearize(phi), x);
}

bool base_only(const MapFamily& map, const Potential& phi) {
  if (map.is_product()) return true;
  const LinearPotential lin = linearize(phi);
  return lin.stable == 0.0 && lin.unstable == 0.0;
}

std::string describe(const Potential& phi) {
  std::ostringstream out;
  out.precision(17);
  switch (phi.kind) {
    case PotentialKind::Zero: out << "Zero"; break;
    case PotentialKind::Constant: out << "Constant(" << phi.value << ")"; break;
    case PotentialKind::StableLog: out << "StableLog(" << phi.value << ")"; break;
    case PotentialKind::UnstableLog: out << "UnstableLog(" << phi.value << ")"; break;
    case PotentialKind::AngleHarmonic: out << "AngleHarmonic(" << phi.value << ")"; break;
    case PotentialKind::Sum:
      out << "Sum(";
      for (std::size_t i = 0; i < phi.terms.size(); ++i) out << (i ? ", " : "") << describe(phi.terms[i]);
      out << ")";
      break;
  }
  return out.str();
}

}  // namespace saddle
