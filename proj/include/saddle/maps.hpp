#pragma once

#include <array>

#include "saddle/core.hpp"

namespace saddle {

enum class MapKind { Product, Perturbed };

/// Coefficients (a, b, dd, e) of the perturbation
///   eps * (a z + b w + dd z w + e w^2)
/// added to the fiber quadratic z^2 + c.
struct Perturbation {
  cplx a{0.0, 0.0};
  cplx b{0.0, 0.0};
  cplx dd{0.0, 0.0};
  cplx e{0.0, 0.0};
};

/// Skew product (z, w) -> (z^2 + c [+ perturbation], w^d) on C^2.
///
/// Product maps carry an arbitrary base degree d >= 2. Perturbed maps are
/// always quadratic in the base and reduce to the product map when eps = 0.
struct MapFamily {
  MapKind kind = MapKind::Product;
  cplx c{0.0, 0.0};
  Perturbation pert{};
  double eps = 0.0;
  int base_degree = 2;

  static MapFamily product(cplx c, int base_degree = 2);
  static MapFamily perturbed(cplx c, Perturbation pert, double eps);

  bool is_product() const { return kind == MapKind::Product; }
};

/// Jacobian of the map at a point, with its determinant.
struct Differential2 {
  Matrix2c jacobian;
  cplx determinant;
};

/// Throws InvalidArgument when the family is malformed.
void validate(const MapFamily& map);

Point apply(const MapFamily& map, const Point& p);

/// z-component F(z, w) of the map.
cplx fiber_map(const MapFamily& map, cplx z, cplx w);

/// dF/dz; the z-axis is invariant under Df so this is the stable derivative.
cplx fiber_derivative(const MapFamily& map, cplx z, cplx w);

/// dF/dw.
cplx fiber_cross_derivative(const MapFamily& map, cplx z, cplx w);

/// Derivative d w^{d-1} of the base map.
cplx base_derivative(const MapFamily& map, cplx w);

Differential2 differential(const MapFamily& map, const Point& p);

/// Slope v' with Df(p) (v, 1) parallel to (v', 1); pushes the unstable
/// direction one step forward.
cplx push_slope(const MapFamily& map, const Point& p, cplx slope);

/// |Df(p) (v, 1)| / |(v, 1)|.
double unstable_stretch(const MapFamily& map, const Point& p, cplx slope);

/// Attracting fixed point of z -> z^2 + c, the root (1 - sqrt(1 - 4c)) / 2 on
/// the branch with |2 p0| < 1.
///
/// Throws NotAttracting when neither root is attracting and Superattracting
/// when |2 p0| < 1e-8.
cplx attracting_fixed_point(cplx c);

/// Same root without the superattracting rejection (used to build basic sets
/// that are later rejected by the hyperbolicity witnesses).
cplx attracting_fixed_point_unchecked(cplx c);

/// Both roots z of F(z, w) = target for fixed w.
std::array<cplx, 2> fiber_preimages(const MapFamily& map, cplx target, cplx w);

}  // namespace saddle
