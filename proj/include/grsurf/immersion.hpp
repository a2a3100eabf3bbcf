#pragma once

#include <vector>

#include "grsurf/solutions.hpp"
#include "grsurf/sun_algebra.hpp"

namespace grsurf {

/// Tangent vectors Z_L, Z_R of the immersed surface at every grid node.
struct TangentField {
    LightConeGrid grid;
    int n = 0;
    std::vector<AlgebraElement> zL, zR;

    const AlgebraElement& tangent_l(int i, int j) const { return zL[grid.index(i, j)]; }
    const AlgebraElement& tangent_r(int i, int j) const { return zR[grid.index(i, j)]; }
};

/// Tangents from exact jets when available, finite differences otherwise.
TangentField tangent_field(const GridField& field);

enum class IntegrationOrder {
    RowFirst,    // basepoint -> along xi_L row -> along xi_R column (canonical)
    ColumnFirst, // basepoint -> along xi_R column -> along xi_L row
};

/// The immersed surface: Z in su(N) per node plus coordinates in R^{N^2-1}
/// with respect to the standard basis ordering.
struct SurfaceMesh {
    LightConeGrid grid;
    int n = 0;
    int basepoint_i = 0, basepoint_j = 0;
    std::vector<AlgebraElement> z;
    std::vector<RVector> coords;

    const AlgebraElement& at(int i, int j) const { return z[grid.index(i, j)]; }
};

/// Integrates the tangent 1-form Z_L dxi_L + Z_R dxi_R from the basepoint with
/// the trapezoidal rule per edge; Z(basepoint) = z0.
SurfaceMesh weierstrass_integrate(const GridField& field, int basepoint_i, int basepoint_j,
                                  const AlgebraElement& z0,
                                  IntegrationOrder order = IntegrationOrder::RowFirst);

SurfaceMesh weierstrass_integrate(const TangentField& tangents, int basepoint_i,
                                  int basepoint_j, const AlgebraElement& z0,
                                  IntegrationOrder order = IntegrationOrder::RowFirst);

/// Norm of the discrete (trapezoidal) circulation of the tangent form around
/// each plaquette, indexed by the lower-left node (nL-1 x nR-1 values).
std::vector<double> plaquette_circulations(const TangentField& tangents);

/// Max circulation norm divided by the plaquette area; approximates the sup
/// norm of the exterior derivative of the tangent form. Converges to zero at
/// second order for solutions and to a positive limit otherwise.
double loop_closedness_residual(const GridField& field);
double loop_closedness_residual(const TangentField& tangents);

/// Sum of plaquette circulation norms over the axis-aligned rectangle spanned
/// by the two paths between (bi,bj) and (i,j); bounds the row-first vs
/// column-first integration difference at (i,j).
double path_difference_bound(const TangentField& tangents, int bi, int bj, int i, int j);

} // namespace grsurf
