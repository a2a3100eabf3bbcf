#include "grsurf/immersion.hpp"

#include <cmath>

namespace grsurf {

namespace {

void check_basepoint(const LightConeGrid& g, int i, int j) {
    if (i < 0 || i >= g.nL || j < 0 || j >= g.nR) {
        throw std::invalid_argument("weierstrass_integrate: basepoint outside grid");
    }
}

} // namespace

TangentField tangent_field(const GridField& field) {
    TangentField out;
    out.grid = field.grid;
    out.n = field.n;
    out.zL.reserve(field.grid.size());
    out.zR.reserve(field.grid.size());
    for (int j = 0; j < field.grid.nR; ++j) {
        for (int i = 0; i < field.grid.nL; ++i) {
            auto [zl, zr] = tangent_vectors(node_jet(field, i, j));
            out.zL.push_back(std::move(zl));
            out.zR.push_back(std::move(zr));
        }
    }
    return out;
}

SurfaceMesh weierstrass_integrate(const GridField& field, int bi, int bj,
                                  const AlgebraElement& z0, IntegrationOrder order) {
    return weierstrass_integrate(tangent_field(field), bi, bj, z0, order);
}

SurfaceMesh weierstrass_integrate(const TangentField& t, int bi, int bj,
                                  const AlgebraElement& z0, IntegrationOrder order) {
    const LightConeGrid& g = t.grid;
    check_basepoint(g, bi, bj);
    if (z0.dim() != t.n) {
        throw std::invalid_argument("weierstrass_integrate: z0 dimension mismatch");
    }

    std::vector<CMatrix> z(g.size());
    z[g.index(bi, bj)] = z0.mat();

    // trapezoidal edge increments
    auto step_l = [&](int i0, int j, int i1) {
        return (0.5 * g.hL * (i1 - i0)) *
               (t.tangent_l(i0, j).mat() + t.tangent_l(i1, j).mat());
    };
    auto step_r = [&](int i, int j0, int j1) {
        return (0.5 * g.hR * (j1 - j0)) *
               (t.tangent_r(i, j0).mat() + t.tangent_r(i, j1).mat());
    };

    auto fill_row = [&](int j) {
        for (int i = bi + 1; i < g.nL; ++i)
            z[g.index(i, j)] = z[g.index(i - 1, j)] + step_l(i - 1, j, i);
        for (int i = bi - 1; i >= 0; --i)
            z[g.index(i, j)] = z[g.index(i + 1, j)] + step_l(i + 1, j, i);
    };
    auto fill_col = [&](int i) {
        for (int j = bj + 1; j < g.nR; ++j)
            z[g.index(i, j)] = z[g.index(i, j - 1)] + step_r(i, j - 1, j);
        for (int j = bj - 1; j >= 0; --j)
            z[g.index(i, j)] = z[g.index(i, j + 1)] + step_r(i, j + 1, j);
    };

    if (order == IntegrationOrder::RowFirst) {
        fill_row(bj);
        for (int i = 0; i < g.nL; ++i) fill_col(i);
    } else {
        fill_col(bi);
        for (int j = 0; j < g.nR; ++j) fill_row(j);
    }

    SurfaceMesh mesh;
    mesh.grid = g;
    mesh.n = t.n;
    mesh.basepoint_i = bi;
    mesh.basepoint_j = bj;
    mesh.z.reserve(g.size());
    mesh.coords.reserve(g.size());
    const SuNBasis basis = standard_basis(t.n);
    for (auto& mat : z) {
        AlgebraElement el(std::move(mat));
        mesh.coords.push_back(to_coordinates(el, basis));
        mesh.z.push_back(std::move(el));
    }
    return mesh;
}

std::vector<double> plaquette_circulations(const TangentField& t) {
    const LightConeGrid& g = t.grid;
    if (g.nL < 2 || g.nR < 2) {
        throw std::invalid_argument("plaquette_circulations: grid too small");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(g.nL - 1) * (g.nR - 1));
    for (int j = 0; j + 1 < g.nR; ++j) {
        for (int i = 0; i + 1 < g.nL; ++i) {
            // counter-clockwise: bottom, right, top (reversed), left (reversed)
            CMatrix circ =
                0.5 * g.hL * (t.tangent_l(i, j).mat() + t.tangent_l(i + 1, j).mat()) +
                0.5 * g.hR * (t.tangent_r(i + 1, j).mat() + t.tangent_r(i + 1, j + 1).mat()) -
                0.5 * g.hL * (t.tangent_l(i, j + 1).mat() + t.tangent_l(i + 1, j + 1).mat()) -
                0.5 * g.hR * (t.tangent_r(i, j).mat() + t.tangent_r(i, j + 1).mat());
            out.push_back(circ.norm());
        }
    }
    return out;
}

double loop_closedness_residual(const GridField& field) {
    return loop_closedness_residual(tangent_field(field));
}

double loop_closedness_residual(const TangentField& t) {
    const std::vector<double> circ = plaquette_circulations(t);
    double worst = 0.0;
    for (double c : circ) worst = std::max(worst, c);
    return worst / (t.grid.hL * t.grid.hR);
}

double path_difference_bound(const TangentField& t, int bi, int bj, int i, int j) {
    const LightConeGrid& g = t.grid;
    check_basepoint(g, bi, bj);
    check_basepoint(g, i, j);
    const std::vector<double> circ = plaquette_circulations(t);
    const int i_lo = std::min(bi, i), i_hi = std::max(bi, i);
    const int j_lo = std::min(bj, j), j_hi = std::max(bj, j);
    double bound = 0.0;
    for (int jj = j_lo; jj < j_hi; ++jj) {
        for (int ii = i_lo; ii < i_hi; ++ii) {
            bound += circ[static_cast<std::size_t>(ii) + static_cast<std::size_t>(g.nL - 1) * jj];
        }
    }
    return bound;
}

} // namespace grsurf
