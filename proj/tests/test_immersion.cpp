#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "grsurf/immersion.hpp"
#include "grsurf/solutions.hpp"
#include "test_support.hpp"

using namespace grsurf;

namespace {

LightConeGrid unit_grid(int nodes) {
    const double h = 1.0 / (nodes - 1);
    return LightConeGrid{0.0, 0.0, h, h, nodes, nodes};
}

} // namespace

TEST_CASE("constant solution integrates to a point") {
    std::mt19937_64 rng(12);
    const AnalyticSolution sol = constant_solution(random_stiefel(3, 1, rng));
    const GridField field = sample_solution(sol, unit_grid(9));
    const AlgebraElement z0 = testing::random_algebra_element(3, rng);
    const SurfaceMesh mesh = weierstrass_integrate(field, 0, 0, z0);
    for (int j = 0; j < 9; ++j) {
        for (int i = 0; i < 9; ++i) {
            CHECK((mesh.at(i, j).mat() - z0.mat()).norm() < 1e-14);
        }
    }
    CHECK(loop_closedness_residual(field) == doctest::Approx(0.0));
}

TEST_CASE("balanced torus integrates to a straight line") {
    const double a1 = 1.0, a2 = -1.0, b1 = 0.9, b2 = 0.1; // da = 2, db = 0.8
    const AnalyticSolution sol = balanced_torus(a1, a2, b1, b2);
    const LightConeGrid grid = unit_grid(17);
    const GridField field = sample_solution(sol, grid);
    const SurfaceMesh mesh =
        weierstrass_integrate(field, 0, 0, AlgebraElement::Zero(2));
    // coordinates in the (A_12, B_12, C_1) ordering: C_1 slot carries
    // (da xi_L - db xi_R)/2, the others stay zero
    for (int j = 0; j < grid.nR; ++j) {
        for (int i = 0; i < grid.nL; ++i) {
            const RVector& c = mesh.coords[grid.index(i, j)];
            const double expect = ((a1 - a2) * grid.xiL(i) - (b1 - b2) * grid.xiR(j)) / 2.0;
            CHECK(std::abs(c(2) - expect) < 1e-12);
            CHECK(std::abs(c(0)) < 1e-12);
            CHECK(std::abs(c(1)) < 1e-12);
        }
    }
}

TEST_CASE("plane example stays in an affine 2-plane of R^15") {
    const AnalyticSolution sum = direct_sum(balanced_torus(1.0, -1.0, 0.0, 0.0),
                                            balanced_torus(0.0, 0.0, 1.0, -1.0));
    const LightConeGrid grid = unit_grid(13);
    const GridField field = sample_solution(sum, grid);
    const SurfaceMesh mesh =
        weierstrass_integrate(field, 0, 0, AlgebraElement::Zero(4));

    auto [zL, zR] = tangent_vectors(field.exact_jet(0, 0));
    const SuNBasis basis = standard_basis(4);
    RVector e1 = to_coordinates(zL, basis);
    RVector e2 = to_coordinates(zR, basis);
    e1.normalize();
    e2 -= e2.dot(e1) * e1;
    e2.normalize();
    const RVector base = mesh.coords[0];
    for (std::size_t k = 0; k < mesh.coords.size(); ++k) {
        RVector d = mesh.coords[k] - base;
        d -= d.dot(e1) * e1;
        d -= d.dot(e2) * e2;
        CHECK(d.norm() < 1e-10);
    }
}

TEST_CASE("translation freedom in the basepoint value") {
    const AnalyticSolution sol = balanced_torus(0.7, -0.2, 0.4, 0.0);
    const GridField field = sample_solution(sol, unit_grid(7));
    std::mt19937_64 rng(3);
    const AlgebraElement shift = testing::random_algebra_element(2, rng);
    const SurfaceMesh m0 = weierstrass_integrate(field, 2, 3, AlgebraElement::Zero(2));
    const SurfaceMesh m1 = weierstrass_integrate(field, 2, 3, shift);
    for (std::size_t k = 0; k < m0.z.size(); ++k) {
        CHECK((m1.z[k].mat() - m0.z[k].mat() - shift.mat()).norm() < 1e-13);
    }
    CHECK_THROWS_AS(weierstrass_integrate(field, 7, 0, AlgebraElement::Zero(2)),
                    std::invalid_argument);
}

TEST_CASE("closedness residual on solved fields converges at second order") {
    auto [left, right] = random_goursat_data(3, 1, 2718, 0.0, 0.0);
    std::vector<double> hs, errs;
    for (int nodes : {17, 33, 65}) {
        const GoursatResult res = goursat_solve(left, right, unit_grid(nodes));
        hs.push_back(res.field.grid.hL);
        errs.push_back(loop_closedness_residual(res.field));
    }
    CHECK(testing::fitted_order(hs, errs) == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("non-solution keeps a closedness defect under refinement") {
    const AnalyticSolution bad = torus(1.0, 0.0, 1.0, 0.0, std::sqrt(0.8), std::sqrt(0.2));
    // limit = ||d_L Z_R - d_R Z_L|| = 2 ||[d_L d_R P, P]||
    const double expect = 2.0 * el_residual(bad.jet(0.0, 0.0));
    double prev = 0.0;
    for (int nodes : {17, 33}) {
        const GridField field = sample_solution(bad, unit_grid(nodes));
        const double r = loop_closedness_residual(field);
        CHECK(r > 0.5 * expect);
        if (prev > 0.0) CHECK(r == doctest::Approx(prev).epsilon(0.2));
        prev = r;
    }
}

TEST_CASE("path independence is bounded by the plaquette sum") {
    auto [left, right] = random_goursat_data(3, 1, 777, 0.0, 0.0);
    const GoursatResult res = goursat_solve(left, right, unit_grid(17));
    const TangentField t = tangent_field(res.field);
    const SurfaceMesh row =
        weierstrass_integrate(t, 0, 0, AlgebraElement::Zero(3), IntegrationOrder::RowFirst);
    const SurfaceMesh col = weierstrass_integrate(t, 0, 0, AlgebraElement::Zero(3),
                                                  IntegrationOrder::ColumnFirst);
    for (int j : {4, 11, 16}) {
        for (int i : {3, 9, 16}) {
            const double diff =
                (row.at(i, j).mat() - col.at(i, j).mat()).norm();
            const double bound = path_difference_bound(t, 0, 0, i, j);
            CHECK(diff <= bound + 1e-12);
        }
    }
}

TEST_CASE("discrete derivative of Z reproduces the tangents at second order") {
    auto [left, right] = random_goursat_data(3, 1, 4242, 0.0, 0.0);
    std::vector<double> hs, errs;
    for (int nodes : {9, 17, 33}) {
        const GoursatResult res = goursat_solve(left, right, unit_grid(nodes));
        const TangentField t = tangent_field(res.field);
        const SurfaceMesh mesh =
            weierstrass_integrate(t, 0, 0, AlgebraElement::Zero(3));
        const LightConeGrid& g = res.field.grid;
        double worst = 0.0;
        for (int j = 1; j < g.nR - 1; ++j) {
            for (int i = 1; i < g.nL - 1; ++i) {
                const CMatrix dz =
                    (mesh.at(i + 1, j).mat() - mesh.at(i - 1, j).mat()) / (2.0 * g.hL);
                worst = std::max(worst, (dz - t.tangent_l(i, j).mat()).norm());
            }
        }
        hs.push_back(g.hL);
        errs.push_back(worst);
    }
    CHECK(testing::fitted_order(hs, errs) == doctest::Approx(2.0).epsilon(0.25));
}
