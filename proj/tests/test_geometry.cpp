#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "grsurf/geometry.hpp"
#include "grsurf/solutions.hpp"
#include "test_support.hpp"

using namespace grsurf;

namespace {

LightConeGrid unit_grid(int nodes) {
    const double h = 1.0 / (nodes - 1);
    return LightConeGrid{0.0, 0.0, h, h, nodes, nodes};
}

AnalyticSolution plane_g22() {
    return direct_sum(balanced_torus(1.0, -1.0, 0.0, 0.0),
                      balanced_torus(0.0, 0.0, 1.0, -1.0));
}

} // namespace

TEST_CASE("induced metric closed forms") {
    SUBCASE("torus with da = 2, db = 4") {
        const AnalyticSolution sol = balanced_torus(1.0, -1.0, 2.0, -2.0);
        const MetricData g = induced_metric(sol.jet(0.3, -0.7));
        CHECK(g.jL == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(g.jR == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(g.gLR == doctest::Approx(-2.0).epsilon(1e-12));
        CHECK(std::abs(g.detG) < 1e-12);
    }
    SUBCASE("plane example has the identity metric") {
        const MetricData g = induced_metric(plane_g22().jet(0.2, 0.6));
        CHECK(g.jL == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(g.jR == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(g.gLR) < 1e-12);
        CHECK(g.detG == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("direct-sum determinant formula") {
        const double da = 1.7, db = 0.3, da2 = -0.4, db2 = 1.1;
        const AnalyticSolution sum =
            direct_sum(balanced_torus(da / 2, -da / 2, db / 2, -db / 2),
                       balanced_torus(da2 / 2, -da2 / 2, db2 / 2, -db2 / 2));
        const MetricData g = induced_metric(sum.jet(0.0, 0.0));
        const double expect = std::pow(da * db2 - da2 * db, 2) / 16.0;
        CHECK(g.detG == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("two formulas agree on random jets") {
        std::mt19937_64 rng(19);
        for (int rep = 0; rep < 15; ++rep) {
            const FieldJet jet = testing::random_valid_jet(4, 2, rng, false);
            const MetricData g = induced_metric(jet);
            auto [zL, zR] = tangent_vectors(jet);
            CHECK(std::abs(inner_product(zL, zL) - g.jL) < 1e-10);
            CHECK(std::abs(inner_product(zR, zR) - g.jR) < 1e-10);
            CHECK(std::abs(inner_product(zL, zR) - g.gLR) < 1e-10);
        }
    }
}

TEST_CASE("schwarz chain and positivity") {
    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 20; ++rep) {
        const FieldJet jet = testing::random_valid_jet(3, 1, rng, false);
        const CMatrix p = projector(jet.x);
        const Complex cross = ((jet.dL * jet.dR.adjoint()) * p).trace();
        const MetricData g = induced_metric(jet);
        CHECK(g.jL * g.jR + 1e-10 >= std::norm(cross));
        CHECK(std::norm(cross) + 1e-10 >= cross.real() * cross.real());
        CHECK(g.detG >= -1e-10);

        std::uniform_real_distribution<double> dir(-2.0, 2.0);
        const double v1 = dir(rng), v2 = dir(rng);
        CHECK(first_fundamental_form(g, v1, v2) >= -1e-10);
    }
}

TEST_CASE("regularity classification") {
    SUBCASE("balanced torus is degenerate") {
        const RegularityReport rep = regularity_test(balanced_torus(1, -1, 2, -2).jet(0, 0));
        CHECK_FALSE(rep.regular);
        CHECK(rep.reason.find("below threshold") != std::string::npos);
    }
    SUBCASE("plane example is regular") {
        const RegularityReport rep = regularity_test(plane_g22().jet(0.1, 0.4));
        CHECK(rep.regular);
        CHECK(rep.independent_condition);
    }
    SUBCASE("constant field is degenerate") {
        std::mt19937_64 rng(7);
        const RegularityReport rep =
            regularity_test(constant_solution(random_stiefel(3, 1, rng)).jet(0, 0));
        CHECK_FALSE(rep.regular);
    }
}

TEST_CASE("second derivatives of the immersion") {
    SUBCASE("plane example has none") {
        const SecondDerivativesZ d2 = second_derivatives_Z(plane_g22().jet(0.3, 0.9));
        CHECK(algebra_norm(d2.dLL) < 1e-12);
        CHECK(algebra_norm(d2.dLR) < 1e-12);
        CHECK(algebra_norm(d2.dRR) < 1e-12);
    }
    SUBCASE("balanced torus mixed and pure terms vanish") {
        const SecondDerivativesZ d2 =
            second_derivatives_Z(balanced_torus(1.2, -0.8, 0.5, -0.1).jet(0.2, 0.4));
        CHECK(algebra_norm(d2.dLR) < 1e-12);
        CHECK(algebra_norm(d2.dLL) < 1e-12);
    }
    SUBCASE("mixed derivative is orthogonal to the tangents") {
        std::mt19937_64 rng(43);
        for (int rep = 0; rep < 15; ++rep) {
            const FieldJet jet = testing::random_valid_jet(4, 2, rng, true);
            const SecondDerivativesZ d2 = second_derivatives_Z(jet);
            auto [zL, zR] = tangent_vectors(jet);
            CHECK(std::abs(inner_product(d2.dLR, zL)) < 1e-10);
            CHECK(std::abs(inner_product(d2.dLR, zR)) < 1e-10);
        }
    }
    SUBCASE("missing second derivatives are reported") {
        std::mt19937_64 rng(47);
        const FieldJet jet = testing::random_valid_jet(3, 1, rng, false);
        CHECK_THROWS_AS(second_derivatives_Z(jet), std::invalid_argument);
    }
}

TEST_CASE("second fundamental form and mean curvature") {
    SUBCASE("plane example is totally geodesic") {
        const FieldJet jet = plane_g22().jet(0.7, 0.2);
        const CurvatureData c = fundamental_form_II_and_H(jet, induced_metric(jet));
        CHECK(algebra_norm(c.iiLL) < 1e-12);
        CHECK(algebra_norm(c.iiLR) < 1e-12);
        CHECK(algebra_norm(c.iiRR) < 1e-12);
        CHECK(algebra_norm(c.h) < 1e-12);
        CHECK(gauss_equation_K(c, induced_metric(jet)) == doctest::Approx(0.0));
    }
    SUBCASE("normal parts are orthogonal to the tangents") {
        std::mt19937_64 rng(53);
        int used = 0;
        while (used < 10) {
            const FieldJet jet = testing::random_valid_jet(4, 2, rng, true);
            const MetricData g = induced_metric(jet);
            if (!is_regular(g)) continue;
            ++used;
            const CurvatureData c = fundamental_form_II_and_H(jet, g);
            auto [zL, zR] = tangent_vectors(jet);
            for (const AlgebraElement* e : {&c.iiLL, &c.iiRR, &c.h}) {
                CHECK(std::abs(inner_product(*e, zL)) < 1e-8);
                CHECK(std::abs(inner_product(*e, zR)) < 1e-8);
            }
        }
    }
    SUBCASE("degenerate metric is rejected") {
        const FieldJet jet = balanced_torus(1, -1, 0.5, -0.5).jet(0, 0);
        CHECK_THROWS_AS(fundamental_form_II_and_H(jet, induced_metric(jet)),
                        NumericalError);
    }
}

TEST_CASE("geometry field on the plane example") {
    const GridField field = sample_solution(plane_g22(), unit_grid(9));
    const GeometryField geo = compute_geometry(field);
    int k_nodes = 0;
    for (int j = 0; j < 9; ++j) {
        for (int i = 0; i < 9; ++i) {
            const std::size_t k = field.grid.index(i, j);
            CHECK(geo.regular[k] == 1);
            CHECK(geo.hasH[k] == 1);
            CHECK(std::abs(geo.absH[k]) < 1e-12);
            if (geo.hasK[k]) {
                ++k_nodes;
                CHECK(std::abs(geo.K[k]) < 1e-10);
            }
        }
    }
    CHECK(k_nodes == 7 * 7); // interior nodes only
}

TEST_CASE("curvature cross-check on a solved field") {
    auto [left, right] = random_goursat_data(3, 1, 1618, 0.0, 0.0);
    std::vector<double> hs, errs;
    for (int nodes : {17, 33, 65}) {
        const GoursatResult res = goursat_solve(left, right, unit_grid(nodes));
        const GeometryField geo = compute_geometry(res.field);
        const LightConeGrid& g = res.field.grid;
        double worst = 0.0;
        int used = 0;
        for (int j = 2; j < g.nR - 2; ++j) {
            for (int i = 2; i < g.nL - 2; ++i) {
                const std::size_t k = g.index(i, j);
                if (!geo.hasK[k] || geo.metric[k].detG < 1e-3) continue;
                const FieldJet jet = node_jet(res.field, i, j);
                const CurvatureData c = fundamental_form_II_and_H(jet, geo.metric[k]);
                worst = std::max(worst, std::abs(geo.K[k] - gauss_equation_K(c, geo.metric[k])));
                ++used;
            }
        }
        REQUIRE(used > 0);
        hs.push_back(g.hL);
        errs.push_back(worst);
    }
    CHECK(testing::fitted_order(hs, errs) > 1.0);
    CHECK(errs.back() < errs.front());
}
