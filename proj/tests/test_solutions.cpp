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

AnalyticSolution torus_pair_g22() {
    return direct_sum(balanced_torus(1.0, -1.0, 0.0, 0.0),
                      balanced_torus(0.0, 0.0, 1.0, -1.0));
}

} // namespace

TEST_CASE("catalog certification") {
    std::mt19937_64 rng(2024);
    CHECK(certify(constant_solution(random_stiefel(3, 1, rng)), certification_grid()) ==
          doctest::Approx(0.0));

    CVector v1 = CVector::Zero(3), v2 = CVector::Zero(3);
    v1(0) = 1.0;
    v2(2) = 1.0;
    CHECK(certify(chiral_wave(3, 1, circle_curve(v1, v2, 1.1)), certification_grid()) <
          1e-12);

    CHECK(certify(balanced_torus(1.3, -0.4, 0.6, 0.1), certification_grid()) < 1e-12);
    CHECK(certify(torus_pair_g22(), certification_grid()) < 1e-12);
}

TEST_CASE("unbalanced torus fails certification") {
    const AnalyticSolution bad = torus(1.0, 0.0, 1.0, 0.0, std::sqrt(0.8), std::sqrt(0.2));
    CHECK(certify(bad, certification_grid()) > 1e-3);
    CHECK_THROWS_AS(certified(bad), NumericalError);
    CHECK_THROWS_AS(torus(1, 0, 1, 0, 0.9, 0.2), std::invalid_argument); // weights
}

TEST_CASE("constant solution degenerates") {
    std::mt19937_64 rng(8);
    const AnalyticSolution sol = constant_solution(random_stiefel(2, 1, rng));
    const FieldJet jet = sol.jet(0.0, 0.0);
    const Currents c = currents(jet);
    CHECK(c.jL == doctest::Approx(0.0));
    CHECK(c.jR == doctest::Approx(0.0));
    auto [zL, zR] = tangent_vectors(jet);
    CHECK(algebra_norm(zL) == doctest::Approx(0.0));
    CHECK(algebra_norm(zR) == doctest::Approx(0.0));
    const MetricData g = induced_metric(jet);
    CHECK(g.jL == doctest::Approx(0.0));
    CHECK(g.jR == doctest::Approx(0.0));
    CHECK(g.gLR == doctest::Approx(0.0));
    CHECK(g.detG == doctest::Approx(0.0));
    CHECK_FALSE(is_regular(g));
}

TEST_CASE("direct sum with a constant leaves the currents unchanged") {
    std::mt19937_64 rng(21);
    const AnalyticSolution t = balanced_torus(1.1, -0.5, 0.4, -0.2);
    const AnalyticSolution sum = direct_sum(t, constant_solution(random_stiefel(3, 1, rng)));
    CHECK(sum.n() == 5);
    CHECK(sum.m() == 2);
    const Currents before = currents(t.jet(0.3, 0.6));
    const Currents after = currents(sum.jet(0.3, 0.6));
    CHECK(after.jL == doctest::Approx(before.jL).epsilon(1e-13));
    CHECK(after.jR == doctest::Approx(before.jR).epsilon(1e-13));
}

TEST_CASE("chiral wave properties") {
    CVector v1 = CVector::Zero(2), v2 = CVector::Zero(2);
    v1(0) = 1.0;
    v2(1) = 1.0;
    const AnalyticSolution wave = chiral_wave(2, 1, circle_curve(v1, v2, 0.9));
    CHECK(testing::jet_fd_defect(wave, 0.5, 0.25) < 1e-9);
    const Currents c1 = currents(wave.jet(0.3, 0.0));
    const Currents c2 = currents(wave.jet(0.3, 5.0));
    CHECK(c1.jR == doctest::Approx(0.0));
    CHECK(c1.jL == doctest::Approx(c2.jL).epsilon(1e-12)); // no xi_R dependence
    CHECK(induced_metric(wave.jet(0.3, 0.7)).detG == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(chiral_wave(2, 1, Curve{[](double) { return CMatrix(); }, nullptr, nullptr}),
                    std::invalid_argument);
}

TEST_CASE("balanced torus straight-line surface data") {
    const double a1 = 0.8, a2 = -1.2, b1 = 0.5, b2 = -0.3;
    const AnalyticSolution sol = balanced_torus(a1, a2, b1, b2);
    CHECK(testing::jet_fd_defect(sol, -0.2, 0.6) < 1e-9);
    const MetricData g = induced_metric(sol.jet(-0.2, 0.6));
    CHECK(std::abs(g.jL - (a1 - a2) * (a1 - a2) / 4.0) < 1e-12);
    CHECK(std::abs(g.jR - (b1 - b2) * (b1 - b2) / 4.0) < 1e-12);
    CHECK(std::abs(g.gLR + (a1 - a2) * (b1 - b2) / 4.0) < 1e-12);
    CHECK(std::abs(g.detG) < 1e-12);
}

TEST_CASE("direct sum residual and conformal/parity covariance") {
    const AnalyticSolution sum = torus_pair_g22();
    CHECK(testing::jet_fd_defect(sum, 0.4, 0.9) < 1e-9);

    SUBCASE("conformal reparametrization stays a solution") {
        RealMap alpha{[](double t) { return t + 0.3 * std::sin(t); },
                      [](double t) { return 1.0 + 0.3 * std::cos(t); },
                      [](double t) { return -0.3 * std::sin(t); }};
        RealMap beta{[](double t) { return 1.1 * t + 0.2 * std::cos(t); },
                     [](double t) { return 1.1 - 0.2 * std::sin(t); },
                     [](double t) { return -0.2 * std::cos(t); }};
        const AnalyticSolution warped = conformal_reparametrized(sum, alpha, beta);
        CHECK(testing::jet_fd_defect(warped, 0.3, -0.2) < 1e-8);
        CHECK(certify(warped, certification_grid()) < 1e-9);
    }
    SUBCASE("parity swap stays a solution") {
        const AnalyticSolution swapped = parity_swapped(balanced_torus(1.0, -0.5, 0.3, 0.9));
        CHECK(certify(swapped, certification_grid()) < 1e-12);
        const Currents orig = currents(balanced_torus(1.0, -0.5, 0.3, 0.9).jet(0.2, 0.7));
        const Currents swap = currents(swapped.jet(0.7, 0.2));
        CHECK(swap.jL == doctest::Approx(orig.jR).epsilon(1e-12));
        CHECK(swap.jR == doctest::Approx(orig.jL).epsilon(1e-12));
    }
}

TEST_CASE("finite-difference jets converge to exact jets") {
    const AnalyticSolution sol = balanced_torus(1.1, -0.7, 0.4, -0.9);
    std::vector<double> hs, errs;
    for (int nodes : {9, 17, 33}) {
        const GridField field = sample_solution(sol, unit_grid(nodes));
        double worst = 0.0;
        for (int j = 1; j < field.grid.nR - 1; ++j) {
            for (int i = 1; i < field.grid.nL - 1; ++i) {
                const FieldJet fd = fd_jet(field, i, j);
                const FieldJet& exact = field.exact_jet(i, j);
                worst = std::max(worst, (fd.dL - exact.dL).norm());
                worst = std::max(worst, (fd.dR - exact.dR).norm());
                worst = std::max(worst, (*fd.dLR - *exact.dLR).norm());
                worst = std::max(worst, (*fd.dLL - *exact.dLL).norm());
            }
        }
        hs.push_back(field.grid.hL);
        errs.push_back(worst);
    }
    CHECK(errs.back() < 1e-2);
    CHECK(testing::fitted_order(hs, errs) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("goursat solver") {
    SUBCASE("constant initial data reproduces the constant field") {
        std::mt19937_64 rng(5);
        const StiefelFrame x0 = random_stiefel(3, 1, rng);
        Curve flat{[m = x0.mat()](double) { return m; }, nullptr, nullptr};
        const GoursatResult res = goursat_solve(flat, flat, unit_grid(9));
        double worst = 0.0;
        for (const CMatrix& f : res.field.frames) worst = std::max(worst, (f - x0.mat()).norm());
        CHECK(worst < 1e-13);
    }

    SUBCASE("non-Stiefel initial data is rejected") {
        CMatrix scaled(2, 1);
        scaled << 2.0, 0.0;
        Curve bad{[scaled](double) { return scaled; }, nullptr, nullptr};
        CHECK_THROWS_AS(goursat_solve(bad, bad, unit_grid(5)), std::invalid_argument);
    }

    SUBCASE("corner mismatch is rejected") {
        std::mt19937_64 rng(6);
        const StiefelFrame xa = random_stiefel(3, 1, rng);
        const StiefelFrame xb = random_stiefel(3, 1, rng);
        Curve ca{[m = xa.mat()](double) { return m; }, nullptr, nullptr};
        Curve cb{[m = xb.mat()](double) { return m; }, nullptr, nullptr};
        CHECK_THROWS_AS(goursat_solve(ca, cb, unit_grid(5)), std::invalid_argument);
    }

    SUBCASE("reproduces the torus family at second order") {
        const AnalyticSolution sol = balanced_torus(1.2, -0.6, 0.8, -0.4);
        Curve left{[&](double t) { return sol.jet(t, 0.0).x.mat(); }, nullptr, nullptr};
        Curve right{[&](double s) { return sol.jet(0.0, s).x.mat(); }, nullptr, nullptr};
        std::vector<double> hs, errs;
        for (int nodes : {9, 17, 33}) {
            const LightConeGrid grid = unit_grid(nodes);
            const GoursatResult res = goursat_solve(left, right, grid);
            const GridField exact = sample_solution(sol, grid);
            double worst = 0.0;
            for (int j = 0; j < grid.nR; ++j) {
                for (int i = 0; i < grid.nL; ++i) {
                    const CMatrix pn = res.field.frame(i, j) * res.field.frame(i, j).adjoint();
                    const CMatrix pe = exact.frame(i, j) * exact.frame(i, j).adjoint();
                    worst = std::max(worst, (pn - pe).norm());
                    worst = std::max(worst,
                                     (res.field.frame(i, j) - exact.frame(i, j)).norm());
                }
            }
            hs.push_back(grid.hL);
            errs.push_back(worst);
        }
        CHECK(errs.back() < 2e-3);
        CHECK(testing::fitted_order(hs, errs) == doctest::Approx(2.0).epsilon(0.15));
    }

    SUBCASE("discrete residual and conservation defect converge on random data") {
        auto [left, right] = random_goursat_data(3, 1, 314159, 0.0, 0.0);
        CHECK((left.value(0.0) - right.value(0.0)).norm() < 1e-12);
        std::vector<double> hs, el_errs, cons_errs;
        for (int nodes : {17, 33, 65}) {
            const GoursatResult res = goursat_solve(left, right, unit_grid(nodes));
            hs.push_back(res.field.grid.hL);
            el_errs.push_back(el_residual_stats(res.field).max);
            cons_errs.push_back(conservation_defect_stats(res.field).max);
            CHECK(res.min_retraction_sv > 0.5);
            CHECK(min_chart_singular_value(res.field) >= 0.0);
        }
        CHECK(testing::fitted_order(hs, el_errs) == doctest::Approx(2.0).epsilon(0.2));
        CHECK(testing::fitted_order(hs, cons_errs) == doctest::Approx(2.0).epsilon(0.2));
    }
}

TEST_CASE("random initial data is reproducible in the seed") {
    auto [l1, r1] = random_goursat_data(4, 2, 99, 0.0, 0.0);
    auto [l2, r2] = random_goursat_data(4, 2, 99, 0.0, 0.0);
    CHECK((l1.value(0.37) - l2.value(0.37)).norm() == doctest::Approx(0.0));
    CHECK((r1.value(0.81) - r2.value(0.81)).norm() == doctest::Approx(0.0));
    auto [l3, r3] = random_goursat_data(4, 2, 100, 0.0, 0.0);
    CHECK((l1.value(0.37) - l3.value(0.37)).norm() > 1e-3);
}
