#include "grsurf/solutions.hpp"

#include <array>
#include <cmath>

namespace grsurf {

namespace {

constexpr Complex kI(0.0, 1.0);

struct Stencil {
    std::array<double, 4> c{};
    std::array<int, 4> off{};
    int len = 0;
};

Stencil d1_stencil(int i, int n) {
    if (i == 0) return {{-1.5, 2.0, -0.5}, {0, 1, 2}, 3};
    if (i == n - 1) return {{1.5, -2.0, 0.5}, {0, -1, -2}, 3};
    return {{-0.5, 0.5}, {-1, 1}, 2};
}

Stencil d2_stencil(int i, int n) {
    if (i == 0) return {{2.0, -5.0, 4.0, -1.0}, {0, 1, 2, 3}, 4};
    if (i == n - 1) return {{2.0, -5.0, 4.0, -1.0}, {0, -1, -2, -3}, 4};
    return {{1.0, -2.0, 1.0}, {-1, 0, 1}, 3};
}

/// Right-hand side of d_L d_R X = F fixed by the projected field equation
/// plus the constraint; the anti-hermitian gauge component is set to zero.
CMatrix goursat_rhs(const CMatrix& x, const CMatrix& xl, const CMatrix& xr) {
    const CMatrix t = xl * (x.adjoint() * xr) + xr * (x.adjoint() * xl);
    const CMatrix m = -0.5 * (xl.adjoint() * xr + xr.adjoint() * xl);
    return t - x * (x.adjoint() * t) + x * m;
}

} // namespace

void LightConeGrid::validate() const {
    if (!(hL > 0.0) || !(hR > 0.0)) {
        throw std::invalid_argument("LightConeGrid: spacings must be positive");
    }
    if (nL < 2 || nR < 2) {
        throw std::invalid_argument("LightConeGrid: need at least 2x2 nodes");
    }
}

LightConeGrid certification_grid() {
    return LightConeGrid{0.0, 0.0, 1.0 / 16.0, 1.0 / 16.0, 17, 17};
}

double certify(const AnalyticSolution& sol, const LightConeGrid& grid, bool validate_jets) {
    grid.validate();
    double worst = 0.0;
    for (int j = 0; j < grid.nR; ++j) {
        for (int i = 0; i < grid.nL; ++i) {
            FieldJet jet = sol.jet(grid.xiL(i), grid.xiR(j));
            if (validate_jets) validate_jet(jet);
            worst = std::max(worst, el_residual(jet));
        }
    }
    return worst;
}

AnalyticSolution certified(AnalyticSolution sol, double tol) {
    const double worst = certify(sol, certification_grid());
    if (worst > tol) {
        throw NumericalError("catalog admission failed for '" + sol.name() +
                             "': residual " + std::to_string(worst));
    }
    return sol;
}

AnalyticSolution constant_solution(const StiefelFrame& x0) {
    const CMatrix zero = CMatrix::Zero(x0.n(), x0.m());
    auto eval = [x0, zero](double, double) {
        return FieldJet{x0, zero, zero, zero, zero, zero};
    };
    return certified(AnalyticSolution(x0.n(), x0.m(), "constant", std::move(eval)));
}

AnalyticSolution chiral_wave(int n, int m, Curve f) {
    if (!f.value || !f.d1) {
        throw std::invalid_argument("chiral_wave: curve must provide value and d1");
    }
    const CMatrix zero = CMatrix::Zero(n, m);
    auto eval = [f, zero](double xiL, double) {
        FieldJet jet{StiefelFrame(f.value(xiL)), f.d1(xiL), zero, {}, zero, zero};
        if (f.d2) jet.dLL = f.d2(xiL);
        return jet;
    };
    return certified(AnalyticSolution(n, m, "chiral_wave", std::move(eval)));
}

AnalyticSolution torus(double a1, double a2, double b1, double b2,
                       double c1, double c2) {
    if (std::abs(c1 * c1 + c2 * c2 - 1.0) > 1e-12) {
        throw std::invalid_argument("torus: weights must satisfy c1^2 + c2^2 = 1");
    }
    auto eval = [=](double xiL, double xiR) {
        const std::array<double, 2> a{a1, a2}, b{b1, b2}, c{c1, c2};
        CMatrix x(2, 1), dl(2, 1), dr(2, 1), dll(2, 1), dlr(2, 1), drr(2, 1);
        for (int k = 0; k < 2; ++k) {
            const Complex e = c[k] * std::exp(kI * (a[k] * xiL + b[k] * xiR));
            x(k, 0) = e;
            dl(k, 0) = kI * a[k] * e;
            dr(k, 0) = kI * b[k] * e;
            dll(k, 0) = -a[k] * a[k] * e;
            dlr(k, 0) = -a[k] * b[k] * e;
            drr(k, 0) = -b[k] * b[k] * e;
        }
        return FieldJet{StiefelFrame(std::move(x)), std::move(dl), std::move(dr),
                        std::move(dll), std::move(dlr), std::move(drr)};
    };
    return AnalyticSolution(2, 1, "torus", std::move(eval));
}

AnalyticSolution balanced_torus(double a1, double a2, double b1, double b2) {
    const double c = 1.0 / std::sqrt(2.0);
    return certified(torus(a1, a2, b1, b2, c, c));
}

AnalyticSolution direct_sum(const AnalyticSolution& s1, const AnalyticSolution& s2) {
    const int n = s1.n() + s2.n();
    const int m = s1.m() + s2.m();
    const int n1 = s1.n(), m1 = s1.m(), n2 = s2.n(), m2 = s2.m();
    auto block = [=](const CMatrix& a, const CMatrix& b) {
        CMatrix out = CMatrix::Zero(n, m);
        out.topLeftCorner(n1, m1) = a;
        out.bottomRightCorner(n2, m2) = b;
        return out;
    };
    auto blockOpt = [=](const std::optional<CMatrix>& a, const std::optional<CMatrix>& b)
        -> std::optional<CMatrix> {
        if (!a || !b) return std::nullopt;
        return block(*a, *b);
    };
    auto eval = [=](double xiL, double xiR) {
        FieldJet j1 = s1.jet(xiL, xiR);
        FieldJet j2 = s2.jet(xiL, xiR);
        FieldJet out{StiefelFrame(block(j1.x.mat(), j2.x.mat())),
                     block(j1.dL, j2.dL), block(j1.dR, j2.dR),
                     blockOpt(j1.dLL, j2.dLL), blockOpt(j1.dLR, j2.dLR),
                     blockOpt(j1.dRR, j2.dRR)};
        return out;
    };
    return certified(AnalyticSolution(
        n, m, "direct_sum(" + s1.name() + "," + s2.name() + ")", std::move(eval)));
}

AnalyticSolution conformal_reparametrized(const AnalyticSolution& s,
                                          RealMap alpha, RealMap beta) {
    if (!alpha.f || !alpha.d1 || !beta.f || !beta.d1) {
        throw std::invalid_argument("conformal_reparametrized: maps need f and d1");
    }
    auto eval = [s, alpha, beta](double xiL, double xiR) {
        const double u = alpha.f(xiL), v = beta.f(xiR);
        const double au = alpha.d1(xiL), bv = beta.d1(xiR);
        FieldJet base = s.jet(u, v);
        FieldJet out{base.x, au * base.dL, bv * base.dR, {}, {}, {}};
        if (base.dLR) out.dLR = (au * bv) * (*base.dLR);
        if (base.dLL && alpha.d2) out.dLL = alpha.d2(xiL) * base.dL + (au * au) * (*base.dLL);
        if (base.dRR && beta.d2) out.dRR = beta.d2(xiR) * base.dR + (bv * bv) * (*base.dRR);
        return out;
    };
    return certified(AnalyticSolution(s.n(), s.m(), s.name() + "+conformal", std::move(eval)),
                     1e-9);
}

AnalyticSolution parity_swapped(const AnalyticSolution& s) {
    auto eval = [s](double xiL, double xiR) {
        FieldJet base = s.jet(xiR, xiL);
        FieldJet out{base.x, base.dR, base.dL, {}, {}, {}};
        out.dLL = base.dRR;
        out.dLR = base.dLR;
        out.dRR = base.dLL;
        return out;
    };
    return certified(AnalyticSolution(s.n(), s.m(), s.name() + "+parity", std::move(eval)));
}

Curve circle_curve(const CVector& v1, const CVector& v2, double omega) {
    if (v1.size() != v2.size()) {
        throw std::invalid_argument("circle_curve: dimension mismatch");
    }
    const double tol = 1e-10;
    if (std::abs(v1.norm() - 1.0) > tol || std::abs(v2.norm() - 1.0) > tol ||
        std::abs(v1.dot(v2)) > tol) {
        throw std::invalid_argument("circle_curve: v1, v2 must be orthonormal");
    }
    Curve c;
    c.value = [v1, v2, omega](double t) -> CMatrix {
        return std::cos(omega * t) * v1 + std::sin(omega * t) * v2;
    };
    c.d1 = [v1, v2, omega](double t) -> CMatrix {
        return omega * (-std::sin(omega * t) * v1 + std::cos(omega * t) * v2);
    };
    c.d2 = [v1, v2, omega](double t) -> CMatrix {
        return (-omega * omega) * (std::cos(omega * t) * v1 + std::sin(omega * t) * v2);
    };
    return c;
}

GridField sample_solution(const AnalyticSolution& sol, const LightConeGrid& grid) {
    grid.validate();
    GridField out;
    out.grid = grid;
    out.n = sol.n();
    out.m = sol.m();
    out.provenance = Provenance::Analytic;
    out.frames.reserve(grid.size());
    out.jets.reserve(grid.size());
    for (int j = 0; j < grid.nR; ++j) {
        for (int i = 0; i < grid.nL; ++i) {
            FieldJet jet = sol.jet(grid.xiL(i), grid.xiR(j));
            out.frames.push_back(jet.x.mat());
            out.jets.push_back(std::move(jet));
        }
    }
    return out;
}

FieldJet fd_jet(const GridField& field, int i, int j) {
    const LightConeGrid& g = field.grid;
    if (g.nL < 4 || g.nR < 4) {
        throw std::invalid_argument("fd_jet: grid too small for second-order stencils");
    }
    auto at = [&](int ii, int jj) -> const CMatrix& { return field.frame(ii, jj); };

    auto apply_d = [&](const Stencil& s, bool along_l, int io, int jo, double h) {
        CMatrix acc = CMatrix::Zero(field.n, field.m);
        for (int k = 0; k < s.len; ++k) {
            acc += s.c[k] * (along_l ? at(io + s.off[k], jo) : at(io, jo + s.off[k]));
        }
        return CMatrix(acc / h);
    };

    const Stencil sl1 = d1_stencil(i, g.nL), sr1 = d1_stencil(j, g.nR);
    const Stencil sl2 = d2_stencil(i, g.nL), sr2 = d2_stencil(j, g.nR);

    FieldJet jet{StiefelFrame(at(i, j)),
                 apply_d(sl1, true, i, j, g.hL),
                 apply_d(sr1, false, i, j, g.hR),
                 apply_d(sl2, true, i, j, g.hL * g.hL),
                 CMatrix::Zero(field.n, field.m),
                 apply_d(sr2, false, i, j, g.hR * g.hR)};

    // mixed derivative: compose the two first-derivative stencils
    CMatrix mixed = CMatrix::Zero(field.n, field.m);
    for (int kr = 0; kr < sr1.len; ++kr) {
        mixed += sr1.c[kr] * apply_d(sl1, true, i, j + sr1.off[kr], g.hL);
    }
    jet.dLR = mixed / g.hR;
    return jet;
}

FieldJet node_jet(const GridField& field, int i, int j) {
    if (field.has_exact_jets()) return field.exact_jet(i, j);
    return fd_jet(field, i, j);
}

GoursatResult goursat_solve(const Curve& leftData, const Curve& rightData,
                            const LightConeGrid& grid) {
    grid.validate();
    if (!leftData.value || !rightData.value) {
        throw std::invalid_argument("goursat_solve: initial curves must provide values");
    }
    const CMatrix corner_l = leftData.value(grid.xiL0);
    const CMatrix corner_r = rightData.value(grid.xiR0);
    if ((corner_l - corner_r).norm() > 1e-8) {
        throw std::invalid_argument("goursat_solve: initial curves disagree at the corner");
    }
    const int n = static_cast<int>(corner_l.rows());
    const int m = static_cast<int>(corner_l.cols());

    GridField field;
    field.grid = grid;
    field.n = n;
    field.m = m;
    field.provenance = Provenance::Solved;
    field.frames.assign(grid.size(), CMatrix());

    auto admit = [&](const CMatrix& x, int i, int j, const char* which) {
        if (StiefelFrame::constraint_defect(x) > kStiefelTol) {
            throw std::invalid_argument(std::string("goursat_solve: ") + which +
                                        " data not Stiefel-valued at node (" +
                                        std::to_string(i) + "," + std::to_string(j) + ")");
        }
    };

    for (int i = 0; i < grid.nL; ++i) {
        CMatrix x = leftData.value(grid.xiL(i));
        admit(x, i, 0, "left");
        field.frames[grid.index(i, 0)] = std::move(x);
    }
    for (int j = 1; j < grid.nR; ++j) {
        CMatrix x = rightData.value(grid.xiR(j));
        admit(x, 0, j, "right");
        field.frames[grid.index(0, j)] = std::move(x);
    }

    double min_sv = 1e300;
    const double hl = grid.hL, hr = grid.hR;
    for (int j = 0; j + 1 < grid.nR; ++j) {
        for (int i = 0; i + 1 < grid.nL; ++i) {
            const CMatrix& x00 = field.frames[grid.index(i, j)];
            const CMatrix& x10 = field.frames[grid.index(i + 1, j)];
            const CMatrix& x01 = field.frames[grid.index(i, j + 1)];
            const CMatrix base = x10 + x01 - x00;
            CMatrix xp = base;
            for (int pass = 0; pass < 2; ++pass) {
                const CMatrix xc = 0.25 * (x00 + x10 + x01 + xp);
                const CMatrix xl = (x10 - x00 + xp - x01) / (2.0 * hl);
                const CMatrix xr = (x01 - x00 + xp - x10) / (2.0 * hr);
                xp = base + (hl * hr) * goursat_rhs(xc, xl, xr);
            }
            if (!xp.allFinite()) {
                throw NumericalError("goursat_solve: divergent update at node (" +
                                     std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                     "); reduce the step");
            }
            double sv = 0.0;
            CMatrix xn = polar_retract(xp, &sv);
            min_sv = std::min(min_sv, sv);
            if (sv < 1e-6) {
                throw NumericalError("goursat_solve: rank-deficient update at node (" +
                                     std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
            }
            field.frames[grid.index(i + 1, j + 1)] = std::move(xn);
        }
    }

    GoursatResult result;
    result.min_retraction_sv = min_sv;
    result.min_chart_sv = 0.0;
    result.field = std::move(field);
    result.min_chart_sv = min_chart_singular_value(result.field);
    return result;
}

Curve random_trig_stiefel_curve(int n, int m, std::uint64_t seed, double amplitude,
                                int harmonics, double period) {
    if (n < 2 || m < 1 || m >= n) {
        throw std::invalid_argument("random_trig_stiefel_curve: need N > m >= 1");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto draw = [&]() {
        CMatrix a(n, m);
        for (int c = 0; c < m; ++c) {
            for (int r = 0; r < n; ++r) {
                a(r, c) = Complex(gauss(rng), gauss(rng));
            }
        }
        return a;
    };

    CMatrix c0 = CMatrix::Zero(n, m);
    c0.topRows(m) = CMatrix::Identity(m, m);
    c0 += (0.2 * amplitude) * draw();

    std::vector<CMatrix> cosc, sinc;
    for (int k = 1; k <= harmonics; ++k) {
        const double scale = amplitude / (k * k);
        cosc.push_back(scale * draw());
        sinc.push_back(scale * draw());
    }
    const double w0 = 2.0 * M_PI / period;

    Curve curve;
    curve.value = [=](double t) -> CMatrix {
        CMatrix raw = c0;
        for (int k = 1; k <= harmonics; ++k) {
            raw += std::cos(k * w0 * t) * cosc[k - 1] + std::sin(k * w0 * t) * sinc[k - 1];
        }
        return polar_retract(raw);
    };
    return curve;
}

std::pair<Curve, Curve> random_goursat_data(int n, int m, std::uint64_t seed,
                                            double xiL0, double xiR0,
                                            double amplitude, int harmonics) {
    Curve left = random_trig_stiefel_curve(n, m, seed, amplitude, harmonics);
    Curve rawR = random_trig_stiefel_curve(n, m, seed ^ 0x9e3779b97f4a7c15ull, amplitude,
                                           harmonics);
    // shift the right curve so both pass through the same corner frame, then
    // re-retract; the shifted matrix stays full rank for moderate amplitudes
    const CMatrix shift = left.value(xiL0) - rawR.value(xiR0);
    Curve right;
    right.value = [rawR, shift](double s) -> CMatrix {
        return polar_retract(rawR.value(s) + shift);
    };
    return {left, right};
}

CMatrix random_special_unitary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix a(n, n);
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < n; ++r) {
            a(r, c) = Complex(gauss(rng), gauss(rng));
        }
    }
    Eigen::HouseholderQR<CMatrix> qr(a);
    CMatrix q = qr.householderQ();
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // fix column phases so the factorization is unique, then the determinant
    for (int c = 0; c < n; ++c) {
        const Complex d = r(c, c);
        if (std::abs(d) > 0.0) q.col(c) *= d / std::abs(d);
    }
    q.col(n - 1) /= q.determinant();
    return q;
}

StiefelFrame random_stiefel(int n, int m, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix a(n, m);
    for (int c = 0; c < m; ++c) {
        for (int r = 0; r < n; ++r) {
            a(r, c) = Complex(gauss(rng), gauss(rng));
        }
    }
    return StiefelFrame(polar_retract(a));
}

ResidualStats el_residual_stats(const GridField& field) {
    ResidualStats stats;
    double sumsq = 0.0;
    for (int j = 0; j < field.grid.nR; ++j) {
        for (int i = 0; i < field.grid.nL; ++i) {
            if (!field.grid.interior(i, j, 1)) continue;
            const double r = el_residual(node_jet(field, i, j));
            stats.max = std::max(stats.max, r);
            sumsq += r * r;
            ++stats.nodes;
        }
    }
    stats.rms = stats.nodes ? std::sqrt(sumsq / stats.nodes) : 0.0;
    return stats;
}

ResidualStats conservation_defect_stats(const GridField& field) {
    const LightConeGrid& g = field.grid;
    std::vector<double> jl(g.size()), jr(g.size());
    for (int j = 0; j < g.nR; ++j) {
        for (int i = 0; i < g.nL; ++i) {
            const Currents c = currents(node_jet(field, i, j));
            jl[g.index(i, j)] = c.jL;
            jr[g.index(i, j)] = c.jR;
        }
    }
    ResidualStats stats;
    double sumsq = 0.0;
    for (int j = 2; j < g.nR - 2; ++j) {
        for (int i = 2; i < g.nL - 2; ++i) {
            const double drJl =
                (jl[g.index(i, j + 1)] - jl[g.index(i, j - 1)]) / (2.0 * g.hR);
            const double dlJr =
                (jr[g.index(i + 1, j)] - jr[g.index(i - 1, j)]) / (2.0 * g.hL);
            const double d = std::max(std::abs(drJl), std::abs(dlJr));
            stats.max = std::max(stats.max, d);
            sumsq += d * d;
            ++stats.nodes;
        }
    }
    stats.rms = stats.nodes ? std::sqrt(sumsq / stats.nodes) : 0.0;
    return stats;
}

double min_chart_singular_value(const GridField& field) {
    double min_sv = 1e300;
    for (const CMatrix& x : field.frames) {
        Eigen::JacobiSVD<CMatrix> svd(x.topRows(x.cols()));
        min_sv = std::min(min_sv, svd.singularValues().minCoeff());
    }
    return min_sv;
}

} // namespace grsurf
