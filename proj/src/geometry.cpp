#include "grsurf/geometry.hpp"

#include <cmath>

namespace grsurf {

MetricData induced_metric(const FieldJet& jet) {
    const CMatrix p = projector(jet.x);
    MetricData g;
    g.jL = ((jet.dL * jet.dL.adjoint()) * p).trace().real();
    g.jR = ((jet.dR * jet.dR.adjoint()) * p).trace().real();
    g.gLR = -0.5 * ((jet.dL * jet.dR.adjoint() + jet.dR * jet.dL.adjoint()) * p)
                       .trace()
                       .real();
    g.detG = g.jL * g.jR - g.gLR * g.gLR;
    return g;
}

RegularityReport regularity_test(const FieldJet& jet) {
    RegularityReport rep;
    rep.metric = induced_metric(jet);

    const CMatrix p = projector(jet.x);
    rep.im_cross = ((jet.dL * jet.dR.adjoint()) * p).trace().imag();
    rep.im_condition = std::abs(rep.im_cross) > 1e-10;

    CMatrix stacked(jet.x.n(), 3 * jet.x.m());
    stacked << jet.dL, jet.dR, jet.x.mat();
    Eigen::JacobiSVD<CMatrix> svd(stacked);
    rep.min_stacked_sv = svd.singularValues().minCoeff();
    rep.independent_condition =
        rep.min_stacked_sv > 1e-8 * std::max(1.0, svd.singularValues().maxCoeff());

    rep.regular = is_regular(rep.metric);
    rep.reason = rep.regular
                     ? "det G above threshold"
                     : "det G = " + std::to_string(rep.metric.detG) + " below threshold";
    return rep;
}

SecondDerivativesZ second_derivatives_Z(const FieldJet& jet) {
    const CMatrix p = projector(jet.x);
    const CMatrix pl = projector_derivative(jet, LightconeDir::L);
    const CMatrix pr = projector_derivative(jet, LightconeDir::R);
    const CMatrix pll = projector_derivative_LL(jet);
    const CMatrix prr = projector_derivative_RR(jet);
    return SecondDerivativesZ{AlgebraElement(pll * p - p * pll),
                              AlgebraElement(pl * pr - pr * pl),
                              AlgebraElement(-(prr * p - p * prr))};
}

CurvatureData fundamental_form_II_and_H(const FieldJet& jet, const MetricData& g) {
    if (!is_regular(g)) {
        throw NumericalError("fundamental_form_II_and_H: degenerate metric");
    }
    auto [zL, zR] = tangent_vectors(jet);
    SecondDerivativesZ d2 = second_derivatives_Z(jet);

    // tangential coefficients from the 2x2 Gram system
    auto solve2 = [&](const AlgebraElement& rhs, double& c1, double& c2) {
        const double p1 = inner_product(rhs, zL);
        const double p2 = inner_product(rhs, zR);
        c1 = (g.jR * p1 - g.gLR * p2) / g.detG;
        c2 = (g.jL * p2 - g.gLR * p1) / g.detG;
    };

    CurvatureData out{std::move(d2), 0, 0, 0, 0,
                      AlgebraElement::Zero(jet.x.n()), AlgebraElement::Zero(jet.x.n()),
                      AlgebraElement::Zero(jet.x.n()), AlgebraElement::Zero(jet.x.n())};
    solve2(out.d2.dLL, out.aLL, out.aLR);
    solve2(out.d2.dRR, out.aRL, out.aRR);

    out.iiLL = out.d2.dLL - out.aLL * zL - out.aLR * zR;
    out.iiRR = out.d2.dRR - out.aRL * zL - out.aRR * zR;
    out.iiLR = out.d2.dLR; // already normal for solutions
    out.h = (1.0 / g.detG) *
            (g.jR * out.iiLL - 2.0 * g.gLR * out.iiLR + g.jL * out.iiRR);
    return out;
}

double gauss_equation_K(const CurvatureData& c, const MetricData& g) {
    return (inner_product(c.iiLL, c.iiRR) - inner_product(c.iiLR, c.iiLR)) / g.detG;
}

GeometryField compute_geometry(const GridField& field) {
    const LightConeGrid& g = field.grid;
    GeometryField out;
    out.grid = g;
    out.n = field.n;
    out.m = field.m;
    out.metric.resize(g.size());
    out.regular.assign(g.size(), 0);
    out.K.assign(g.size(), 0.0);
    out.hasK.assign(g.size(), 0);
    out.absH.assign(g.size(), 0.0);
    out.hasH.assign(g.size(), 0);

    for (int j = 0; j < g.nR; ++j) {
        for (int i = 0; i < g.nL; ++i) {
            const FieldJet jet = node_jet(field, i, j);
            const std::size_t k = g.index(i, j);
            out.metric[k] = induced_metric(jet);
            out.regular[k] = is_regular(out.metric[k]) ? 1 : 0;
            if (out.regular[k] && jet.has_second()) {
                const CurvatureData c = fundamental_form_II_and_H(jet, out.metric[k]);
                out.absH[k] = algebra_norm(c.h);
                out.hasH[k] = 1;
            }
        }
    }

    // Gaussian curvature by finite differences of the metric field:
    //   K = (1/s) d_R [ (d_L G_LR - (1/2) G_LR d_L ln J_L) / s ],  s = sqrt(det G)
    auto gate = [&](int i, int j) {
        const MetricData& m = out.metric[g.index(i, j)];
        const double thr = regularity_threshold(m);
        return m.detG > thr && m.jL > thr;
    };
    auto w_at = [&](int i, int j, bool& ok) -> double {
        if (i < 1 || i > g.nL - 2 || !gate(i - 1, j) || !gate(i, j) || !gate(i + 1, j)) {
            ok = false;
            return 0.0;
        }
        const MetricData& c = out.metric[g.index(i, j)];
        const MetricData& lo = out.metric[g.index(i - 1, j)];
        const MetricData& hi = out.metric[g.index(i + 1, j)];
        const double dGlr = (hi.gLR - lo.gLR) / (2.0 * g.hL);
        const double dJl = (hi.jL - lo.jL) / (2.0 * g.hL);
        ok = true;
        return (dGlr - 0.5 * c.gLR * dJl / c.jL) / std::sqrt(c.detG);
    };

    for (int j = 1; j < g.nR - 1; ++j) {
        for (int i = 1; i < g.nL - 1; ++i) {
            const std::size_t k = g.index(i, j);
            if (!gate(i, j)) continue;
            bool ok_lo = false, ok_hi = false;
            const double w_lo = w_at(i, j - 1, ok_lo);
            const double w_hi = w_at(i, j + 1, ok_hi);
            if (!ok_lo || !ok_hi) continue;
            out.K[k] = (w_hi - w_lo) / (2.0 * g.hR * std::sqrt(out.metric[k].detG));
            out.hasK[k] = 1;
        }
    }
    return out;
}

} // namespace grsurf
