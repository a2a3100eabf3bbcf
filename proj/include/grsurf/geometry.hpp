#pragma once

#include <string>
#include <vector>

#include "grsurf/solutions.hpp"
#include "grsurf/sun_algebra.hpp"

namespace grsurf {

/// Induced metric in light-cone coordinates: G = [[J_L, G_LR], [G_LR, J_R]].
struct MetricData {
    double jL = 0.0;
    double jR = 0.0;
    double gLR = 0.0;
    double detG = 0.0;
};

MetricData induced_metric(const FieldJet& jet);

/// Scale-aware regularity threshold: det G must exceed this for the tangents
/// to count as independent.
inline double regularity_threshold(const MetricData& g) {
    return 1e-10 * std::max(g.jL * g.jR, 1.0);
}

inline bool is_regular(const MetricData& g) { return g.detG > regularity_threshold(g); }

/// Value of the first fundamental form on the direction (v1, v2); equals
/// ||v1 Z_L + v2 Z_R||^2, nonnegative on valid jets.
inline double first_fundamental_form(const MetricData& g, double v1, double v2) {
    return g.jL * v1 * v1 + 2.0 * g.gLR * v1 * v2 + g.jR * v2 * v2;
}

struct RegularityReport {
    MetricData metric;
    bool regular = false;               // det G above threshold
    bool im_condition = false;          // Im tr(d_L X d_R X^dagger P) != 0
    bool independent_condition = false; // {d_L X, d_R X, X} linearly independent
    double im_cross = 0.0;
    double min_stacked_sv = 0.0; // smallest singular value of [d_L X, d_R X, X]
    std::string reason;
};

RegularityReport regularity_test(const FieldJet& jet);

/// Second derivatives of the immersion in terms of the projector:
/// d_L d_L Z = [d_LL P, P], d_L d_R Z = [d_L P, d_R P], d_R d_R Z = -[d_RR P, P].
struct SecondDerivativesZ {
    AlgebraElement dLL, dLR, dRR;
};

SecondDerivativesZ second_derivatives_Z(const FieldJet& jet);

/// Second fundamental form coefficients, tangential coefficients and the mean
/// curvature vector at a regular point.
struct CurvatureData {
    SecondDerivativesZ d2;
    double aLL = 0.0, aLR = 0.0; // d_LL Z = aLL Z_L + aLR Z_R + normal part
    double aRL = 0.0, aRR = 0.0; // d_RR Z = aRL Z_L + aRR Z_R + normal part
    AlgebraElement iiLL, iiLR, iiRR;
    AlgebraElement h;
};

CurvatureData fundamental_form_II_and_H(const FieldJet& jet, const MetricData& metric);

/// Gauss-equation route to the curvature: ((II_LL, II_RR) - (II_LR, II_LR)) / det G.
double gauss_equation_K(const CurvatureData& c, const MetricData& metric);

/// Per-node geometry of a grid field. K uses second-order finite differences
/// of the metric field and is omitted (hasK = false) where the stencil leaves
/// the grid or touches nodes failing the regularity/positivity gates.
struct GeometryField {
    LightConeGrid grid;
    int n = 0, m = 0;
    std::vector<MetricData> metric;
    std::vector<char> regular;
    std::vector<double> K;
    std::vector<char> hasK;
    std::vector<double> absH;
    std::vector<char> hasH;
};

GeometryField compute_geometry(const GridField& field);

} // namespace grsurf
