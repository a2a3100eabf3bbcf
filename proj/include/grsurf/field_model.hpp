#pragma once

#include <optional>
#include <utility>

#include "grsurf/sun_algebra.hpp"
#include "grsurf/types.hpp"

namespace grsurf {

/// Admission tolerance for the Stiefel constraint X^dagger X = 1.
inline constexpr double kStiefelTol = 1e-8;

enum class LightconeDir { L, R };

/// Representative of a Grassmannian point: N x m complex matrix X with
/// X^dagger X = 1. Defined up to right multiplication by the gauge group.
class StiefelFrame {
public:
    StiefelFrame(CMatrix mat, double tol = kStiefelTol);

    int n() const { return static_cast<int>(mat_.rows()); }
    int m() const { return static_cast<int>(mat_.cols()); }
    const CMatrix& mat() const { return mat_; }

    /// || X^dagger X - 1 ||_F
    static double constraint_defect(const CMatrix& x);

private:
    CMatrix mat_;
};

/// X together with its light-cone derivatives at one point of the domain.
/// Second derivatives are optional; operations that need them say so.
struct FieldJet {
    StiefelFrame x;
    CMatrix dL, dR;
    std::optional<CMatrix> dLL, dLR, dRR;

    bool has_second() const { return dLL && dLR && dRR; }
    const CMatrix& d1(LightconeDir d) const { return d == LightconeDir::L ? dL : dR; }
};

/// Checks the differentiated constraint d_D(X^dagger X) = 0 for D = L, R and,
/// when second derivatives are present, its second differential. Throws on
/// violation beyond tol.
void validate_jet(const FieldJet& jet, double tol = kStiefelTol);

/// P = 1 - X X^dagger; orthogonal projector with P X = 0, tr P = N - m.
CMatrix projector(const StiefelFrame& x);

/// First derivative of the projector, d_D P = -(d_D X X^dagger + X d_D X^dagger).
CMatrix projector_derivative(const FieldJet& jet, LightconeDir d);

/// Mixed second derivative d_L d_R P (needs dLR).
CMatrix projector_derivative_LR(const FieldJet& jet);

/// Pure second derivatives d_L d_L P / d_R d_R P (need dLL / dRR).
CMatrix projector_derivative_LL(const FieldJet& jet);
CMatrix projector_derivative_RR(const FieldJet& jet);

/// D_mu X = d_mu X - X X^dagger d_mu X = P d_mu X.
CMatrix covariant_derivative(const FieldJet& jet, LightconeDir d);

/// Light-cone evaluation of tr{d^mu X (d_mu X)^dagger P} with metric
/// ds^2 = dxi_L dxi_R: equals 2 tr{(d_L X d_R X^dagger + d_R X d_L X^dagger) P}.
double lagrangian_density(const FieldJet& jet);

/// Frobenius norm of [d_L d_R P, P]; zero iff the field equation holds at the
/// point. Convention-free form, used everywhere as the authoritative residual.
double el_residual(const FieldJet& jet);

/// Frobenius norm of d_L M_R + d_R M_L with M_D = [d_D P, P], expanded term by
/// term. Algebraically equal to 2 [d_L d_R P, P]; kept as an independent route.
double el_residual_conservation_form(const FieldJet& jet);

struct Currents {
    double jL = 0.0;
    double jR = 0.0;
};

/// J_D = tr(d_D X d_D X^dagger P); real and >= 0 on valid jets, constant along
/// the opposite light-cone direction for solutions.
Currents currents(const FieldJet& jet);

/// Tangent vectors of the associated surface: Z_L = [d_L P, P], Z_R = -[d_R P, P].
std::pair<AlgebraElement, AlgebraElement> tangent_vectors(const FieldJet& jet);

/// Right action X -> X h of the gauge group; h in SU(m) within tol.
StiefelFrame gauge_transform(const StiefelFrame& x, const CMatrix& h, double tol = 1e-8);
FieldJet gauge_transform(const FieldJet& jet, const CMatrix& h, double tol = 1e-8);

/// Global symmetry X -> g X; g in SU(N) within tol.
StiefelFrame global_transform(const CMatrix& g, const StiefelFrame& x, double tol = 1e-8);
FieldJet global_transform(const CMatrix& g, const FieldJet& jet, double tol = 1e-8);

/// Closest-point projection onto the Stiefel manifold, X (X^dagger X)^{-1/2}.
/// min_sv, when given, receives the smallest singular value of the input.
CMatrix polar_retract(const CMatrix& x, double* min_sv = nullptr);

} // namespace grsurf
