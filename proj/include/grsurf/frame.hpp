#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "grsurf/geometry.hpp"
#include "grsurf/solutions.hpp"

namespace grsurf {

/// Residual threshold below which a Gram-Schmidt candidate is discarded as
/// dependent on the vectors already collected.
inline constexpr double kGramSchmidtDiscard = 1e-8;

/// Deterministic completion of X^0 to a special unitary matrix whose first m
/// columns equal X^0. Remaining columns come from Gram-Schmidt over canonical
/// seed columns chosen by largest residual (ties broken by index); a nonzero
/// seed replaces the canonical seeds by a seeded random unitary. The last
/// column is rescaled to fix det = 1. pivots, when given, receives the chosen
/// seed-column indices.
CMatrix complete_to_group(const StiefelFrame& x0, std::uint64_t seed = 0,
                          std::vector<int>* pivots = nullptr);

/// Phi^dagger Z_D Phi; throws if the m x m / n x n diagonal blocks exceed tol
/// relative to the matrix norm (signals a Phi/X mismatch).
std::pair<CMatrix, CMatrix> conjugated_tangents(const CMatrix& phi, int m,
                                                const AlgebraElement& zL,
                                                const AlgebraElement& zR,
                                                double tol = 1e-9);

/// Unit normal built from the projector alone: proportional to
/// i ((N - m) 1 - N P); traceless and orthogonal to both tangents.
AlgebraElement projector_normal(const StiefelFrame& x);

enum class NormalPolicy {
    /// Block-split construction: Gram-Schmidt inside the Phi-conjugated
    /// off-diagonal subspace plus the conjugated diagonal-block basis.
    /// Follows the surface's algebraic block structure but rotates with X.
    BlockSplit,
    /// Gram-Schmidt of the fixed su(N) basis against the tangents only.
    /// Depends on nothing but span(Z_L, Z_R); constant tangents give a
    /// constant frame, which keeps the connection coefficients clean.
    TangentAnchored,
};

enum class NormalKind { OffDiagonal, DiagonalBlock, Anchored };

/// Moving frame at one regular node: tangents plus N^2-3 orthonormal normals.
struct FrameBundle {
    CMatrix phi;
    AlgebraElement zL, zR;
    MetricData metric;
    std::vector<AlgebraElement> normals;
    std::vector<NormalKind> kinds;
    std::vector<int> signature; // pivot pattern; frame fields are smooth only
                                // across nodes with equal signatures
};

/// Builds the frame at a regular point; throws NumericalError when the metric
/// is degenerate (parallel tangents leave the normal space ill-defined).
FrameBundle build_frame(const FieldJet& jet, NormalPolicy policy,
                        std::uint64_t seed = 0);

/// Frame at every regular node of a grid field; degenerate nodes are empty.
struct FrameField {
    LightConeGrid grid;
    int n = 0, m = 0;
    NormalPolicy policy = NormalPolicy::TangentAnchored;
    std::uint64_t seed = 0;
    std::vector<std::optional<FrameBundle>> bundles;

    const std::optional<FrameBundle>& at(int i, int j) const {
        return bundles[grid.index(i, j)];
    }
};

FrameField build_frame_field(const GridField& field, NormalPolicy policy,
                             std::uint64_t seed = 0);

/// Connection matrices U, V of the frame system d_L tau = U tau,
/// d_R tau = V tau in the ordering (Z_L, Z_R, n_3, ..., n_{N^2-1}).
/// Normal derivatives use centered finite differences of the normal field;
/// nodes whose stencil hits a degenerate node or a pivot swap are invalid.
struct GaussWeingartenField {
    LightConeGrid grid;
    int dim = 0; // N^2 - 1
    std::vector<RMatrix> u, v;
    std::vector<char> valid;
    std::vector<double> detG;           // metric determinant per computed node
    std::vector<double> antisym_defect; // max |s^D_{jk} + s^D_{kj}| per node
    double max_antisym_defect = 0.0;    // over all computed nodes
};

GaussWeingartenField gw_coefficients_field(const GridField& field,
                                           const FrameField& frames);

/// Max antisymmetry defect over nodes whose det G is at least rel_detg_floor
/// times the field's largest det G. The connection coefficients carry 1/det G
/// factors, so statistics are only meaningful on a fixed regular region.
double max_antisym_defect(const GaussWeingartenField& gw, double rel_detg_floor);

/// Frobenius norm of d_R U - d_L V + [U, V] per node (centered differences);
/// empty optional where the stencil is incomplete.
struct GcrField {
    LightConeGrid grid;
    std::vector<double> residual;
    std::vector<char> valid;
};

GcrField gauss_codazzi_residual_field(const GaussWeingartenField& gw);

struct GcrStats {
    double max = 0.0;
    double rms = 0.0;
    int nodes = 0;
};

GcrStats gcr_stats(const GcrField& field);

/// Statistics restricted to the regular region det G >= rel_detg_floor times
/// the field's largest det G (fixed as the grid refines).
GcrStats gcr_stats(const GcrField& field, const GaussWeingartenField& gw,
                   double rel_detg_floor);

} // namespace grsurf
