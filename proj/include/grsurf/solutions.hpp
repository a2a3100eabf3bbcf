#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "grsurf/field_model.hpp"
#include "grsurf/types.hpp"

namespace grsurf {

/// Rectangular lattice in light-cone coordinates (xi_L, xi_R).
struct LightConeGrid {
    double xiL0 = 0.0;
    double xiR0 = 0.0;
    double hL = 0.0;
    double hR = 0.0;
    int nL = 0;
    int nR = 0;

    void validate() const;
    double xiL(int i) const { return xiL0 + hL * i; }
    double xiR(int j) const { return xiR0 + hR * j; }
    std::size_t size() const { return static_cast<std::size_t>(nL) * nR; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(nL) * j; }
    bool interior(int i, int j, int margin = 1) const {
        return i >= margin && i < nL - margin && j >= margin && j < nR - margin;
    }
};

/// Matrix-valued curve of one real parameter with optional derivatives.
struct Curve {
    std::function<CMatrix(double)> value;
    std::function<CMatrix(double)> d1; // may be empty when only values are used
    std::function<CMatrix(double)> d2; // may be empty
};

/// Real reparametrization map with its derivatives.
struct RealMap {
    std::function<double(double)> f, d1, d2;
};

/// Exact solution of the field equations with closed-form jets. Catalog
/// factory functions certify every entry against the residual before handing
/// it out; nothing is trusted by construction.
class AnalyticSolution {
public:
    AnalyticSolution(int n, int m, std::string name,
                     std::function<FieldJet(double, double)> eval)
        : n_(n), m_(m), name_(std::move(name)), eval_(std::move(eval)) {}

    int n() const { return n_; }
    int m() const { return m_; }
    const std::string& name() const { return name_; }
    FieldJet jet(double xiL, double xiR) const { return eval_(xiL, xiR); }

private:
    int n_, m_;
    std::string name_;
    std::function<FieldJet(double, double)> eval_;
};

/// 17 x 17 sample grid on [0,1]^2 used for catalog self-certification.
LightConeGrid certification_grid();

/// Max pointwise residual of the field equation over the grid nodes.
double certify(const AnalyticSolution& sol, const LightConeGrid& grid, bool validate_jets = true);

/// Throws NumericalError unless certify(...) <= tol on the certification grid.
AnalyticSolution certified(AnalyticSolution sol, double tol = 1e-10);

// ---- catalog ----

AnalyticSolution constant_solution(const StiefelFrame& x0);

/// Left-moving field X(xi_L); f must provide d1 (d2 optional, needed only for
/// analyses involving pure second derivatives).
AnalyticSolution chiral_wave(int n, int m, Curve f);

/// X = (c1 e^{i(a1 xiL + b1 xiR)}, c2 e^{i(a2 xiL + b2 xiR)})^T in G(1,1).
/// General weights; solves the field equations only when |c1| = |c2|.
/// Not certified -- used as a negative control when unbalanced.
AnalyticSolution torus(double a1, double a2, double b1, double b2,
                       double c1, double c2);

/// Certified torus with c1 = c2 = 1/sqrt(2).
AnalyticSolution balanced_torus(double a1, double a2, double b1, double b2);

/// Block-diagonal sum: pairs of solutions give solutions, currents add.
AnalyticSolution direct_sum(const AnalyticSolution& s1, const AnalyticSolution& s2);

/// xi_L -> alpha(xi_L), xi_R -> beta(xi_R) with chain-rule jets.
AnalyticSolution conformal_reparametrized(const AnalyticSolution& s,
                                          RealMap alpha, RealMap beta);

/// xi_L <-> xi_R.
AnalyticSolution parity_swapped(const AnalyticSolution& s);

/// Helper for chiral waves: great-circle curve cos(w t) v1 + sin(w t) v2 for
/// orthonormal v1, v2 in C^N (m = 1), with exact derivatives.
Curve circle_curve(const CVector& v1, const CVector& v2, double omega);

// ---- grid fields ----

enum class Provenance { Analytic, Solved };

/// Field samples on a light-cone lattice. Analytic fields carry exact jets;
/// solved fields carry frames only and are differentiated by finite
/// differences.
struct GridField {
    LightConeGrid grid;
    int n = 0;
    int m = 0;
    Provenance provenance = Provenance::Analytic;
    std::vector<CMatrix> frames;  // grid.size() entries, index = grid.index(i,j)
    std::vector<FieldJet> jets;   // empty for solved fields

    bool has_exact_jets() const { return !jets.empty(); }
    const CMatrix& frame(int i, int j) const { return frames[grid.index(i, j)]; }
    const FieldJet& exact_jet(int i, int j) const { return jets[grid.index(i, j)]; }
};

GridField sample_solution(const AnalyticSolution& sol, const LightConeGrid& grid);

/// Second-order finite-difference jet at a node (centered in the interior,
/// one-sided at the boundary; the mixed derivative composes the two stencils).
/// Requires nL, nR >= 4.
FieldJet fd_jet(const GridField& field, int i, int j);

/// Jet at a node: exact when available, finite-difference otherwise.
FieldJet node_jet(const GridField& field, int i, int j);

struct GoursatResult {
    GridField field;
    double min_retraction_sv = 0.0; // smallest singular value seen before retraction
    double min_chart_sv = 0.0;      // smallest singular value of the top m x m block
};

/// Characteristic initial value problem: leftData gives X on the line
/// xi_R = xi_R0 (parametrized by xi_L), rightData on xi_L = xi_L0. Both must
/// be Stiefel-valued and agree at the corner. Second-order rectangle rule with
/// midpoint right-hand side and polar retraction at every node.
GoursatResult goursat_solve(const Curve& leftData, const Curve& rightData,
                            const LightConeGrid& grid);

/// Random Stiefel-valued curve: low-order trigonometric polynomial with
/// bounded derivatives, retracted pointwise. Deterministic in the seed.
Curve random_trig_stiefel_curve(int n, int m, std::uint64_t seed,
                                double amplitude = 0.4, int harmonics = 2,
                                double period = 4.0);

/// Corner-compatible pair of random curves for goursat_solve.
std::pair<Curve, Curve> random_goursat_data(int n, int m, std::uint64_t seed,
                                            double xiL0, double xiR0,
                                            double amplitude = 0.4,
                                            int harmonics = 2);

/// Haar-ish random special unitary / Stiefel samples (deterministic in rng).
CMatrix random_special_unitary(int n, std::mt19937_64& rng);
StiefelFrame random_stiefel(int n, int m, std::mt19937_64& rng);

// ---- grid diagnostics ----

struct ResidualStats {
    double max = 0.0;
    double rms = 0.0;
    int nodes = 0;
};

/// Pointwise field-equation residual over interior nodes (margin 1).
ResidualStats el_residual_stats(const GridField& field);

/// Max over interior nodes (margin 2) of finite-difference d_R J_L and
/// d_L J_R; both vanish for solutions as the grid is refined.
ResidualStats conservation_defect_stats(const GridField& field);

/// Smallest singular value of the top m x m block over all nodes (chart
/// health diagnostic).
double min_chart_singular_value(const GridField& field);

} // namespace grsurf
