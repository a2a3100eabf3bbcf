#pragma once

#include <vector>

#include "grsurf/types.hpp"

namespace grsurf {

/// Admission tolerance for anti-hermiticity / tracelessness, relative to the
/// matrix norm. Inputs that fail are rejected, never silently repaired.
inline constexpr double kAlgebraTol = 1e-10;

/// Element of su(N): an anti-hermitian traceless N x N complex matrix.
/// Identified with a point/vector of R^{N^2-1} through an orthonormal basis.
class AlgebraElement {
public:
    explicit AlgebraElement(CMatrix mat, double tol = kAlgebraTol);

    static AlgebraElement Zero(int n);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const CMatrix& mat() const { return mat_; }

    AlgebraElement operator+(const AlgebraElement& o) const;
    AlgebraElement operator-(const AlgebraElement& o) const;
    AlgebraElement operator-() const;
    friend AlgebraElement operator*(double s, const AlgebraElement& a);

private:
    CMatrix mat_;
};

/// Scalar product (A,B) = -1/2 tr(AB); positive definite on su(N).
double inner_product(const AlgebraElement& a, const AlgebraElement& b);

/// sqrt((a,a)).
double algebra_norm(const AlgebraElement& a);

/// Orthonormal basis of su(N) in the fixed order
///   A_{jk} = i(E_jk + E_kj),        1 <= j < k <= N  (lexicographic),
///   B_{jk} = E_jk - E_kj,           1 <= j < k <= N  (lexicographic),
///   C_p    = i sqrt(2/(p(p+1))) (sum_{d<=p} E_dd - p E_{p+1,p+1}), 1 <= p <= N-1.
/// All coordinate exports depend on this ordering; do not permute.
class SuNBasis {
public:
    explicit SuNBasis(int n);

    int dim() const { return n_; }
    int size() const { return static_cast<int>(elements_.size()); }
    const AlgebraElement& operator[](int k) const { return elements_[static_cast<size_t>(k)]; }
    const std::vector<AlgebraElement>& elements() const { return elements_; }

private:
    int n_;
    std::vector<AlgebraElement> elements_;
};

/// Orthonormal basis of su(n); n >= 2 required.
SuNBasis standard_basis(int n);

/// Coordinates of a in R^{n^2-1} with respect to the given basis.
RVector to_coordinates(const AlgebraElement& a, const SuNBasis& basis);

/// Inverse of to_coordinates.
AlgebraElement from_coordinates(const RVector& v, const SuNBasis& basis);

/// Adjoint action phi a phi^dagger; phi must be unitary within tol.
AlgebraElement conjugate_by(const CMatrix& phi, const AlgebraElement& a,
                            double tol = 1e-8);

/// || phi^dagger phi - 1 ||_F, the unitarity defect.
double unitarity_defect(const CMatrix& phi);

} // namespace grsurf
