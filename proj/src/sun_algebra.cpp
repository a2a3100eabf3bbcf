#include "grsurf/sun_algebra.hpp"

#include <cmath>

namespace grsurf {

AlgebraElement::AlgebraElement(CMatrix mat, double tol) : mat_(std::move(mat)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() < 1) {
        throw std::invalid_argument("AlgebraElement: matrix must be square");
    }
    if (!mat_.allFinite()) {
        throw std::invalid_argument("AlgebraElement: non-finite entries");
    }
    const double scale = std::max(mat_.norm(), 1.0);
    const double ah = (mat_ + mat_.adjoint()).norm();
    if (ah > tol * scale) {
        throw std::invalid_argument("AlgebraElement: not anti-hermitian (defect " +
                                    std::to_string(ah) + ")");
    }
    const double tr = std::abs(mat_.trace());
    if (tr > tol * scale) {
        throw std::invalid_argument("AlgebraElement: nonzero trace (defect " +
                                    std::to_string(tr) + ")");
    }
}

AlgebraElement AlgebraElement::Zero(int n) {
    return AlgebraElement(CMatrix::Zero(n, n));
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
    return AlgebraElement(mat_ + o.mat_);
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
    return AlgebraElement(mat_ - o.mat_);
}

AlgebraElement AlgebraElement::operator-() const {
    return AlgebraElement(-mat_);
}

AlgebraElement operator*(double s, const AlgebraElement& a) {
    return AlgebraElement(s * a.mat_);
}

double inner_product(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("inner_product: dimension mismatch");
    }
    // tr(AB) is real for anti-hermitian A, B.
    return -0.5 * (a.mat() * b.mat()).trace().real();
}

double algebra_norm(const AlgebraElement& a) {
    return std::sqrt(std::max(0.0, inner_product(a, a)));
}

SuNBasis::SuNBasis(int n) : n_(n) {
    if (n < 2) {
        throw std::invalid_argument("SuNBasis: n must be >= 2");
    }
    const Complex I(0.0, 1.0);
    elements_.reserve(static_cast<size_t>(n) * n - 1);
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            CMatrix a = CMatrix::Zero(n, n);
            a(j, k) = I;
            a(k, j) = I;
            elements_.emplace_back(std::move(a));
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            CMatrix b = CMatrix::Zero(n, n);
            b(j, k) = Complex(1.0, 0.0);
            b(k, j) = Complex(-1.0, 0.0);
            elements_.emplace_back(std::move(b));
        }
    }
    for (int p = 1; p < n; ++p) {
        CMatrix c = CMatrix::Zero(n, n);
        const double w = std::sqrt(2.0 / (static_cast<double>(p) * (p + 1)));
        for (int d = 0; d < p; ++d) {
            c(d, d) = I * w;
        }
        c(p, p) = -I * (static_cast<double>(p) * w);
        elements_.emplace_back(std::move(c));
    }
}

SuNBasis standard_basis(int n) { return SuNBasis(n); }

RVector to_coordinates(const AlgebraElement& a, const SuNBasis& basis) {
    if (a.dim() != basis.dim()) {
        throw std::invalid_argument("to_coordinates: dimension mismatch");
    }
    RVector v(basis.size());
    for (int k = 0; k < basis.size(); ++k) {
        v(k) = inner_product(a, basis[k]);
    }
    return v;
}

AlgebraElement from_coordinates(const RVector& v, const SuNBasis& basis) {
    if (v.size() != basis.size()) {
        throw std::invalid_argument("from_coordinates: dimension mismatch");
    }
    CMatrix m = CMatrix::Zero(basis.dim(), basis.dim());
    for (int k = 0; k < basis.size(); ++k) {
        m += v(k) * basis[k].mat();
    }
    return AlgebraElement(std::move(m));
}

double unitarity_defect(const CMatrix& phi) {
    return (phi.adjoint() * phi - CMatrix::Identity(phi.cols(), phi.cols())).norm();
}

AlgebraElement conjugate_by(const CMatrix& phi, const AlgebraElement& a, double tol) {
    if (phi.rows() != a.dim() || phi.cols() != a.dim()) {
        throw std::invalid_argument("conjugate_by: dimension mismatch");
    }
    const double defect = unitarity_defect(phi);
    if (defect > tol) {
        throw std::invalid_argument("conjugate_by: phi not unitary (defect " +
                                    std::to_string(defect) + ")");
    }
    return AlgebraElement(phi * a.mat() * phi.adjoint());
}

} // namespace grsurf
