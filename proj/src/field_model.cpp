#include "grsurf/field_model.hpp"

#include <cmath>
#include <string>

namespace grsurf {

namespace {

void require_special_unitary(const CMatrix& u, double tol, const char* what) {
    const double defect = unitarity_defect(u);
    if (defect > tol) {
        throw std::invalid_argument(std::string(what) + ": not unitary (defect " +
                                    std::to_string(defect) + ")");
    }
    const Complex det = u.determinant();
    if (std::abs(det - Complex(1.0, 0.0)) > tol * std::sqrt(static_cast<double>(u.rows()))) {
        throw std::invalid_argument(std::string(what) + ": determinant != 1");
    }
}

const CMatrix& require_second(const std::optional<CMatrix>& d, const char* name) {
    if (!d) {
        throw std::invalid_argument(std::string("missing second derivative ") + name);
    }
    return *d;
}

} // namespace

StiefelFrame::StiefelFrame(CMatrix mat, double tol) : mat_(std::move(mat)) {
    if (mat_.rows() < 2 || mat_.cols() < 1 || mat_.cols() >= mat_.rows()) {
        throw std::invalid_argument("StiefelFrame: need N > m >= 1");
    }
    if (!mat_.allFinite()) {
        throw std::invalid_argument("StiefelFrame: non-finite entries");
    }
    const double defect = constraint_defect(mat_);
    if (defect > tol) {
        throw std::invalid_argument("StiefelFrame: constraint violated (defect " +
                                    std::to_string(defect) + ")");
    }
}

double StiefelFrame::constraint_defect(const CMatrix& x) {
    return (x.adjoint() * x - CMatrix::Identity(x.cols(), x.cols())).norm();
}

void validate_jet(const FieldJet& jet, double tol) {
    const CMatrix& x = jet.x.mat();
    const double scaleL = std::max(1.0, jet.dL.norm());
    const double scaleR = std::max(1.0, jet.dR.norm());
    if ((jet.dL.adjoint() * x + x.adjoint() * jet.dL).norm() > tol * scaleL ||
        (jet.dR.adjoint() * x + x.adjoint() * jet.dR).norm() > tol * scaleR) {
        throw std::invalid_argument("FieldJet: first derivative violates constraint");
    }
    if (jet.has_second()) {
        // d_L d_R (X^dagger X) = 0
        const CMatrix mixed = jet.dLR->adjoint() * x + jet.dL.adjoint() * jet.dR +
                              jet.dR.adjoint() * jet.dL + x.adjoint() * (*jet.dLR);
        const double scale = std::max({1.0, jet.dLR->norm(), jet.dL.norm() * jet.dR.norm()});
        if (mixed.norm() > tol * scale) {
            throw std::invalid_argument("FieldJet: mixed second derivative violates constraint");
        }
        const CMatrix ll = jet.dLL->adjoint() * x + 2.0 * (jet.dL.adjoint() * jet.dL) +
                           x.adjoint() * (*jet.dLL);
        const CMatrix rr = jet.dRR->adjoint() * x + 2.0 * (jet.dR.adjoint() * jet.dR) +
                           x.adjoint() * (*jet.dRR);
        const double sL = std::max({1.0, jet.dLL->norm(), jet.dL.norm() * jet.dL.norm()});
        const double sR = std::max({1.0, jet.dRR->norm(), jet.dR.norm() * jet.dR.norm()});
        if (ll.norm() > tol * sL || rr.norm() > tol * sR) {
            throw std::invalid_argument("FieldJet: pure second derivative violates constraint");
        }
    }
}

CMatrix projector(const StiefelFrame& x) {
    const int n = x.n();
    return CMatrix::Identity(n, n) - x.mat() * x.mat().adjoint();
}

CMatrix projector_derivative(const FieldJet& jet, LightconeDir d) {
    const CMatrix& x = jet.x.mat();
    const CMatrix& dx = jet.d1(d);
    return -(dx * x.adjoint() + x * dx.adjoint());
}

CMatrix projector_derivative_LR(const FieldJet& jet) {
    const CMatrix& x = jet.x.mat();
    const CMatrix& dlr = require_second(jet.dLR, "dLR");
    return -(dlr * x.adjoint() + jet.dL * jet.dR.adjoint() +
             jet.dR * jet.dL.adjoint() + x * dlr.adjoint());
}

CMatrix projector_derivative_LL(const FieldJet& jet) {
    const CMatrix& x = jet.x.mat();
    const CMatrix& dll = require_second(jet.dLL, "dLL");
    return -(dll * x.adjoint() + 2.0 * (jet.dL * jet.dL.adjoint()) + x * dll.adjoint());
}

CMatrix projector_derivative_RR(const FieldJet& jet) {
    const CMatrix& x = jet.x.mat();
    const CMatrix& drr = require_second(jet.dRR, "dRR");
    return -(drr * x.adjoint() + 2.0 * (jet.dR * jet.dR.adjoint()) + x * drr.adjoint());
}

CMatrix covariant_derivative(const FieldJet& jet, LightconeDir d) {
    const CMatrix& x = jet.x.mat();
    const CMatrix& dx = jet.d1(d);
    return dx - x * (x.adjoint() * dx);
}

double lagrangian_density(const FieldJet& jet) {
    const CMatrix p = projector(jet.x);
    const Complex t = ((jet.dL * jet.dR.adjoint() + jet.dR * jet.dL.adjoint()) * p).trace();
    return 2.0 * t.real();
}

double el_residual(const FieldJet& jet) {
    const CMatrix p = projector(jet.x);
    const CMatrix dlr = projector_derivative_LR(jet);
    return (dlr * p - p * dlr).norm();
}

double el_residual_conservation_form(const FieldJet& jet) {
    const CMatrix p = projector(jet.x);
    const CMatrix pl = projector_derivative(jet, LightconeDir::L);
    const CMatrix pr = projector_derivative(jet, LightconeDir::R);
    const CMatrix plr = projector_derivative_LR(jet);
    // d_L M_R = [d_L d_R P, P] + [d_R P, d_L P], d_R M_L analogously.
    const CMatrix dlMr = (plr * p - p * plr) + (pr * pl - pl * pr);
    const CMatrix drMl = (plr * p - p * plr) + (pl * pr - pr * pl);
    return (dlMr + drMl).norm();
}

Currents currents(const FieldJet& jet) {
    const CMatrix p = projector(jet.x);
    Currents c;
    c.jL = ((jet.dL * jet.dL.adjoint()) * p).trace().real();
    c.jR = ((jet.dR * jet.dR.adjoint()) * p).trace().real();
    return c;
}

std::pair<AlgebraElement, AlgebraElement> tangent_vectors(const FieldJet& jet) {
    const CMatrix p = projector(jet.x);
    const CMatrix pl = projector_derivative(jet, LightconeDir::L);
    const CMatrix pr = projector_derivative(jet, LightconeDir::R);
    AlgebraElement zL(pl * p - p * pl);
    AlgebraElement zR(-(pr * p - p * pr));
    return {std::move(zL), std::move(zR)};
}

StiefelFrame gauge_transform(const StiefelFrame& x, const CMatrix& h, double tol) {
    if (h.rows() != x.m() || h.cols() != x.m()) {
        throw std::invalid_argument("gauge_transform: h must be m x m");
    }
    require_special_unitary(h, tol, "gauge_transform");
    return StiefelFrame(x.mat() * h);
}

FieldJet gauge_transform(const FieldJet& jet, const CMatrix& h, double tol) {
    StiefelFrame xh = gauge_transform(jet.x, h, tol);
    FieldJet out{std::move(xh), jet.dL * h, jet.dR * h, {}, {}, {}};
    if (jet.dLL) out.dLL = *jet.dLL * h;
    if (jet.dLR) out.dLR = *jet.dLR * h;
    if (jet.dRR) out.dRR = *jet.dRR * h;
    return out;
}

StiefelFrame global_transform(const CMatrix& g, const StiefelFrame& x, double tol) {
    if (g.rows() != x.n() || g.cols() != x.n()) {
        throw std::invalid_argument("global_transform: g must be N x N");
    }
    require_special_unitary(g, tol, "global_transform");
    return StiefelFrame(g * x.mat());
}

FieldJet global_transform(const CMatrix& g, const FieldJet& jet, double tol) {
    StiefelFrame gx = global_transform(g, jet.x, tol);
    FieldJet out{std::move(gx), g * jet.dL, g * jet.dR, {}, {}, {}};
    if (jet.dLL) out.dLL = g * (*jet.dLL);
    if (jet.dLR) out.dLR = g * (*jet.dLR);
    if (jet.dRR) out.dRR = g * (*jet.dRR);
    return out;
}

CMatrix polar_retract(const CMatrix& x, double* min_sv) {
    Eigen::JacobiSVD<CMatrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (min_sv) {
        *min_sv = svd.singularValues().minCoeff();
    }
    return svd.matrixU() * svd.matrixV().adjoint();
}

} // namespace grsurf
