#include "grsurf/frame.hpp"

#include <cmath>
#include <random>

namespace grsurf {

namespace {

/// Two-pass modified Gram-Schmidt step: orthogonalizes candidate against the
/// tangent pair and the collected normals, in place. Returns the residual norm.
double orthogonalize(CMatrix& v, const CMatrix& t1, const CMatrix& t2,
                     const std::vector<AlgebraElement>& normals) {
    auto inner = [](const CMatrix& a, const CMatrix& b) {
        return -0.5 * (a * b).trace().real();
    };
    for (int pass = 0; pass < 2; ++pass) {
        v -= inner(v, t1) * t1;
        v -= inner(v, t2) * t2;
        for (const AlgebraElement& n : normals) {
            v -= inner(v, n.mat()) * n.mat();
        }
    }
    return std::sqrt(std::max(0.0, inner(v, v)));
}

/// Orthonormalized tangent pair; throws when the metric is degenerate.
std::pair<CMatrix, CMatrix> tangent_span(const AlgebraElement& zL,
                                         const AlgebraElement& zR,
                                         const MetricData& metric) {
    if (!is_regular(metric)) {
        throw NumericalError("build_frame: degenerate metric (dependent tangents)");
    }
    CMatrix t1 = zL.mat() / std::sqrt(metric.jL);
    auto inner = [](const CMatrix& a, const CMatrix& b) {
        return -0.5 * (a * b).trace().real();
    };
    CMatrix t2 = zR.mat() - inner(zR.mat(), t1) * t1;
    t2 -= inner(t2, t1) * t1;
    const double nrm = std::sqrt(std::max(0.0, inner(t2, t2)));
    if (nrm < kGramSchmidtDiscard) {
        throw NumericalError("build_frame: tangent orthogonalization pivot failure");
    }
    t2 /= nrm;
    return {std::move(t1), std::move(t2)};
}

bool offdiagonal_pair(int j, int k, int m) { return j < m && k >= m; }

} // namespace

CMatrix complete_to_group(const StiefelFrame& x0, std::uint64_t seed,
                          std::vector<int>* pivots) {
    const int n = x0.n();
    const int m = x0.m();
    CMatrix phi(n, n);
    phi.leftCols(m) = x0.mat();

    CMatrix seeds;
    if (seed == 0) {
        seeds = CMatrix::Identity(n, n);
    } else {
        std::mt19937_64 rng(seed);
        seeds = random_special_unitary(n, rng);
    }

    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (int col = m; col < n; ++col) {
        int best = -1;
        double best_res = -1.0;
        CMatrix best_vec;
        for (int idx = 0; idx < n; ++idx) {
            if (used[static_cast<std::size_t>(idx)]) continue;
            CVector v = seeds.col(idx);
            for (int pass = 0; pass < 2; ++pass) {
                v -= phi.leftCols(col) * (phi.leftCols(col).adjoint() * v);
            }
            const double res = v.norm();
            if (res > best_res + 1e-14) { // strict improvement; ties keep lowest index
                best_res = res;
                best = idx;
                best_vec = v;
            }
        }
        if (best < 0 || best_res < kGramSchmidtDiscard) {
            throw NumericalError("complete_to_group: completion pivot failure");
        }
        phi.col(col) = best_vec / best_res;
        used[static_cast<std::size_t>(best)] = true;
        if (pivots) pivots->push_back(best);
    }

    const Complex det = phi.determinant();
    phi.col(n - 1) /= det;
    return phi;
}

std::pair<CMatrix, CMatrix> conjugated_tangents(const CMatrix& phi, int m,
                                                const AlgebraElement& zL,
                                                const AlgebraElement& zR, double tol) {
    const int n = static_cast<int>(phi.rows());
    if (m < 1 || m >= n) {
        throw std::invalid_argument("conjugated_tangents: invalid rank m");
    }
    auto conjugate_checked = [&](const AlgebraElement& z) {
        CMatrix w = phi.adjoint() * z.mat() * phi;
        const double scale = w.norm();
        const double block = std::hypot(w.topLeftCorner(m, m).norm(),
                                        w.bottomRightCorner(n - m, n - m).norm());
        if (scale > 1e-14 && block > tol * scale) {
            throw NumericalError(
                "conjugated_tangents: diagonal blocks nonzero (Phi/X mismatch, defect " +
                std::to_string(block / scale) + ")");
        }
        return w;
    };
    return {conjugate_checked(zL), conjugate_checked(zR)};
}

AlgebraElement projector_normal(const StiefelFrame& x) {
    const int n = x.n();
    const int m = x.m();
    const CMatrix p = projector(x);
    const Complex i(0.0, 1.0);
    CMatrix e = i * (static_cast<double>(n - m) * CMatrix::Identity(n, n) -
                     static_cast<double>(n) * p);
    AlgebraElement el(std::move(e));
    return (1.0 / algebra_norm(el)) * el;
}

FrameBundle build_frame(const FieldJet& jet, NormalPolicy policy, std::uint64_t seed) {
    const int n = jet.x.n();
    const int m = jet.x.m();
    auto [zL, zR] = tangent_vectors(jet);
    const MetricData metric = induced_metric(jet);
    auto [t1, t2] = tangent_span(zL, zR, metric);

    FrameBundle bundle{CMatrix(), std::move(zL), std::move(zR), metric, {}, {}, {}};
    std::vector<int> phi_pivots;
    bundle.phi = complete_to_group(jet.x, seed, &phi_pivots);

    const SuNBasis basis = standard_basis(n);
    const int want = n * n - 3;
    bundle.normals.reserve(static_cast<std::size_t>(want));

    // Rank-revealing sweep: always take the candidate with the largest
    // residual, so every accepted normal is normalized by an O(1) quantity and
    // the frame field stays smooth away from pivot swaps (which the signature
    // records). A fixed-order sweep leaves near-zero pivots whose directions
    // oscillate violently between neighbouring nodes.
    auto pivoted_collect = [&](std::vector<std::pair<int, CMatrix>> candidates,
                               NormalKind kind) {
        while (!candidates.empty()) {
            double best_res = -1.0;
            std::size_t best = 0;
            CMatrix best_vec;
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                CMatrix v = candidates[c].second;
                const double res = orthogonalize(v, t1, t2, bundle.normals);
                if (res > best_res + 1e-14) {
                    best_res = res;
                    best = c;
                    best_vec = std::move(v);
                }
            }
            if (best_res < kGramSchmidtDiscard) break; // span exhausted
            bundle.normals.emplace_back(CMatrix(best_vec / best_res));
            bundle.kinds.push_back(kind);
            bundle.signature.push_back(candidates[best].first);
            candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best));
        }
    };

    if (policy == NormalPolicy::TangentAnchored) {
        // Two Householder reflections in R^{N^2-1} take (e_1, e_2) to the unit
        // tangent pair; the images of e_3, ..., e_d are exactly orthonormal,
        // orthogonal to both tangents, and vary smoothly with the tangents
        // except where a reflector sign flips (recorded in the signature).
        const int d = basis.size();
        const RVector tau1 = to_coordinates(AlgebraElement(t1), basis);
        const RVector tau2 = to_coordinates(AlgebraElement(t2), basis);

        const double s1 = tau1(0) >= 0.0 ? -1.0 : 1.0;
        RVector u1 = tau1;
        u1(0) -= s1;
        const double u1n2 = u1.squaredNorm();
        auto reflect1 = [&](RVector v) {
            v -= (2.0 * u1.dot(v) / u1n2) * u1;
            return v;
        };

        const RVector w2 = reflect1(tau2);
        const double s2 = w2(1) >= 0.0 ? -1.0 : 1.0;
        RVector u2 = w2;
        u2(1) -= s2;
        const double u2n2 = u2.squaredNorm();
        auto reflect2 = [&](RVector v) {
            v -= (2.0 * u2.dot(v) / u2n2) * u2;
            return v;
        };

        for (int k = 2; k < d; ++k) {
            RVector ek = RVector::Zero(d);
            ek(k) = 1.0;
            bundle.normals.push_back(from_coordinates(reflect1(reflect2(ek)), basis));
            bundle.kinds.push_back(NormalKind::Anchored);
        }
        bundle.signature = {static_cast<int>(s1), static_cast<int>(s2)};
    } else {
        // classify the basis ordering: A pairs, then B pairs, then C_p
        const int pairs = n * (n - 1) / 2;
        std::vector<std::pair<int, int>> jk;
        jk.reserve(static_cast<std::size_t>(pairs));
        for (int j = 0; j < n; ++j) {
            for (int k = j + 1; k < n; ++k) jk.emplace_back(j, k);
        }
        auto is_offdiag = [&](int idx) {
            if (idx >= 2 * pairs) return false; // C_p: diagonal matrices
            const auto [j, k] = jk[static_cast<std::size_t>(idx % pairs)];
            return offdiagonal_pair(j, k, m);
        };
        // off-diagonal family first (Gram-Schmidt against the tangents) ...
        std::vector<std::pair<int, CMatrix>> candidates;
        for (int idx = 0; idx < basis.size(); ++idx) {
            if (!is_offdiag(idx)) continue;
            candidates.emplace_back(idx,
                                    bundle.phi * basis[idx].mat() * bundle.phi.adjoint());
        }
        pivoted_collect(std::move(candidates), NormalKind::OffDiagonal);
        if (static_cast<int>(bundle.normals.size()) != 2 * m * (n - m) - 2) {
            throw NumericalError("build_frame: off-diagonal normal count mismatch");
        }
        // ... then the diagonal-block family, orthonormal by construction
        for (int idx = 0; idx < basis.size(); ++idx) {
            if (is_offdiag(idx)) continue;
            bundle.normals.emplace_back(
                CMatrix(bundle.phi * basis[idx].mat() * bundle.phi.adjoint()));
            bundle.kinds.push_back(NormalKind::DiagonalBlock);
            bundle.signature.push_back(idx);
        }
        // the completion pivots are part of the smoothness signature
        bundle.signature.insert(bundle.signature.end(), phi_pivots.begin(),
                                phi_pivots.end());
    }

    if (static_cast<int>(bundle.normals.size()) != want) {
        throw NumericalError("build_frame: expected " + std::to_string(want) +
                             " normals, got " + std::to_string(bundle.normals.size()));
    }
    return bundle;
}

FrameField build_frame_field(const GridField& field, NormalPolicy policy,
                             std::uint64_t seed) {
    FrameField out;
    out.grid = field.grid;
    out.n = field.n;
    out.m = field.m;
    out.policy = policy;
    out.seed = seed;
    out.bundles.resize(field.grid.size());
    for (int j = 0; j < field.grid.nR; ++j) {
        for (int i = 0; i < field.grid.nL; ++i) {
            const FieldJet jet = node_jet(field, i, j);
            if (!is_regular(induced_metric(jet))) continue;
            out.bundles[field.grid.index(i, j)] = build_frame(jet, policy, seed);
        }
    }
    return out;
}

GaussWeingartenField gw_coefficients_field(const GridField& field,
                                           const FrameField& frames) {
    const LightConeGrid& g = field.grid;
    const int dim = field.n * field.n - 1;
    const int nn = dim - 2; // number of normals

    GaussWeingartenField out;
    out.grid = g;
    out.dim = dim;
    out.u.resize(g.size());
    out.v.resize(g.size());
    out.valid.assign(g.size(), 0);
    out.detG.assign(g.size(), 0.0);
    out.antisym_defect.assign(g.size(), 0.0);

    auto usable = [&](int i, int j) -> const FrameBundle* {
        if (i < 0 || i >= g.nL || j < 0 || j >= g.nR) return nullptr;
        const auto& b = frames.at(i, j);
        return b ? &*b : nullptr;
    };

    for (int j = 1; j < g.nR - 1; ++j) {
        for (int i = 1; i < g.nL - 1; ++i) {
            const FrameBundle* c = usable(i, j);
            const FrameBundle* xl = usable(i - 1, j);
            const FrameBundle* xr = usable(i + 1, j);
            const FrameBundle* yl = usable(i, j - 1);
            const FrameBundle* yr = usable(i, j + 1);
            if (!c || !xl || !xr || !yl || !yr) continue;
            if (xl->signature != c->signature || xr->signature != c->signature ||
                yl->signature != c->signature || yr->signature != c->signature) {
                continue; // pivot swap inside the stencil
            }

            const FieldJet jet = node_jet(field, i, j);
            if (!jet.has_second()) continue;
            const CurvatureData curv = fundamental_form_II_and_H(jet, c->metric);

            RMatrix u = RMatrix::Zero(dim, dim);
            RMatrix v = RMatrix::Zero(dim, dim);
            u(0, 0) = curv.aLL;
            u(0, 1) = curv.aLR;
            v(1, 0) = curv.aRL;
            v(1, 1) = curv.aRR;

            const MetricData& met = c->metric;
            for (int k = 0; k < nn; ++k) {
                const AlgebraElement& nk = c->normals[static_cast<std::size_t>(k)];
                const double ql = inner_product(curv.d2.dLL, nk);
                const double qr = inner_product(curv.d2.dRR, nk);
                const double hk = inner_product(curv.d2.dLR, nk);
                u(0, 2 + k) = ql;
                u(1, 2 + k) = hk;
                v(0, 2 + k) = hk;
                v(1, 2 + k) = qr;
                // alpha/beta from the Gram system G [alpha; beta] = -[(.,Z_L); (.,Z_R)]
                u(2 + k, 0) = (hk * met.gLR - ql * met.jR) / met.detG;
                u(2 + k, 1) = (ql * met.gLR - hk * met.jL) / met.detG;
                v(2 + k, 0) = (qr * met.gLR - hk * met.jR) / met.detG;
                v(2 + k, 1) = (hk * met.gLR - qr * met.jL) / met.detG;
            }

            for (int kj = 0; kj < nn; ++kj) {
                const CMatrix dLn = (xr->normals[static_cast<std::size_t>(kj)].mat() -
                                     xl->normals[static_cast<std::size_t>(kj)].mat()) /
                                    (2.0 * g.hL);
                const CMatrix dRn = (yr->normals[static_cast<std::size_t>(kj)].mat() -
                                     yl->normals[static_cast<std::size_t>(kj)].mat()) /
                                    (2.0 * g.hR);
                for (int kk = 0; kk < nn; ++kk) {
                    const CMatrix& nk = c->normals[static_cast<std::size_t>(kk)].mat();
                    u(2 + kj, 2 + kk) = -0.5 * (dLn * nk).trace().real();
                    v(2 + kj, 2 + kk) = -0.5 * (dRn * nk).trace().real();
                }
            }
            double defect = 0.0;
            for (int kj = 0; kj < nn; ++kj) {
                for (int kk = kj; kk < nn; ++kk) {
                    defect = std::max({defect,
                                       std::abs(u(2 + kj, 2 + kk) + u(2 + kk, 2 + kj)),
                                       std::abs(v(2 + kj, 2 + kk) + v(2 + kk, 2 + kj))});
                }
            }
            out.max_antisym_defect = std::max(out.max_antisym_defect, defect);

            out.u[g.index(i, j)] = std::move(u);
            out.v[g.index(i, j)] = std::move(v);
            out.valid[g.index(i, j)] = 1;
            out.detG[g.index(i, j)] = c->metric.detG;
            out.antisym_defect[g.index(i, j)] = defect;
        }
    }
    return out;
}

GcrField gauss_codazzi_residual_field(const GaussWeingartenField& gw) {
    const LightConeGrid& g = gw.grid;
    GcrField out;
    out.grid = g;
    out.residual.assign(g.size(), 0.0);
    out.valid.assign(g.size(), 0);
    auto ok = [&](int i, int j) {
        return i >= 0 && i < g.nL && j >= 0 && j < g.nR && gw.valid[g.index(i, j)];
    };
    for (int j = 0; j < g.nR; ++j) {
        for (int i = 0; i < g.nL; ++i) {
            if (!ok(i, j) || !ok(i - 1, j) || !ok(i + 1, j) || !ok(i, j - 1) ||
                !ok(i, j + 1)) {
                continue;
            }
            const RMatrix dru =
                (gw.u[g.index(i, j + 1)] - gw.u[g.index(i, j - 1)]) / (2.0 * g.hR);
            const RMatrix dlv =
                (gw.v[g.index(i + 1, j)] - gw.v[g.index(i - 1, j)]) / (2.0 * g.hL);
            const RMatrix& u = gw.u[g.index(i, j)];
            const RMatrix& v = gw.v[g.index(i, j)];
            out.residual[g.index(i, j)] = (dru - dlv + u * v - v * u).norm();
            out.valid[g.index(i, j)] = 1;
        }
    }
    return out;
}

GcrStats gcr_stats(const GcrField& field) {
    GcrStats stats;
    double sumsq = 0.0;
    for (std::size_t k = 0; k < field.residual.size(); ++k) {
        if (!field.valid[k]) continue;
        stats.max = std::max(stats.max, field.residual[k]);
        sumsq += field.residual[k] * field.residual[k];
        ++stats.nodes;
    }
    stats.rms = stats.nodes ? std::sqrt(sumsq / stats.nodes) : 0.0;
    return stats;
}

namespace {

double detg_floor_value(const GaussWeingartenField& gw, double rel_detg_floor) {
    double max_detg = 0.0;
    for (std::size_t k = 0; k < gw.valid.size(); ++k) {
        if (gw.valid[k]) max_detg = std::max(max_detg, gw.detG[k]);
    }
    return rel_detg_floor * max_detg;
}

} // namespace

GcrStats gcr_stats(const GcrField& field, const GaussWeingartenField& gw,
                   double rel_detg_floor) {
    const double floor = detg_floor_value(gw, rel_detg_floor);
    GcrStats stats;
    double sumsq = 0.0;
    for (std::size_t k = 0; k < field.residual.size(); ++k) {
        if (!field.valid[k] || gw.detG[k] < floor) continue;
        stats.max = std::max(stats.max, field.residual[k]);
        sumsq += field.residual[k] * field.residual[k];
        ++stats.nodes;
    }
    stats.rms = stats.nodes ? std::sqrt(sumsq / stats.nodes) : 0.0;
    return stats;
}

double max_antisym_defect(const GaussWeingartenField& gw, double rel_detg_floor) {
    const double floor = detg_floor_value(gw, rel_detg_floor);
    double worst = 0.0;
    for (std::size_t k = 0; k < gw.valid.size(); ++k) {
        if (gw.valid[k] && gw.detG[k] >= floor) {
            worst = std::max(worst, gw.antisym_defect[k]);
        }
    }
    return worst;
}

} // namespace grsurf
