// SPDX-License-Identifier: Apache-2.0
//
// ma-isac: movable-antenna ISAC beampattern optimization
#include "ma_isac/conic.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace ma_isac {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

int cone_block_len(const ConeBlock& blk) {
    switch (blk.kind) {
    case ConeKind::NonNeg:
    case ConeKind::Soc:
        return blk.dim;
    case ConeKind::PsdHermitian:
        return blk.dim * blk.dim;
    }
    return 0;
}

int hermitian_svec_len(int n) { return n * n; }

int svec_diag_index(int j) { return j * j + 2 * j; }

Eigen::VectorXd svec_hermitian(const Eigen::MatrixXcd& h) {
    const int n = static_cast<int>(h.rows());
    Eigen::VectorXd v(n * n);
    int idx = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            v[idx++] = kSqrt2 * h(i, j).real();
            v[idx++] = kSqrt2 * h(i, j).imag();
        }
        v[idx++] = h(j, j).real();
    }
    return v;
}

Eigen::MatrixXcd smat_hermitian(const Eigen::VectorXd& v, int n) {
    Eigen::MatrixXcd h(n, n);
    int idx = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            const std::complex<double> val(v[idx] / kSqrt2, v[idx + 1] / kSqrt2);
            idx += 2;
            h(i, j) = val;
            h(j, i) = std::conj(val);
        }
        h(j, j) = v[idx++];
    }
    return h;
}

std::string to_string(ConicStatus s) {
    switch (s) {
    case ConicStatus::Optimal:
        return "optimal";
    case ConicStatus::PrimalInfeasible:
        return "primal_infeasible";
    case ConicStatus::DualInfeasible:
        return "dual_infeasible";
    case ConicStatus::MaxIters:
        return "max_iters";
    case ConicStatus::NumericalProblem:
        return "numerical_problem";
    }
    return "unknown";
}

namespace {

struct BlockRef {
    ConeKind kind;
    int offset; // row offset in the stacked cone vector
    int len;    // svec length
    int dim;    // matrix order / soc length / entry count
    int psd_col; // fast-path column for PSD identity rows, -1 otherwise
};

struct Layout {
    std::vector<BlockRef> blocks;
    int total = 0;
    double degree = 0.0;

    explicit Layout(const ConicProblem& prob) {
        int off = 0;
        int psd_idx = 0;
        for (const auto& cb : prob.cones) {
            BlockRef ref;
            ref.kind = cb.kind;
            ref.offset = off;
            ref.len = cone_block_len(cb);
            ref.dim = cb.dim;
            ref.psd_col = -1;
            if (cb.kind == ConeKind::PsdHermitian && !prob.psd_identity_col.empty())
                ref.psd_col = prob.psd_identity_col.at(psd_idx);
            if (cb.kind == ConeKind::PsdHermitian)
                ++psd_idx;
            off += ref.len;
            blocks.push_back(ref);
            switch (cb.kind) {
            case ConeKind::NonNeg:
                degree += cb.dim;
                break;
            case ConeKind::Soc:
                degree += 1;
                break;
            case ConeKind::PsdHermitian:
                degree += cb.dim;
                break;
            }
        }
        total = off;
    }
};

// identity element of the cone product
Eigen::VectorXd cone_identity(const Layout& lay) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(lay.total);
    for (const auto& blk : lay.blocks) {
        switch (blk.kind) {
        case ConeKind::NonNeg:
            e.segment(blk.offset, blk.len).setOnes();
            break;
        case ConeKind::Soc:
            e[blk.offset] = 1.0;
            break;
        case ConeKind::PsdHermitian:
            for (int j = 0; j < blk.dim; ++j)
                e[blk.offset + svec_diag_index(j)] = 1.0;
            break;
        }
    }
    return e;
}

// margin to the cone boundary: min eigenvalue in the Jordan sense
double block_margin(const BlockRef& blk, const Eigen::VectorXd& v) {
    switch (blk.kind) {
    case ConeKind::NonNeg:
        return v.segment(blk.offset, blk.len).minCoeff();
    case ConeKind::Soc: {
        const auto seg = v.segment(blk.offset, blk.len);
        return seg[0] - seg.tail(blk.len - 1).norm();
    }
    case ConeKind::PsdHermitian: {
        const Eigen::MatrixXcd m = smat_hermitian(v.segment(blk.offset, blk.len), blk.dim);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    }
    return 0.0;
}

// largest step alpha with v + alpha*dv staying in the cone (inf when interior forever)
double block_max_step(const BlockRef& blk, const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
    switch (blk.kind) {
    case ConeKind::NonNeg: {
        double alpha = kInf;
        for (int i = 0; i < blk.len; ++i) {
            const double d = dv[blk.offset + i];
            if (d < 0.0)
                alpha = std::min(alpha, -v[blk.offset + i] / d);
        }
        return alpha;
    }
    case ConeKind::Soc: {
        const auto x = v.segment(blk.offset, blk.len);
        const auto d = dv.segment(blk.offset, blk.len);
        const int q = blk.len;
        const double a = d[0] * d[0] - d.tail(q - 1).squaredNorm();
        const double b = 2.0 * (x[0] * d[0] - x.tail(q - 1).dot(d.tail(q - 1)));
        const double c = x[0] * x[0] - x.tail(q - 1).squaredNorm();
        double alpha = kInf;
        if (d[0] < 0.0)
            alpha = std::min(alpha, -x[0] / d[0]);
        // roots of a t^2 + b t + c = 0 where the SOC margin vanishes
        std::vector<double> roots;
        if (std::abs(a) < 1e-300) {
            if (std::abs(b) > 1e-300)
                roots.push_back(-c / b);
        } else {
            const double disc = b * b - 4.0 * a * c;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                const double r = (b >= 0.0) ? (-b - sq) / 2.0 : (-b + sq) / 2.0;
                if (std::abs(r) > 1e-300) {
                    roots.push_back(r / a);
                    roots.push_back(c / r);
                } else {
                    roots.push_back(0.0);
                }
            }
        }
        for (double r : roots) {
            if (r <= 0.0)
                continue;
            if (x[0] + r * d[0] >= -1e-14 * (std::abs(x[0]) + 1.0))
                alpha = std::min(alpha, r);
        }
        return alpha;
    }
    case ConeKind::PsdHermitian: {
        const Eigen::MatrixXcd m = smat_hermitian(v.segment(blk.offset, blk.len), blk.dim);
        const Eigen::MatrixXcd dm = smat_hermitian(dv.segment(blk.offset, blk.len), blk.dim);
        Eigen::LLT<Eigen::MatrixXcd> llt(m);
        if (llt.info() != Eigen::Success) {
            // at the boundary already: fall back to eigen-based pencil
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
            Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-14 * es.eigenvalues().maxCoeff());
            Eigen::MatrixXcd l =
                es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
            Eigen::MatrixXcd t = l.inverse() * dm * l.inverse().adjoint();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2((t + t.adjoint()) / 2.0,
                                                                Eigen::EigenvaluesOnly);
            const double lmin = es2.eigenvalues().minCoeff();
            return lmin >= 0.0 ? kInf : 1.0 / (-lmin);
        }
        const Eigen::MatrixXcd li = llt.matrixL().solve(Eigen::MatrixXcd::Identity(blk.dim, blk.dim));
        Eigen::MatrixXcd t = li * dm * li.adjoint();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((t + t.adjoint()) / 2.0,
                                                           Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        return lmin >= 0.0 ? kInf : 1.0 / (-lmin);
    }
    }
    return kInf;
}

// Nesterov-Todd scaling state for one cone block
struct BlockScaling {
    // NonNeg
    Eigen::VectorXd w; // sqrt(s/z)
    // Soc: dense symmetric scaling matrix and its square/inverse-square
    Eigen::MatrixXd soc_w;
    Eigen::MatrixXd soc_w2;
    Eigen::MatrixXd soc_w2inv;
    // PSD
    Eigen::MatrixXcd r;
    Eigen::MatrixXcd rinv;
    Eigen::MatrixXcd g;    // r * r^H
    Eigen::MatrixXcd ginv; // (r * r^H)^{-1}
    // scaled point (diagonal for PSD)
    Eigen::VectorXd lambda_seg;
};

struct Scaling {
    std::vector<BlockScaling> blocks;
    Eigen::VectorXd lambda; // full scaled point
    bool valid = true;      // false when an iterate touched the boundary
};

// J matrix product for SOC: J v = (v0, -v1)
Eigen::VectorXd soc_jmul(const Eigen::VectorXd& v) {
    Eigen::VectorXd out = -v;
    out[0] = v[0];
    return out;
}

Scaling compute_scaling(const Layout& lay, const Eigen::VectorXd& s, const Eigen::VectorXd& z) {
    Scaling sc;
    sc.blocks.resize(lay.blocks.size());
    sc.lambda = Eigen::VectorXd::Zero(lay.total);
    for (std::size_t bi = 0; bi < lay.blocks.size(); ++bi) {
        const BlockRef& blk = lay.blocks[bi];
        BlockScaling& bs = sc.blocks[bi];
        const auto sseg = s.segment(blk.offset, blk.len);
        const auto zseg = z.segment(blk.offset, blk.len);
        switch (blk.kind) {
        case ConeKind::NonNeg: {
            if (sseg.minCoeff() <= 0.0 || zseg.minCoeff() <= 0.0) {
                sc.valid = false;
                return sc;
            }
            bs.w = (sseg.array() / zseg.array()).sqrt();
            bs.lambda_seg = (sseg.array() * zseg.array()).sqrt();
            break;
        }
        case ConeKind::Soc: {
            const int q = blk.len;
            const double sres2 = sseg[0] * sseg[0] - sseg.tail(q - 1).squaredNorm();
            const double zres2 = zseg[0] * zseg[0] - zseg.tail(q - 1).squaredNorm();
            if (sres2 <= 0.0 || zres2 <= 0.0 || sseg[0] <= 0.0 || zseg[0] <= 0.0) {
                sc.valid = false;
                return sc;
            }
            const double snorm = std::sqrt(sres2);
            const double znorm = std::sqrt(zres2);
            const Eigen::VectorXd sb = sseg / snorm;
            const Eigen::VectorXd zb = zseg / znorm;
            const double gamma = std::sqrt((1.0 + sb.dot(zb)) / 2.0);
            // half-angle unit vector: with it, W z = W^{-T} s = lambda
            Eigen::VectorXd v = (sb + soc_jmul(zb)) / (2.0 * gamma);
            v[0] += 1.0;
            v /= std::sqrt(2.0 * v[0]);
            const double eta = std::sqrt(snorm / znorm);
            Eigen::MatrixXd jm = -Eigen::MatrixXd::Identity(q, q);
            jm(0, 0) = 1.0;
            bs.soc_w = eta * (2.0 * v * v.transpose() - jm);
            bs.soc_w2 = bs.soc_w * bs.soc_w;
            bs.soc_w2inv = bs.soc_w2.inverse();
            bs.lambda_seg = bs.soc_w * zseg;
            break;
        }
        case ConeKind::PsdHermitian: {
            const int n = blk.dim;
            const Eigen::MatrixXcd sm = smat_hermitian(sseg, n);
            const Eigen::MatrixXcd zm = smat_hermitian(zseg, n);
            Eigen::LLT<Eigen::MatrixXcd> llt_s(sm);
            Eigen::LLT<Eigen::MatrixXcd> llt_z(zm);
            Eigen::MatrixXcd l1, l2;
            if (llt_s.info() == Eigen::Success) {
                l1 = llt_s.matrixL();
            } else {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sm);
                const double floor = std::max(1e-300, 1e-16 * es.eigenvalues().maxCoeff());
                l1 = es.eigenvectors() * es.eigenvalues().cwiseMax(floor).cwiseSqrt().asDiagonal();
            }
            if (llt_z.info() == Eigen::Success) {
                l2 = llt_z.matrixL();
            } else {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(zm);
                const double floor = std::max(1e-300, 1e-16 * es.eigenvalues().maxCoeff());
                l2 = es.eigenvectors() * es.eigenvalues().cwiseMax(floor).cwiseSqrt().asDiagonal();
            }
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(l2.adjoint() * l1,
                                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
            const Eigen::VectorXd sig = svd.singularValues();
            if (!(sig.minCoeff() > 0.0)) {
                sc.valid = false;
                return sc;
            }
            const Eigen::VectorXd sig_isqrt = sig.cwiseSqrt().cwiseInverse();
            bs.r = l1 * svd.matrixV() * sig_isqrt.asDiagonal();
            bs.rinv = sig_isqrt.asDiagonal() * svd.matrixU().adjoint() * l2.adjoint();
            bs.g = bs.r * bs.r.adjoint();
            bs.ginv = bs.rinv.adjoint() * bs.rinv;
            bs.lambda_seg = Eigen::VectorXd::Zero(blk.len);
            for (int j = 0; j < n; ++j)
                bs.lambda_seg[svec_diag_index(j)] = sig[j];
            break;
        }
        }
        sc.lambda.segment(blk.offset, blk.len) = bs.lambda_seg;
    }
    return sc;
}

enum class ScaleOp { W, Wt, WtW, WtWinv, WinvT };

// apply a scaling operator blockwise to a stacked cone vector
Eigen::VectorXd apply_scaling(const Layout& lay, const Scaling& sc, ScaleOp op,
                              const Eigen::VectorXd& v) {
    Eigen::VectorXd out(lay.total);
    for (std::size_t bi = 0; bi < lay.blocks.size(); ++bi) {
        const BlockRef& blk = lay.blocks[bi];
        const BlockScaling& bs = sc.blocks[bi];
        const auto seg = v.segment(blk.offset, blk.len);
        auto oseg = out.segment(blk.offset, blk.len);
        switch (blk.kind) {
        case ConeKind::NonNeg:
            switch (op) {
            case ScaleOp::W:
            case ScaleOp::Wt:
                oseg = bs.w.asDiagonal() * seg;
                break;
            case ScaleOp::WtW:
                oseg = bs.w.array().square().matrix().asDiagonal() * seg;
                break;
            case ScaleOp::WtWinv:
                oseg = seg.array() / bs.w.array().square();
                break;
            case ScaleOp::WinvT:
                oseg = seg.array() / bs.w.array();
                break;
            }
            break;
        case ConeKind::Soc:
            switch (op) {
            case ScaleOp::W:
            case ScaleOp::Wt:
                oseg = bs.soc_w * seg;
                break;
            case ScaleOp::WtW:
                oseg = bs.soc_w2 * seg;
                break;
            case ScaleOp::WtWinv:
                oseg = bs.soc_w2inv * seg;
                break;
            case ScaleOp::WinvT:
                oseg = bs.soc_w2inv * (bs.soc_w * seg);
                break;
            }
            break;
        case ConeKind::PsdHermitian: {
            const Eigen::MatrixXcd m = smat_hermitian(seg, blk.dim);
            Eigen::MatrixXcd res;
            switch (op) {
            case ScaleOp::W:
                res = bs.r.adjoint() * m * bs.r;
                break;
            case ScaleOp::Wt:
                res = bs.r * m * bs.r.adjoint();
                break;
            case ScaleOp::WtW:
                res = bs.g * m * bs.g;
                break;
            case ScaleOp::WtWinv:
                res = bs.ginv * m * bs.ginv;
                break;
            case ScaleOp::WinvT:
                res = bs.rinv * m * bs.rinv.adjoint();
                break;
            }
            oseg = svec_hermitian((res + res.adjoint()) / 2.0);
            break;
        }
        }
    }
    return out;
}

// Jordan product in the scaled space
Eigen::VectorXd jordan_prod(const Layout& lay, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    Eigen::VectorXd out(lay.total);
    for (const auto& blk : lay.blocks) {
        const auto us = u.segment(blk.offset, blk.len);
        const auto vs = v.segment(blk.offset, blk.len);
        auto oseg = out.segment(blk.offset, blk.len);
        switch (blk.kind) {
        case ConeKind::NonNeg:
            oseg = us.cwiseProduct(vs);
            break;
        case ConeKind::Soc: {
            oseg[0] = us.dot(vs);
            oseg.tail(blk.len - 1) = us[0] * vs.tail(blk.len - 1) + vs[0] * us.tail(blk.len - 1);
            break;
        }
        case ConeKind::PsdHermitian: {
            const Eigen::MatrixXcd um = smat_hermitian(us, blk.dim);
            const Eigen::MatrixXcd vm = smat_hermitian(vs, blk.dim);
            const Eigen::MatrixXcd prod = (um * vm + vm * um) / 2.0;
            oseg = svec_hermitian((prod + prod.adjoint()) / 2.0);
            break;
        }
        }
    }
    return out;
}

// solve lambda o u = d for u, with lambda the (diagonalized) scaled point
Eigen::VectorXd lambda_solve(const Layout& lay, const Scaling& sc, const Eigen::VectorXd& d) {
    Eigen::VectorXd out(lay.total);
    for (std::size_t bi = 0; bi < lay.blocks.size(); ++bi) {
        const BlockRef& blk = lay.blocks[bi];
        const Eigen::VectorXd& lam = sc.blocks[bi].lambda_seg;
        const auto ds = d.segment(blk.offset, blk.len);
        auto oseg = out.segment(blk.offset, blk.len);
        switch (blk.kind) {
        case ConeKind::NonNeg:
            oseg = ds.array() / lam.array();
            break;
        case ConeKind::Soc: {
            const int q = blk.len;
            const double l0 = lam[0];
            const auto l1 = lam.tail(q - 1);
            const double denom = l0 * l0 - l1.squaredNorm();
            const double u0 = (l0 * ds[0] - l1.dot(ds.tail(q - 1))) / denom;
            oseg[0] = u0;
            oseg.tail(q - 1) = (ds.tail(q - 1) - u0 * l1) / l0;
            break;
        }
        case ConeKind::PsdHermitian: {
            const int n = blk.dim;
            Eigen::VectorXd sig(n);
            for (int j = 0; j < n; ++j)
                sig[j] = lam[svec_diag_index(j)];
            Eigen::MatrixXcd dm = smat_hermitian(ds, n);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    dm(i, j) *= 2.0 / (sig[i] + sig[j]);
            oseg = svec_hermitian((dm + dm.adjoint()) / 2.0);
            break;
        }
        }
    }
    return out;
}

// explicit matrix of v -> svec(ginv * smat(v) * ginv) for one PSD block
Eigen::MatrixXd psd_wtwinv_operator(const BlockScaling& bs, int n) {
    const int len = n * n;
    Eigen::MatrixXd op(len, len);
    Eigen::VectorXd basis = Eigen::VectorXd::Zero(len);
    for (int j = 0; j < len; ++j) {
        basis[j] = 1.0;
        const Eigen::MatrixXcd m = smat_hermitian(basis, n);
        const Eigen::MatrixXcd res = bs.ginv * m * bs.ginv;
        op.col(j) = svec_hermitian((res + res.adjoint()) / 2.0);
        basis[j] = 0.0;
    }
    return (op + op.transpose()) / 2.0;
}

struct KktSolver {
    const Layout& lay;
    const ConicProblem& prob;
    Eigen::MatrixXd schur;
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    bool use_llt = true;
    const Scaling* sc = nullptr;
    bool identity_scaling = false;
    // augmented-KKT fallback for when the Schur form runs out of precision
    mutable Eigen::PartialPivLU<Eigen::MatrixXd> aug_lu;
    mutable bool aug_ready = false;

    KktSolver(const Layout& l, const ConicProblem& p) : lay(l), prob(p) {}

    // S = A' (W'W)^{-1} A
    void factor(const Scaling* scaling) {
        sc = scaling;
        identity_scaling = (scaling == nullptr);
        aug_ready = false;
        const int n = static_cast<int>(prob.c.size());
        schur = Eigen::MatrixXd::Zero(n, n);
        int psd_idx = -1;
        for (std::size_t bi = 0; bi < lay.blocks.size(); ++bi) {
            const BlockRef& blk = lay.blocks[bi];
            if (blk.kind == ConeKind::PsdHermitian)
                ++psd_idx;
            const auto a_blk = prob.a.middleRows(blk.offset, blk.len);
            if (blk.kind == ConeKind::PsdHermitian && blk.psd_col >= 0) {
                // rows are -scale*I on the given column range
                const double scale = prob.psd_identity_scale.empty()
                                         ? 1.0
                                         : prob.psd_identity_scale[psd_idx];
                if (identity_scaling)
                    schur.block(blk.psd_col, blk.psd_col, blk.len, blk.len) +=
                        scale * scale * Eigen::MatrixXd::Identity(blk.len, blk.len);
                else
                    schur.block(blk.psd_col, blk.psd_col, blk.len, blk.len) +=
                        scale * scale * psd_wtwinv_operator(sc->blocks[bi], blk.dim);
                continue;
            }
            Eigen::MatrixXd scaled;
            if (identity_scaling) {
                scaled = a_blk;
            } else {
                const BlockScaling& bs = sc->blocks[bi];
                switch (blk.kind) {
                case ConeKind::NonNeg:
                    scaled = bs.w.array().square().inverse().matrix().asDiagonal() * a_blk;
                    break;
                case ConeKind::Soc:
                    scaled = bs.soc_w2inv * a_blk;
                    break;
                case ConeKind::PsdHermitian: {
                    scaled.resize(blk.len, n);
                    for (int j = 0; j < n; ++j) {
                        const Eigen::VectorXd col = a_blk.col(j);
                        if (col.isZero(0.0)) {
                            scaled.col(j).setZero();
                            continue;
                        }
                        const Eigen::MatrixXcd m = smat_hermitian(col, blk.dim);
                        const Eigen::MatrixXcd res = bs.ginv * m * bs.ginv;
                        scaled.col(j) = svec_hermitian((res + res.adjoint()) / 2.0);
                    }
                    break;
                }
                }
            }
            schur.noalias() += a_blk.transpose() * scaled;
        }
        // tiny static regularization keeps the factorization healthy near the
        // boundary without measurably perturbing the solution
        const double reg = 1e-14 * schur.diagonal().cwiseAbs().maxCoeff();
        schur.diagonal().array() += reg;
        llt.compute(schur);
        use_llt = (llt.info() == Eigen::Success);
        if (!use_llt)
            ldlt.compute(schur);
    }

    Eigen::VectorXd solve_schur(const Eigen::VectorXd& rhs) const {
        if (use_llt)
            return llt.solve(rhs);
        return ldlt.solve(rhs);
    }

    Eigen::VectorXd wtwinv(const Eigen::VectorXd& v) const {
        if (identity_scaling)
            return v;
        return apply_scaling(lay, *sc, ScaleOp::WtWinv, v);
    }

    Eigen::VectorXd wtw(const Eigen::VectorXd& v) const {
        if (identity_scaling)
            return v;
        return apply_scaling(lay, *sc, ScaleOp::WtW, v);
    }

    double kkt_residual(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                        const Eigen::VectorXd& x, const Eigen::VectorXd& z) const {
        const double scale = std::max({1.0, p.lpNorm<Eigen::Infinity>(), q.lpNorm<Eigen::Infinity>()});
        const double rp = (p - prob.a.transpose() * z).lpNorm<Eigen::Infinity>();
        const double rq = (q - (prob.a * x - wtw(z))).lpNorm<Eigen::Infinity>();
        return std::max(rp, rq) / scale;
    }

    // factor and solve the full augmented system [0 A'; A -W'W]
    void solve_augmented(const Eigen::VectorXd& p, const Eigen::VectorXd& q, Eigen::VectorXd& x,
                         Eigen::VectorXd& z) const {
        const int n = static_cast<int>(prob.c.size());
        const int m = static_cast<int>(prob.b.size());
        if (!aug_ready) {
            Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + m, n + m);
            kkt.block(0, n, n, m) = prob.a.transpose();
            kkt.block(n, 0, m, n) = prob.a;
            // -W'W block, assembled columnwise through the scaling ops
            Eigen::VectorXd unit = Eigen::VectorXd::Zero(m);
            for (int j = 0; j < m; ++j) {
                unit[j] = 1.0;
                kkt.block(n, n, m, m).col(j) = -wtw(unit);
                unit[j] = 0.0;
            }
            aug_lu.compute(kkt);
            aug_ready = true;
        }
        Eigen::VectorXd rhs(n + m);
        rhs.head(n) = p;
        rhs.tail(m) = q;
        Eigen::VectorXd sol = aug_lu.solve(rhs);
        for (int r = 0; r < 2; ++r) {
            Eigen::VectorXd resid(n + m);
            resid.head(n) = p - prob.a.transpose() * sol.tail(m);
            resid.tail(m) = q - (prob.a * sol.head(n) - wtw(sol.tail(m)));
            sol += aug_lu.solve(resid);
        }
        x = sol.head(n);
        z = sol.tail(m);
    }

    // solve A'z = p, A x - W'W z = q  for (x, z), with iterative refinement
    // and an augmented-system fallback when refinement stalls
    void solve_kkt(const Eigen::VectorXd& p, const Eigen::VectorXd& q, Eigen::VectorXd& x,
                   Eigen::VectorXd& z, int refine_steps) const {
        x = solve_schur(p + prob.a.transpose() * wtwinv(q));
        z = wtwinv(prob.a * x - q);
        for (int r = 0; r < refine_steps; ++r) {
            const Eigen::VectorXd rp = p - prob.a.transpose() * z;
            const Eigen::VectorXd rq = q - (prob.a * x - wtw(z));
            Eigen::VectorXd ex = solve_schur(rp + prob.a.transpose() * wtwinv(rq));
            Eigen::VectorXd ez = wtwinv(prob.a * ex - rq);
            x += ex;
            z += ez;
        }
        if (!identity_scaling && kkt_residual(p, q, x, z) > 1e-10) {
            Eigen::VectorXd xa, za;
            solve_augmented(p, q, xa, za);
            if (kkt_residual(p, q, xa, za) < kkt_residual(p, q, x, z)) {
                x = xa;
                z = za;
            }
        }
    }
};

double overall_max_step(const Layout& lay, const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
    double alpha = kInf;
    for (const auto& blk : lay.blocks)
        alpha = std::min(alpha, block_max_step(blk, v, dv));
    return alpha;
}

ConicSolution solve_conic_core(const ConicProblem& prob, const ConicSettings& settings) {
    const int n = static_cast<int>(prob.c.size());
    const int m = static_cast<int>(prob.b.size());
    Layout lay(prob);

    const Eigen::VectorXd e = cone_identity(lay);
    const double cnorm = std::max(1.0, prob.c.norm());
    const double bnorm = std::max(1.0, prob.b.norm());

    KktSolver kkt(lay, prob);
    kkt.factor(nullptr);

    // primal init: least-squares x, s = b - Ax shifted into the cone;
    // dual init: least-norm solution of A'z = -c shifted into the cone
    Eigen::VectorXd x = kkt.solve_schur(prob.a.transpose() * prob.b);
    Eigen::VectorXd s = prob.b - prob.a * x;
    Eigen::VectorXd z = -prob.a * kkt.solve_schur(prob.c);
    for (Eigen::VectorXd* v : {&s, &z}) {
        double margin = kInf;
        for (const auto& blk : lay.blocks)
            margin = std::min(margin, block_margin(blk, *v));
        if (margin < 1e-4)
            *v += (1.0 - margin) * e;
    }
    double tau = 1.0;
    double kappa = 1.0;

    ConicSolution best;
    double best_score = kInf;
    auto record = [&](ConicStatus status, int iters) {
        ConicSolution sol;
        sol.status = status;
        sol.x = x / tau;
        sol.s = s / tau;
        sol.z = z / tau;
        sol.primal_obj = prob.c.dot(sol.x);
        sol.dual_obj = -prob.b.dot(sol.z);
        sol.pres = (prob.a * sol.x + sol.s - prob.b).norm() / bnorm;
        sol.dres = (prob.a.transpose() * sol.z + prob.c).norm() / cnorm;
        sol.gap = sol.s.dot(sol.z);
        sol.rel_gap = sol.gap / std::max(1.0, std::abs(sol.primal_obj));
        sol.iterations = iters;
        return sol;
    };
    auto finalize_best = [&](ConicStatus fallback) {
        ConicSolution sol = best;
        if (sol.pres <= settings.feas_tol && sol.dres <= settings.feas_tol &&
            (sol.gap <= settings.abs_gap_tol || sol.rel_gap <= settings.rel_gap_tol))
            sol.status = ConicStatus::Optimal;
        else
            sol.status = fallback;
        return sol;
    };

    int consecutive_small_steps = 0;
    for (int iter = 0; iter <= settings.max_iters; ++iter) {
        // residuals of the homogeneous embedding
        const Eigen::VectorXd rx = prob.a.transpose() * z + prob.c * tau;
        const Eigen::VectorXd rz = s + prob.a * x - prob.b * tau;
        const double rtau = kappa + prob.c.dot(x) + prob.b.dot(z);
        const double gap = s.dot(z);
        const double mu = (gap + tau * kappa) / (lay.degree + 1.0);

        const double pcost = prob.c.dot(x) / tau;
        const double dcost = -prob.b.dot(z) / tau;
        const double pres = (rz / tau).norm() / bnorm;
        const double dres = (rx / tau).norm() / cnorm;
        const double gap_u = gap / (tau * tau);
        const double rel_gap = gap_u / std::max(1.0, std::abs(pcost));

        if (settings.verbose)
            std::cerr << "iter " << iter << " pcost " << pcost << " dcost " << dcost << " pres "
                      << pres << " dres " << dres << " gap " << gap_u << " tau " << tau << " kappa "
                      << kappa << "\n";

        const double score = std::max({pres, dres, rel_gap});
        if (score < best_score) {
            best_score = score;
            best = record(ConicStatus::MaxIters, iter);
        } else if (score > 100.0 * best_score && best_score < 1e-6) {
            // numerical corruption past the attainable accuracy: keep the best
            return finalize_best(ConicStatus::NumericalProblem);
        }

        if (pres <= settings.feas_tol && dres <= settings.feas_tol &&
            (gap_u <= settings.abs_gap_tol || rel_gap <= settings.rel_gap_tol))
            return record(ConicStatus::Optimal, iter);

        // certificates of infeasibility
        const double bz = prob.b.dot(z);
        const double cx = prob.c.dot(x);
        if (bz < 0.0) {
            const double pinfres = (prob.a.transpose() * z).norm() / (cnorm * (-bz));
            if (pinfres <= settings.feas_tol) {
                ConicSolution sol;
                sol.status = ConicStatus::PrimalInfeasible;
                sol.x = Eigen::VectorXd::Zero(n);
                sol.s = Eigen::VectorXd::Zero(m);
                sol.z = z / (-bz); // Farkas certificate: z in K, A'z ~ 0, b'z = -1
                sol.pres = pinfres;
                sol.iterations = iter;
                return sol;
            }
        }
        if (cx < 0.0) {
            const double dinfres = (prob.a * x + s).norm() / (bnorm * (-cx));
            if (dinfres <= settings.feas_tol) {
                ConicSolution sol;
                sol.status = ConicStatus::DualInfeasible;
                sol.x = x / (-cx); // unboundedness ray
                sol.s = s / (-cx);
                sol.z = Eigen::VectorXd::Zero(m);
                sol.dres = dinfres;
                sol.iterations = iter;
                return sol;
            }
        }

        // tau collapse: the embedding is heading to a certificate it cannot
        // polish further; classify by the objective signs
        if (tau < 1e-8 * std::max(1.0, kappa) && mu < 1e-8) {
            ConicSolution sol;
            sol.iterations = iter;
            sol.x = Eigen::VectorXd::Zero(n);
            sol.s = Eigen::VectorXd::Zero(m);
            sol.z = Eigen::VectorXd::Zero(m);
            if (bz < 0.0 && (prob.a.transpose() * z).norm() / (cnorm * (-bz)) <=
                                std::sqrt(settings.feas_tol)) {
                sol.status = ConicStatus::PrimalInfeasible;
                sol.z = z / (-bz);
            } else if (cx < 0.0 && (prob.a * x + s).norm() / (bnorm * (-cx)) <=
                                       std::sqrt(settings.feas_tol)) {
                sol.status = ConicStatus::DualInfeasible;
                sol.x = x / (-cx);
                sol.s = s / (-cx);
            } else {
                sol.status = ConicStatus::NumericalProblem;
            }
            return sol;
        }

        if (iter == settings.max_iters)
            break;

        const Scaling sc = compute_scaling(lay, s, z);
        if (!sc.valid)
            return finalize_best(ConicStatus::NumericalProblem);
        kkt.factor(&sc);

        Eigen::VectorXd u1, v1;
        kkt.solve_kkt(-prob.c, prob.b, u1, v1, settings.refine_steps);
        const double denom = kappa - tau * (prob.c.dot(u1) + prob.b.dot(v1));

        const Eigen::VectorXd lam2 = jordan_prod(lay, sc.lambda, sc.lambda);

        auto compute_direction = [&](double sigma, const Eigen::VectorXd& ds_target, double dkappa_target,
                                     Eigen::VectorXd& dx, Eigen::VectorXd& dz, Eigen::VectorXd& ds,
                                     double& dtau, double& dkappa) {
            const Eigen::VectorXd g = lambda_solve(lay, sc, ds_target);
            const Eigen::VectorXd wg = apply_scaling(lay, sc, ScaleOp::Wt, g);
            Eigen::VectorXd u2, v2;
            kkt.solve_kkt(-(1.0 - sigma) * rx, -(1.0 - sigma) * rz - wg, u2, v2,
                          settings.refine_steps);
            dtau = (dkappa_target + tau * (1.0 - sigma) * rtau + tau * (prob.c.dot(u2) + prob.b.dot(v2))) /
                   denom;
            dx = u2 + dtau * u1;
            dz = v2 + dtau * v1;
            ds = wg - apply_scaling(lay, sc, ScaleOp::WtW, dz);
            dkappa = -(1.0 - sigma) * rtau - prob.c.dot(dx) - prob.b.dot(dz);
        };

        auto step_limit = [&](const Eigen::VectorXd& ds, const Eigen::VectorXd& dz, double dtau,
                              double dkappa) {
            double alpha = std::min(overall_max_step(lay, s, ds), overall_max_step(lay, z, dz));
            if (dtau < 0.0)
                alpha = std::min(alpha, -tau / dtau);
            if (dkappa < 0.0)
                alpha = std::min(alpha, -kappa / dkappa);
            return alpha;
        };

        // predictor
        Eigen::VectorXd dxa, dza, dsa;
        double dtaua, dkappaa;
        compute_direction(0.0, -lam2, -tau * kappa, dxa, dza, dsa, dtaua, dkappaa);
        if (settings.verbose) {
            const double e1 = (prob.a.transpose() * dza + prob.c * dtaua + rx).norm();
            const double e2 = (dsa + prob.a * dxa - prob.b * dtaua + rz).norm();
            const double e3 = std::abs(dkappaa + prob.c.dot(dxa) + prob.b.dot(dza) + rtau);
            const double e5 = std::abs(tau * dkappaa + kappa * dtaua + tau * kappa);
            const Eigen::VectorXd e4v = jordan_prod(lay, sc.lambda,
                                                    apply_scaling(lay, sc, ScaleOp::W, dza) +
                                                        apply_scaling(lay, sc, ScaleOp::WinvT, dsa)) +
                                        lam2;
            std::cerr << "  aff resid e1 " << e1 << " e2 " << e2 << " e3 " << e3 << " e4 "
                      << e4v.norm() << " e5 " << e5 << " dtau " << dtaua << " dkappa " << dkappaa
                      << "\n";
        }
        const double alpha_aff = std::min(1.0, step_limit(dsa, dza, dtaua, dkappaa));
        double sigma = std::pow(1.0 - alpha_aff, 3);
        sigma = std::min(1.0, std::max(sigma, 1e-8));

        // corrector
        const Eigen::VectorXd ws_a = apply_scaling(lay, sc, ScaleOp::WinvT, dsa);
        const Eigen::VectorXd wz_a = apply_scaling(lay, sc, ScaleOp::W, dza);
        const Eigen::VectorXd ds_target = -lam2 - jordan_prod(lay, ws_a, wz_a) + sigma * mu * e;
        const double dkappa_target = -tau * kappa - dtaua * dkappaa + sigma * mu;

        Eigen::VectorXd dx, dz, ds;
        double dtau, dkappa;
        compute_direction(sigma, ds_target, dkappa_target, dx, dz, ds, dtau, dkappa);

        double alpha = std::min(1.0, settings.step_scale * step_limit(ds, dz, dtau, dkappa));
        if (settings.verbose)
            std::cerr << "  alpha_aff " << alpha_aff << " sigma " << sigma << " dtau " << dtau
                      << " dkappa " << dkappa << " alpha " << alpha << " mu " << mu << " taukappa "
                      << tau * kappa << "\n";
        if (!std::isfinite(alpha) || alpha <= 0.0)
            return finalize_best(ConicStatus::NumericalProblem);

        x += alpha * dx;
        z += alpha * dz;
        s += alpha * ds;
        tau += alpha * dtau;
        kappa += alpha * dkappa;

        if (alpha < 1e-4)
            ++consecutive_small_steps;
        else
            consecutive_small_steps = 0;
        if (consecutive_small_steps >= 3 || tau < 1e-12 || !std::isfinite(mu))
            return finalize_best(ConicStatus::NumericalProblem);
    }

    return finalize_best(ConicStatus::MaxIters);
}

} // namespace

ConicSolution solve_conic(const ConicProblem& prob, const ConicSettings& settings) {
    const int n = static_cast<int>(prob.c.size());
    const int m = static_cast<int>(prob.b.size());
    if (prob.a.rows() != m || prob.a.cols() != n)
        throw std::invalid_argument("solve_conic: A dimensions inconsistent with b/c");
    Layout lay(prob);
    if (lay.total != m)
        throw std::invalid_argument("solve_conic: cone dimensions do not sum to rows of A");
    std::size_t psd_count = 0;
    for (const auto& cb : prob.cones)
        if (cb.kind == ConeKind::PsdHermitian)
            ++psd_count;
    if (!prob.psd_identity_col.empty() && prob.psd_identity_col.size() != psd_count)
        throw std::invalid_argument("solve_conic: psd_identity_col size mismatch");

    // Ruiz-style equilibration. Column scales are uniform over each
    // PSD-identity column block so the -scale*I Schur fast path survives;
    // row scales are uniform over SOC and PSD blocks (cone automorphisms).
    ConicProblem scaled = prob;
    if (scaled.psd_identity_scale.empty())
        scaled.psd_identity_scale.assign(psd_count, 1.0);
    Eigen::VectorXd row_scale = Eigen::VectorXd::Ones(m);
    Eigen::VectorXd col_scale = Eigen::VectorXd::Ones(n);

    // column group id per column: PSD-identity blocks share a group
    std::vector<int> col_group(n);
    for (int j = 0; j < n; ++j)
        col_group[j] = j;
    int group_count = n;
    {
        int psd_idx = 0;
        for (const auto& blk : lay.blocks) {
            if (blk.kind != ConeKind::PsdHermitian)
                continue;
            const int c0 = prob.psd_identity_col.empty() ? -1 : prob.psd_identity_col[psd_idx];
            if (c0 >= 0)
                for (int j = 1; j < blk.len; ++j)
                    col_group[c0 + j] = col_group[c0];
            ++psd_idx;
        }
        (void)group_count;
    }

    for (int pass = 0; pass < 4; ++pass) {
        // rows: one scalar per cone block, except nonneg rows scale per row
        for (const auto& blk : lay.blocks) {
            if (blk.kind == ConeKind::NonNeg) {
                for (int r = blk.offset; r < blk.offset + blk.len; ++r) {
                    const double g = scaled.a.row(r).cwiseAbs().maxCoeff();
                    if (g > 0.0) {
                        const double d = 1.0 / std::sqrt(g);
                        scaled.a.row(r) *= d;
                        row_scale[r] *= d;
                    }
                }
            } else {
                const double g =
                    scaled.a.middleRows(blk.offset, blk.len).cwiseAbs().maxCoeff();
                if (g > 0.0) {
                    const double d = 1.0 / std::sqrt(g);
                    scaled.a.middleRows(blk.offset, blk.len) *= d;
                    row_scale.segment(blk.offset, blk.len) *= d;
                }
            }
        }
        // columns, respecting groups
        for (int j = 0; j < n; ++j) {
            if (col_group[j] != j)
                continue; // group leader only
            double g = 0.0;
            for (int jj = j; jj < n; ++jj)
                if (col_group[jj] == j)
                    g = std::max(g, scaled.a.col(jj).cwiseAbs().maxCoeff());
            if (g > 0.0) {
                const double d = 1.0 / std::sqrt(g);
                for (int jj = j; jj < n; ++jj)
                    if (col_group[jj] == j) {
                        scaled.a.col(jj) *= d;
                        col_scale[jj] *= d;
                    }
            }
        }
    }
    scaled.b = row_scale.cwiseProduct(prob.b);
    scaled.c = col_scale.cwiseProduct(prob.c);
    {
        int psd_idx = 0;
        for (const auto& blk : lay.blocks) {
            if (blk.kind != ConeKind::PsdHermitian)
                continue;
            const int c0 = prob.psd_identity_col.empty() ? -1 : prob.psd_identity_col[psd_idx];
            if (c0 >= 0)
                scaled.psd_identity_scale[psd_idx] = row_scale[blk.offset] * col_scale[c0];
            ++psd_idx;
        }
    }
    const double b_shift = std::max(1.0, scaled.b.lpNorm<Eigen::Infinity>());
    const double c_shift = std::max(1.0, scaled.c.lpNorm<Eigen::Infinity>());
    scaled.b /= b_shift;
    scaled.c /= c_shift;

    auto solve_and_unscale = [&](const ConicSettings& st) {
        ConicSolution sol = solve_conic_core(scaled, st);
        // map back to the original data
        sol.x = col_scale.cwiseProduct(sol.x) * b_shift;
        sol.s = sol.s.cwiseQuotient(row_scale) * b_shift;
        sol.z = row_scale.cwiseProduct(sol.z) * c_shift;
        sol.primal_obj = prob.c.dot(sol.x);
        sol.dual_obj = -prob.b.dot(sol.z);
        sol.pres = (prob.a * sol.x + sol.s - prob.b).norm() / std::max(1.0, prob.b.norm());
        sol.dres = (prob.a.transpose() * sol.z + prob.c).norm() / std::max(1.0, prob.c.norm());
        sol.gap = std::abs(sol.s.dot(sol.z));
        sol.rel_gap = sol.gap / std::max(1.0, std::abs(sol.primal_obj));
        return sol;
    };

    ConicSolution sol = solve_and_unscale(settings);
    // the core tolerances act on the equilibrated data; when the shifts are
    // large the unscaled residuals can miss the request, so retry tighter
    ConicSettings retry = settings;
    for (int attempt = 0; attempt < 2 && sol.status == ConicStatus::Optimal; ++attempt) {
        const double miss = std::max({sol.pres / settings.feas_tol, sol.dres / settings.feas_tol,
                                      sol.rel_gap / settings.rel_gap_tol});
        if (miss <= 1.0)
            break;
        retry.feas_tol = std::max(1e-13, retry.feas_tol / (2.0 * miss));
        retry.rel_gap_tol = std::max(1e-13, retry.rel_gap_tol / (2.0 * miss));
        retry.abs_gap_tol = std::max(1e-14, retry.abs_gap_tol / (2.0 * miss));
        const ConicSolution again = solve_and_unscale(retry);
        const double score_new = std::max({again.pres, again.dres, again.rel_gap});
        const double score_old = std::max({sol.pres, sol.dres, sol.rel_gap});
        if (again.status == ConicStatus::Optimal || score_new < score_old)
            sol = again;
        else
            break;
    }
    // classify against the requested tolerances on the unscaled residuals
    if (sol.status == ConicStatus::Optimal || sol.status == ConicStatus::MaxIters ||
        sol.status == ConicStatus::NumericalProblem) {
        const bool meets = sol.pres <= settings.feas_tol && sol.dres <= settings.feas_tol &&
                           (sol.gap <= settings.abs_gap_tol || sol.rel_gap <= settings.rel_gap_tol);
        if (meets)
            sol.status = ConicStatus::Optimal;
        else if (sol.status == ConicStatus::Optimal)
            sol.status = ConicStatus::MaxIters;
    }
    return sol;
}

} // namespace ma_isac
