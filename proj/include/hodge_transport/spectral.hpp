#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <vector>

#include "hodge_transport/common.hpp"
#include "hodge_transport/laplacian.hpp"

namespace hodge_transport {

// ---------------------------------------------------------------------------
// Zero-mode extraction.
// ---------------------------------------------------------------------------

struct SpectralSummary {
    Eigen::VectorXd eigenvalues;  // ascending
    int zero_dim = 0;             // count strictly below zero_tol
    double gap = kInfinity;       // smallest eigenvalue >= zero_tol
    double zero_tol = 0.0;
};

struct ZeroModes {
    SpectralSummary summary;
    Eigen::MatrixXd basis;  // m x zero_dim, orthonormal columns
};

/// zero_tol <= 0 selects the default 1e-8 * max(1, largest eigenvalue).
inline ZeroModes zero_modes(const HodgeOperator& op, double zero_tol = 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
    if (es.info() != Eigen::Success)
        throw Error("zero_modes: eigendecomposition failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    const int m = static_cast<int>(ev.size());
    double tol = zero_tol;
    if (!(tol > 0.0)) tol = 1e-8 * std::max(1.0, ev[m - 1]);

    int k = 0;
    while (k < m && ev[k] < tol) ++k;
    const double gap = (k < m) ? ev[k] : kInfinity;
    if (k < m && gap <= tol) {
        throw GapFailureError(
            "zero_modes: eigenvalue pair straddles the kernel tolerance",
            k > 0 ? ev[k - 1] : -kInfinity, gap);
    }

    ZeroModes out;
    out.summary.eigenvalues = ev;
    out.summary.zero_dim = k;
    out.summary.gap = gap;
    out.summary.zero_tol = tol;
    out.basis = es.eigenvectors().leftCols(k);
    return out;
}

// ---------------------------------------------------------------------------
// Projections.
// ---------------------------------------------------------------------------

struct Projection {
    Eigen::MatrixXd p;  // symmetric idempotent
    int rank = 0;
};

inline Projection projection_from_basis(const Eigen::MatrixXd& basis) {
    const int k = static_cast<int>(basis.cols());
    const Eigen::MatrixXd gram = basis.transpose() * basis;
    const double defect = (gram - Eigen::MatrixXd::Identity(k, k)).norm();
    if (defect > 1e-8) {
        throw InvalidFrameError(
            "projection_from_basis: columns not orthonormal (defect " +
                std::to_string(defect) + ")",
            defect);
    }
    Projection out;
    out.p = basis * basis.transpose();
    symmetrize(out.p);
    out.rank = k;
    return out;
}

// ---------------------------------------------------------------------------
// Riesz contour oracle: P0 = (1/2*pi*i) \oint (z - L)^{-1} dz over the circle
// of radius gamma/2 about the origin, discretized with the trapezoid rule
// (exponentially convergent for this analytic integrand). Each node is an
// independent complex LU solve, so the result never touches the
// eigendecomposition path it is used to check.
// ---------------------------------------------------------------------------

struct RieszResult {
    Projection projection;
    double imag_residue = 0.0;  // max |Im| entry before discarding
};

inline RieszResult riesz_projection_detailed(const HodgeOperator& op, double gamma,
                                             int n_nodes) {
    if (n_nodes < 16)
        throw InvalidInputError("riesz_projection: need at least 16 contour nodes");
    if (!(gamma > 0.0)) throw InvalidInputError("riesz_projection: gamma must be > 0");

    // Spectrum precondition: nothing may sit in the annulus (gamma/4, gamma).
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix,
                                                          Eigen::EigenvaluesOnly);
        for (int i = 0; i < es.eigenvalues().size(); ++i) {
            const double lam = es.eigenvalues()[i];
            if (lam > 0.25 * gamma && lam < gamma) {
                throw ContourViolationError(
                    "riesz_projection: eigenvalue " + std::to_string(lam) +
                        " inside the contour safety annulus (gamma/4, gamma)",
                    lam);
            }
        }
    }

    const int m = op.dim();
    const double r = 0.5 * gamma;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m, m);
    const Eigen::MatrixXcd lc = op.matrix.cast<std::complex<double>>();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m, m);
    for (int j = 0; j < n_nodes; ++j) {
        const double theta = 2.0 * M_PI * j / n_nodes;
        const std::complex<double> z = std::polar(r, theta);
        // (1/2*pi*i) * resolvent * dz, trapezoid: dz_j = i z_j * (2*pi/n).
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(z * id - lc);
        acc += z * lu.solve(id);
    }
    acc /= static_cast<double>(n_nodes);

    RieszResult out;
    out.imag_residue = acc.imag().cwiseAbs().maxCoeff();
    out.projection.p = acc.real();
    symmetrize(out.projection.p);
    out.projection.rank = static_cast<int>(std::lround(out.projection.p.trace()));
    return out;
}

inline Projection riesz_projection(const HodgeOperator& op, double gamma,
                                   int n_nodes = 64) {
    return riesz_projection_detailed(op, gamma, n_nodes).projection;
}

// ---------------------------------------------------------------------------
// Resolvent bound diagnostic: sup over contour nodes of ||(z-L)^{-1}|| must
// not exceed 2/gamma (up to roundoff slack). The norm is evaluated through
// the singular values of (z - L), independent of the bound's derivation.
// ---------------------------------------------------------------------------

struct ResolventReport {
    double gamma = 0.0;
    int n_nodes = 0;
    double max_resolvent_norm = 0.0;
    double bound = 0.0;  // 2/gamma
    bool satisfied = false;
};

inline ResolventReport resolvent_bound_check(const HodgeOperator& op, double gamma,
                                             int n_nodes = 64) {
    if (!(gamma > 0.0))
        throw InvalidInputError("resolvent_bound_check: gamma must be > 0");
    if (n_nodes < 1) throw InvalidInputError("resolvent_bound_check: n_nodes >= 1");
    const int m = op.dim();
    const double r = 0.5 * gamma;
    const Eigen::MatrixXcd lc = op.matrix.cast<std::complex<double>>();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(m, m);
    double worst = 0.0;
    for (int j = 0; j < n_nodes; ++j) {
        const double theta = 2.0 * M_PI * j / n_nodes;
        const std::complex<double> z = std::polar(r, theta);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(z * id - lc);
        const double smin = svd.singularValues()(svd.singularValues().size() - 1);
        if (smin <= 0.0) {
            worst = kInfinity;
            break;
        }
        worst = std::max(worst, 1.0 / smin);
    }
    ResolventReport rep;
    rep.gamma = gamma;
    rep.n_nodes = n_nodes;
    rep.max_resolvent_norm = worst;
    rep.bound = 2.0 / gamma;
    rep.satisfied = worst <= rep.bound * (1.0 + 1e-9);
    return rep;
}

// ---------------------------------------------------------------------------
// Low-rank helpers. Projections here are P = Psi Psi^T with k << m, and every
// stability statistic is a spectral/Frobenius norm of short sums of such
// terms; the norms are evaluated through small Gram matrices instead of m x m
// algebra.
// ---------------------------------------------------------------------------

/// Operator norm of sum_i c_i * B_i B_i^T for m x k_i blocks B_i.
inline double lowrank_sym_opnorm(const std::vector<Eigen::MatrixXd>& blocks,
                                 const std::vector<double>& coeffs) {
    int total = 0;
    for (const auto& b : blocks) total += static_cast<int>(b.cols());
    if (total == 0) return 0.0;
    const int m = static_cast<int>(blocks.front().rows());
    Eigen::MatrixXd u(m, total);
    Eigen::VectorXd c(total);
    int at = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const int k = static_cast<int>(blocks[i].cols());
        u.middleCols(at, k) = blocks[i];
        c.segment(at, k).setConstant(coeffs[i]);
        at += k;
    }
    const Eigen::MatrixXd gram = u.transpose() * u;  // total x total
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gs(gram);
    // X = U C U^T has the nonzero spectrum of G^{1/2} C G^{1/2}.
    const Eigen::MatrixXd ghalf =
        gs.eigenvectors() *
        gs.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
        gs.eigenvectors().transpose();
    const Eigen::MatrixXd core = ghalf * c.asDiagonal() * ghalf;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(core, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

/// Operator norm of Psi Psi^T - Phi Phi^T.
inline double projection_difference_opnorm(const Eigen::MatrixXd& psi,
                                           const Eigen::MatrixXd& phi) {
    return lowrank_sym_opnorm({psi, phi}, {1.0, -1.0});
}

// ---------------------------------------------------------------------------
// Central-difference Berry curvature through the projection formula,
// F = P [dP, dP] P, evaluated entirely in frame coefficients: with
// P_x = Psi_x Psi_x^T the m x m products collapse to k x k overlap products.
// The ambient matrix is Psi F_coeff Psi^T, so Frobenius norms agree.
// ---------------------------------------------------------------------------

/// k x k coefficient matrix of F_dt at the stencil center.
inline Eigen::MatrixXd curvature_coefficient(const Eigen::MatrixXd& center,
                                             const Eigen::MatrixXd& dplus,
                                             const Eigen::MatrixXd& dminus,
                                             const Eigen::MatrixXd& tplus,
                                             const Eigen::MatrixXd& tminus,
                                             double delta_d, double delta_t) {
    const double scale = 1.0 / (4.0 * delta_d * delta_t);
    const Eigen::MatrixXd* ds[2] = {&dplus, &dminus};
    const Eigen::MatrixXd* ts[2] = {&tplus, &tminus};
    const double sgn[2] = {1.0, -1.0};
    const int k = static_cast<int>(center.cols());
    // A = Psi^T (dP_d)(dP_t) Psi; the commutator is A - A^T.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
    for (int x = 0; x < 2; ++x) {
        const Eigen::MatrixXd left = center.transpose() * (*ds[x]);  // k x k'
        for (int y = 0; y < 2; ++y) {
            const Eigen::MatrixXd mid = ds[x]->transpose() * (*ts[y]);
            const Eigen::MatrixXd right = ts[y]->transpose() * center;
            a.noalias() += (sgn[x] * sgn[y] * scale) * (left * mid * right);
        }
    }
    return a - a.transpose().eval();
}

/// ||Psi_a Fa Psi_a^T - Psi_b Fb Psi_b^T||_F without forming m x m matrices.
inline double ambient_curvature_distance(const Eigen::MatrixXd& psi_a,
                                         const Eigen::MatrixXd& fa,
                                         const Eigen::MatrixXd& psi_b,
                                         const Eigen::MatrixXd& fb) {
    const Eigen::MatrixXd overlap = psi_a.transpose() * psi_b;
    const double cross =
        (fa.transpose() * overlap * fb * overlap.transpose()).trace();
    const double sq = fa.squaredNorm() + fb.squaredNorm() - 2.0 * cross;
    return std::sqrt(std::max(0.0, sq));
}

// ---------------------------------------------------------------------------
// Appendix-B style stability ratios over an operator grid.
// ---------------------------------------------------------------------------

struct OperatorGrid {
    int nd = 0, nt = 0;
    double delta_d = 0.0, delta_t = 0.0;
    std::vector<HodgeOperator> ops;  // row-major: index = i * nt + j

    const HodgeOperator& at(int i, int j) const { return ops[i * nt + j]; }
    HodgeOperator& at(int i, int j) { return ops[i * nt + j]; }
};

struct StabilityPoint {
    int i = 0, j = 0;
    bool jointly_regular = false;  // both gaps certified, equal kernel dims
    bool interior = false;         // 5-point stencil jointly regular
    double gamma_point = 0.0;      // min of the two pointwise gaps
    double op_delta = 0.0;         // ||L - Lt||
    double proj_delta = 0.0;       // ||P - Pt||
    double ratio = 0.0;            // proj_delta / op_delta (0 when op_delta = 0)
    bool bound_ok = false;         // proj_delta <= (2/gamma_point) op_delta
    double dproj_delta = 0.0;      // ||dP - dPt||, central differences, d and t summed
    double curv_delta = 0.0;       // ||F - Ft||_F, ambient Frobenius
};

namespace detail {

struct FrameCache {
    bool ok = false;
    double gap = 0.0;
    int dim = 0;
    Eigen::MatrixXd basis;
};

inline FrameCache cache_kernel(const HodgeOperator& op, double zero_tol,
                               double gamma_min) {
    FrameCache fc;
    try {
        ZeroModes zm = zero_modes(op, zero_tol);
        fc.gap = zm.summary.gap;
        fc.dim = zm.summary.zero_dim;
        fc.basis = std::move(zm.basis);
        fc.ok = fc.gap >= gamma_min && fc.dim > 0;
    } catch (const GapFailureError&) {
        fc.ok = false;
    }
    return fc;
}

}  // namespace detail

/// Evaluates ||P-Pt|| / ||L-Lt|| at every jointly regular grid point plus the
/// finite-difference ||dP-dPt|| and ambient ||F-Ft||_F on interior stencils.
/// Points failing gap certification are excluded and flagged (not thrown).
inline std::vector<StabilityPoint> stability_ratios(const OperatorGrid& lg,
                                                    const OperatorGrid& ltg,
                                                    double gamma_min,
                                                    double zero_tol = 0.0) {
    if (lg.nd != ltg.nd || lg.nt != ltg.nt)
        throw InvalidInputError("stability_ratios: grid shape mismatch");
    const int nd = lg.nd, nt = lg.nt;
    std::vector<detail::FrameCache> fa(nd * nt), fb(nd * nt);
    for (int idx = 0; idx < nd * nt; ++idx) {
        fa[idx] = detail::cache_kernel(lg.ops[idx], zero_tol, gamma_min);
        fb[idx] = detail::cache_kernel(ltg.ops[idx], zero_tol, gamma_min);
    }
    auto joint = [&](int i, int j) {
        const int idx = i * nt + j;
        return fa[idx].ok && fb[idx].ok && fa[idx].dim == fb[idx].dim;
    };

    std::vector<StabilityPoint> out;
    out.reserve(nd * nt);
    for (int i = 0; i < nd; ++i) {
        for (int j = 0; j < nt; ++j) {
            const int idx = i * nt + j;
            StabilityPoint sp;
            sp.i = i;
            sp.j = j;
            sp.jointly_regular = joint(i, j);
            if (!sp.jointly_regular) {
                out.push_back(sp);
                continue;
            }
            sp.gamma_point = std::min(fa[idx].gap, fb[idx].gap);
            sp.op_delta = perturb_operator(lg.ops[idx], ltg.ops[idx]);
            sp.proj_delta = projection_difference_opnorm(fa[idx].basis, fb[idx].basis);
            sp.ratio = sp.op_delta > 0.0 ? sp.proj_delta / sp.op_delta : 0.0;
            sp.bound_ok =
                sp.proj_delta <= (2.0 / sp.gamma_point) * sp.op_delta + 1e-12;

            const bool can_stencil = i > 0 && i + 1 < nd && j > 0 && j + 1 < nt &&
                                     joint(i - 1, j) && joint(i + 1, j) &&
                                     joint(i, j - 1) && joint(i, j + 1) &&
                                     fa[(i - 1) * nt + j].dim == fa[idx].dim &&
                                     fa[(i + 1) * nt + j].dim == fa[idx].dim &&
                                     fa[i * nt + (j - 1)].dim == fa[idx].dim &&
                                     fa[i * nt + (j + 1)].dim == fa[idx].dim;
            if (can_stencil) {
                sp.interior = true;
                const double cd = 0.5 / lg.delta_d;
                const double ct = 0.5 / lg.delta_t;
                const auto& adp = fa[(i + 1) * nt + j].basis;
                const auto& adm = fa[(i - 1) * nt + j].basis;
                const auto& atp = fa[i * nt + (j + 1)].basis;
                const auto& atm = fa[i * nt + (j - 1)].basis;
                const auto& bdp = fb[(i + 1) * nt + j].basis;
                const auto& bdm = fb[(i - 1) * nt + j].basis;
                const auto& btp = fb[i * nt + (j + 1)].basis;
                const auto& btm = fb[i * nt + (j - 1)].basis;
                const double dpd = lowrank_sym_opnorm({adp, adm, bdp, bdm},
                                                      {cd, -cd, -cd, cd});
                const double dpt = lowrank_sym_opnorm({atp, atm, btp, btm},
                                                      {ct, -ct, -ct, ct});
                sp.dproj_delta = dpd + dpt;

                const Eigen::MatrixXd fca = curvature_coefficient(
                    fa[idx].basis, adp, adm, atp, atm, lg.delta_d, lg.delta_t);
                const Eigen::MatrixXd fcb = curvature_coefficient(
                    fb[idx].basis, bdp, bdm, btp, btm, ltg.delta_d, ltg.delta_t);
                sp.curv_delta =
                    ambient_curvature_distance(fa[idx].basis, fca, fb[idx].basis, fcb);
            }
            out.push_back(sp);
        }
    }
    return out;
}

}  // namespace hodge_transport
