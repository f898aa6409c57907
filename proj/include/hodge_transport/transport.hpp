#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "hodge_transport/common.hpp"
#include "hodge_transport/persistence.hpp"
#include "hodge_transport/spectral.hpp"

namespace hodge_transport {

// ---------------------------------------------------------------------------
// Zero-mode frames.
// ---------------------------------------------------------------------------

enum class FrameSelection { FullKernel, PersistenceSelected };

struct ZeroModeFrame {
    int grid_i = 0, grid_j = 0;
    Eigen::MatrixXd psi;  // m x k, orthonormal columns
    FrameSelection selection = FrameSelection::FullKernel;

    int k() const { return static_cast<int>(psi.cols()); }
};

/// Persistence-selected frame: project the representative cycles of the top-k
/// alive intervals onto ker L and Gram-Schmidt them in lifetime order.
inline ZeroModeFrame selected_frame(const HodgeOperator& op,
                                    const PersistenceDiagram& diagram, double d,
                                    int k, double zero_tol = 0.0) {
    const ZeroModes zm = zero_modes(op, zero_tol);
    const auto alive = select_dominant_alive(diagram, d, k);
    if (static_cast<int>(alive.size()) < k) {
        throw RankDeficitError("selected_frame: only " +
                                   std::to_string(alive.size()) +
                                   " alive intervals, need " + std::to_string(k),
                               k, static_cast<int>(alive.size()));
    }
    if (zm.summary.zero_dim < k) {
        throw RankDeficitError("selected_frame: kernel dimension " +
                                   std::to_string(zm.summary.zero_dim) +
                                   " below requested rank " + std::to_string(k),
                               k, zm.summary.zero_dim);
    }

    ZeroModeFrame frame;
    frame.selection = FrameSelection::PersistenceSelected;
    frame.psi.resize(op.dim(), k);
    for (int c = 0; c < k; ++c) {
        // Harmonic projection of the representative, then orthogonalize
        // against the previously accepted columns (one re-orthogonalization
        // pass keeps the Gram defect at roundoff level).
        Eigen::VectorXd v = zm.basis * (zm.basis.transpose() * alive[c]->rep_cycle);
        const double projected_norm = v.norm();
        if (projected_norm < 1e-8) {
            throw DegenerateSelectionError(
                "selected_frame: representative cycle nearly orthogonal to the kernel",
                projected_norm);
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (int p = 0; p < c; ++p) {
                v -= frame.psi.col(p).dot(v) * frame.psi.col(p);
            }
        }
        const double residual = v.norm();
        if (residual < 1e-8) {
            throw DegenerateSelectionError(
                "selected_frame: projected cycles are linearly dependent", residual);
        }
        frame.psi.col(c) = v / residual;
    }
    return frame;
}

/// Full-kernel frame straight from the eigensolver basis.
inline ZeroModeFrame full_kernel_frame(const HodgeOperator& op,
                                       double zero_tol = 0.0) {
    ZeroModeFrame frame;
    frame.selection = FrameSelection::FullKernel;
    frame.psi = zero_modes(op, zero_tol).basis;
    return frame;
}

// ---------------------------------------------------------------------------
// One-step polar transport Q = U V^T from the overlap M = Psi_a^T Psi_b.
// ---------------------------------------------------------------------------

inline Eigen::MatrixXd polar_orthogonal(const Eigen::MatrixXd& overlap,
                                        double* sigma_min = nullptr) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(overlap,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (sigma_min) {
        *sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
    }
    return svd.matrixU() * svd.matrixV().transpose();
}

inline Eigen::MatrixXd one_step_transport(const ZeroModeFrame& a,
                                          const ZeroModeFrame& b) {
    if (a.k() != b.k())
        throw InvalidInputError("one_step_transport: frames have different ranks");
    double smin = 0.0;
    const Eigen::MatrixXd q = polar_orthogonal(a.psi.transpose() * b.psi, &smin);
    if (smin <= 1e-6) {
        throw TransportBreakdownError(
            "one_step_transport: subspaces nearly orthogonal (sigma_min " +
                std::to_string(smin) + ")",
            smin);
    }
    return q;
}

// ---------------------------------------------------------------------------
// Holonomy along closed frame paths: the path-ordered product of the one-step
// transports Q_s = polar(Psi_s^T Psi_{s+1}), with a closing step back to the
// start. With this overlap convention the product must compose in path order
// (each new step on the right); composed that way, a per-point re-gauging
// psi_s -> psi_s g_s turns the cycle product into g_0^T U g_0, so traces,
// determinants, spectra and ||U - I||_F are exactly gauge-invariant.
// ---------------------------------------------------------------------------

struct GaugeInvariants {
    double trace = 0.0;
    double determinant = 0.0;
    std::vector<std::complex<double>> spectrum;
};

inline GaugeInvariants gauge_invariants(const Eigen::MatrixXd& u) {
    GaugeInvariants gi;
    gi.trace = u.trace();
    gi.determinant = u.determinant();
    Eigen::EigenSolver<Eigen::MatrixXd> es(u);
    gi.spectrum.assign(es.eigenvalues().data(),
                       es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(gi.spectrum.begin(), gi.spectrum.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  if (a.real() != b.real()) return a.real() < b.real();
                  return a.imag() < b.imag();
              });
    return gi;
}

/// Exhaustive nearest signed permutation (2^k k! candidates, k <= 4).
inline Eigen::MatrixXd nearest_signed_permutation(const Eigen::MatrixXd& u,
                                                  std::vector<int>* images = nullptr,
                                                  std::vector<int>* signs = nullptr) {
    const int k = static_cast<int>(u.rows());
    if (k > 4)
        throw UnsupportedRankError("nearest_signed_permutation: rank too large", k);
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    double best = kInfinity;
    Eigen::MatrixXd best_mat = Eigen::MatrixXd::Identity(k, k);
    std::vector<int> best_perm(perm), best_signs(k, 1);
    do {
        for (int mask = 0; mask < (1 << k); ++mask) {
            Eigen::MatrixXd cand = Eigen::MatrixXd::Zero(k, k);
            for (int a = 0; a < k; ++a) {
                cand(a, perm[a]) = (mask >> a) & 1 ? -1.0 : 1.0;
            }
            const double dist = (u - cand).norm();
            if (dist < best) {
                best = dist;
                best_mat = cand;
                best_perm = perm;
                best_signs.assign(k, 1);
                for (int a = 0; a < k; ++a)
                    best_signs[a] = (mask >> a) & 1 ? -1 : 1;
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (images) *images = best_perm;
    if (signs) *signs = best_signs;
    return best_mat;
}

struct TransportRecord {
    std::vector<Eigen::MatrixXd> steps;       // Q_0 .. Q_{L-1} (last closes)
    std::vector<double> cumulative;           // ||H_n - I||_F, n = 1..L
    Eigen::MatrixXd cycle_holonomy;           // ordered product of steps
    Eigen::MatrixXd permutation;              // nearest signed permutation
    std::vector<int> permutation_images;
    std::vector<int> permutation_signs;
    double deviation = 0.0;                   // ||U_cycle - I||_F
};

/// Holonomy of a closed cycle of frames (closing step last -> first included).
inline TransportRecord cycle_holonomy(const std::vector<ZeroModeFrame>& frames) {
    if (frames.size() < 2)
        throw InvalidInputError("cycle_holonomy: need at least 2 frames");
    const int k = frames.front().k();
    const std::size_t n = frames.size();
    TransportRecord rec;
    rec.steps.reserve(n);
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(k, k);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(k, k);
    for (std::size_t s = 0; s < n; ++s) {
        const ZeroModeFrame& a = frames[s];
        const ZeroModeFrame& b = frames[(s + 1) % n];
        const Eigen::MatrixXd q = one_step_transport(a, b);
        rec.steps.push_back(q);
        h = (h * q).eval();
        rec.cumulative.push_back((h - id).norm());
    }
    rec.cycle_holonomy = h;
    rec.deviation = (h - id).norm();
    rec.permutation = nearest_signed_permutation(h, &rec.permutation_images,
                                                 &rec.permutation_signs);
    return rec;
}

/// Holonomy around the grid rectangle with corners (i0,j0), (i1,j1), one grid
/// cell per step; `frame_at` maps (i,j) to a frame. The rectangle is
/// traversed t-first ((i0,j0)->(i0,j1)->(i1,j1)->(i1,j0)->(i0,j0)): with the
/// path-ordered step product this orientation satisfies the small-loop law
/// U ~ I - F_dt * area.
template <typename FrameAt>
inline Eigen::MatrixXd loop_holonomy(FrameAt&& frame_at, int i0, int j0, int i1,
                                     int j1) {
    std::vector<std::pair<int, int>> path;
    for (int j = j0; j < j1; ++j) path.emplace_back(i0, j);
    for (int i = i0; i < i1; ++i) path.emplace_back(i, j1);
    for (int j = j1; j > j0; --j) path.emplace_back(i1, j);
    for (int i = i1; i > i0; --i) path.emplace_back(i, j0);
    if (path.empty()) {
        const ZeroModeFrame& f = frame_at(i0, j0);
        return Eigen::MatrixXd::Identity(f.k(), f.k());
    }
    Eigen::MatrixXd u;
    for (std::size_t s = 0; s < path.size(); ++s) {
        const auto& [ai, aj] = path[s];
        const auto& [bi, bj] = path[(s + 1) % path.size()];
        const Eigen::MatrixXd q =
            one_step_transport(frame_at(ai, aj), frame_at(bi, bj));
        u = (s == 0) ? q : (u * q).eval();
    }
    return u;
}

// ---------------------------------------------------------------------------
// Curvature field over a frame grid (central differences of P = Psi Psi^T,
// sandwiched back into the local frame; see curvature_coefficient).
// ---------------------------------------------------------------------------

struct CurvatureField {
    int nd = 0, nt = 0;
    std::vector<Eigen::MatrixXd> f;  // k x k per point (empty when masked)
    std::vector<double> norm;        // ||F||_F, 0 when masked
    std::vector<char> mask;          // 1 = valid interior stencil

    int index(int i, int j) const { return i * nt + j; }
};

/// Frames are optional per grid node; a curvature entry is produced only where
/// the center and its four neighbors exist with equal rank.
inline CurvatureField curvature_grid(
    const std::vector<std::optional<ZeroModeFrame>>& frames, int nd, int nt,
    double delta_d, double delta_t) {
    if (static_cast<int>(frames.size()) != nd * nt)
        throw InvalidInputError("curvature_grid: frame grid size mismatch");
    CurvatureField field;
    field.nd = nd;
    field.nt = nt;
    field.f.resize(frames.size());
    field.norm.assign(frames.size(), 0.0);
    field.mask.assign(frames.size(), 0);
    for (int i = 1; i + 1 < nd; ++i) {
        for (int j = 1; j + 1 < nt; ++j) {
            const auto& c = frames[i * nt + j];
            const auto& dp = frames[(i + 1) * nt + j];
            const auto& dm = frames[(i - 1) * nt + j];
            const auto& tp = frames[i * nt + (j + 1)];
            const auto& tm = frames[i * nt + (j - 1)];
            if (!c || !dp || !dm || !tp || !tm) continue;
            const int k = c->k();
            if (dp->k() != k || dm->k() != k || tp->k() != k || tm->k() != k)
                continue;
            Eigen::MatrixXd fc = curvature_coefficient(
                c->psi, dp->psi, dm->psi, tp->psi, tm->psi, delta_d, delta_t);
            const int idx = i * nt + j;
            field.norm[idx] = fc.norm();
            field.f[idx] = std::move(fc);
            field.mask[idx] = 1;
        }
    }
    return field;
}

}  // namespace hodge_transport
