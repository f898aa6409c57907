#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "hodge_transport/chains.hpp"
#include "hodge_transport/common.hpp"

namespace hodge_transport {

enum class HodgeKind { Extended, Smooth };

// Symmetric PSD operator on the ambient edge space. Symmetrized on
// construction so downstream eigensolvers see an exactly symmetric matrix.
struct HodgeOperator {
    Eigen::MatrixXd matrix;
    HodgeKind kind = HodgeKind::Extended;
    double epsilon = 0.0;  // Smooth only
    double mu = 0.0;       // Smooth only

    int dim() const { return static_cast<int>(matrix.rows()); }
};

inline void symmetrize(Eigen::MatrixXd& m) {
    m = 0.5 * (m + m.transpose()).eval();
}

// ---------------------------------------------------------------------------
// Extended Hodge operator in degree 1: B1^T B1 + B2 B2^T on active-edge
// coordinates, identity on inactive-edge coordinates. The identity extension
// adds no zero modes, so ker equals the kernel of the natural Laplacian.
//
// Assembly scans the nonzero pattern of the boundary columns instead of
// forming dense matrix products; inactive columns are zero, so active rows and
// columns come out identical to the dense formula.
// ---------------------------------------------------------------------------

inline HodgeOperator extended_hodge(const BoundaryMatrices& bnd) {
    const int n = static_cast<int>(bnd.b1.rows());
    const int m = static_cast<int>(bnd.b1.cols());
    const int m2 = static_cast<int>(bnd.b2.cols());
    HodgeOperator op;
    op.kind = HodgeKind::Extended;
    op.matrix = Eigen::MatrixXd::Zero(m, m);

    // Down part (B1^T B1): accumulate over vertices shared by active edges.
    std::vector<std::vector<int>> incident(n);
    for (int e = 0; e < m; ++e) {
        if (!bnd.active_edges[e]) continue;
        for (int v = 0; v < n; ++v) {
            if (bnd.b1(v, e) != 0.0) incident[v].push_back(e);
        }
    }
    for (int v = 0; v < n; ++v) {
        const auto& inc = incident[v];
        for (std::size_t a = 0; a < inc.size(); ++a) {
            for (std::size_t b = 0; b < inc.size(); ++b) {
                op.matrix(inc[a], inc[b]) += bnd.b1(v, inc[a]) * bnd.b1(v, inc[b]);
            }
        }
    }

    // Up part (B2 B2^T): accumulate over active triangles.
    for (int t = 0; t < m2; ++t) {
        if (!bnd.active_triangles[t]) continue;
        int rows[3];
        double vals[3];
        int c = 0;
        for (int e = 0; e < m && c < 3; ++e) {
            const double x = bnd.b2(e, t);
            if (x != 0.0) {
                rows[c] = e;
                vals[c] = x;
                ++c;
            }
        }
        for (int a = 0; a < c; ++a)
            for (int b = 0; b < c; ++b) op.matrix(rows[a], rows[b]) += vals[a] * vals[b];
    }

    // Identity extension on inactive edges.
    for (int e = 0; e < m; ++e) {
        if (!bnd.active_edges[e]) op.matrix(e, e) = 1.0;
    }

    symmetrize(op.matrix);
    return op;
}

// ---------------------------------------------------------------------------
// Smooth sigmoid-weighted model.
// ---------------------------------------------------------------------------

/// Logistic activation 1/(1+exp(-s/eps)), evaluated overflow-safe.
inline double sigmoid_weight(double s, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw InvalidInputError("sigmoid_weight: epsilon must be > 0, got " +
                                std::to_string(epsilon));
    }
    const double x = s / epsilon;
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

struct WeightVector {
    Eigen::VectorXd w_vertices;   // identically 1: Rips vertices are born at 0
    Eigen::VectorXd w_edges;      // in [0,1]
    Eigen::VectorXd w_triangles;  // in [0,1]
};

inline WeightVector activation_weights(const FiltrationFrame& thresh,
                                       const AmbientChainSpace& amb, double d,
                                       double epsilon) {
    WeightVector w;
    w.w_vertices = Eigen::VectorXd::Ones(amb.vertex_count);
    w.w_edges.resize(amb.edge_dim());
    for (int e = 0; e < amb.edge_dim(); ++e)
        w.w_edges[e] = sigmoid_weight(d - thresh.edge_thresholds[e], epsilon);
    w.w_triangles.resize(amb.triangle_dim());
    for (int t = 0; t < amb.triangle_dim(); ++t)
        w.w_triangles[t] = sigmoid_weight(d - thresh.triangle_thresholds[t], epsilon);
    return w;
}

namespace detail {

// Assembles W0^{1/2} B1 W1^{1/2}, W1^{1/2} B2 W2^{1/2} contributions plus the
// mu(I - W1) penalty directly from the incidence structure. `dweights` selects
// the derivative assembly (product rule) used by smooth_hodge_derivative_d.
inline Eigen::MatrixXd assemble_smooth(const AmbientChainSpace& amb,
                                       const Eigen::VectorXd& we,
                                       const Eigen::VectorXd& wt, double mu,
                                       bool derivative,
                                       const Eigen::VectorXd& dwe = {},
                                       const Eigen::VectorXd& dwt = {}) {
    const int n = amb.vertex_count;
    const int m = amb.edge_dim();
    const int m2 = amb.triangle_dim();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
    const Eigen::VectorXd se = we.cwiseSqrt();

    // Down part: (d1^T d1)_{ee'} = sum_v B1_{ve} B1_{ve'} sqrt(we) sqrt(we').
    // Derivative: product rule on sqrt(we) sqrt(we').
    std::vector<std::vector<int>> incident(n);
    for (int e = 0; e < m; ++e) {
        incident[amb.edges[e][0]].push_back(e);
        incident[amb.edges[e][1]].push_back(e);
    }
    auto b1sign = [&amb](int v, int e) {
        return v == amb.edges[e][0] ? -1.0 : 1.0;
    };
    // d/dd sqrt(we) = dwe / (2 sqrt(we)); written as 0.5*dwe/se with the
    // convention that a fully inactive edge (we underflowed to 0) contributes 0
    // because dwe underflows faster (dwe = we(1-we)/eps -> sqrt(we)*(1-we)/eps).
    Eigen::VectorXd dse;
    if (derivative) {
        dse.resize(m);
        for (int e = 0; e < m; ++e) {
            dse[e] = se[e] > 0.0 ? 0.5 * dwe[e] / se[e] : 0.0;
        }
    }
    for (int v = 0; v < n; ++v) {
        const auto& inc = incident[v];
        for (std::size_t a = 0; a < inc.size(); ++a) {
            for (std::size_t b = 0; b < inc.size(); ++b) {
                const int ea = inc[a], eb = inc[b];
                const double sgn = b1sign(v, ea) * b1sign(v, eb);
                if (!derivative) {
                    L(ea, eb) += sgn * se[ea] * se[eb];
                } else {
                    L(ea, eb) += sgn * (dse[ea] * se[eb] + se[ea] * dse[eb]);
                }
            }
        }
    }

    // Up part: (d2 d2^T)_{ee'} = sum_t wt_t * s_e s_e' sqrt(we) sqrt(we') over
    // triangles containing both edges, with the (+1,-1,+1) boundary signs.
    static constexpr double kSign[3] = {1.0, -1.0, 1.0};
    for (int t = 0; t < m2; ++t) {
        const auto& te = amb.triangle_edges[t];
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                const int ea = te[a], eb = te[b];
                const double sgn = kSign[a] * kSign[b];
                if (!derivative) {
                    L(ea, eb) += sgn * wt[t] * se[ea] * se[eb];
                } else {
                    L(ea, eb) += sgn * (dwt[t] * se[ea] * se[eb] +
                                        wt[t] * (dse[ea] * se[eb] + se[ea] * dse[eb]));
                }
            }
        }
    }

    // Penalty mu(I - W1).
    for (int e = 0; e < m; ++e) {
        if (!derivative) {
            L(e, e) += mu * (1.0 - we[e]);
        } else {
            L(e, e) += -mu * dwe[e];
        }
    }
    return L;
}

}  // namespace detail

inline HodgeOperator smooth_hodge(const FiltrationFrame& thresh,
                                  const AmbientChainSpace& amb, double d,
                                  double epsilon, double mu) {
    if (!(epsilon > 0.0))
        throw InvalidInputError("smooth_hodge: epsilon must be > 0");
    if (!(mu > 0.0)) throw InvalidInputError("smooth_hodge: mu must be > 0");
    const WeightVector w = activation_weights(thresh, amb, d, epsilon);
    HodgeOperator op;
    op.kind = HodgeKind::Smooth;
    op.epsilon = epsilon;
    op.mu = mu;
    op.matrix = detail::assemble_smooth(amb, w.w_edges, w.w_triangles, mu, false);
    symmetrize(op.matrix);
    return op;
}

/// Analytic d/dd of the smooth operator, assembled from drho/ds.
inline Eigen::MatrixXd smooth_hodge_derivative_d(const FiltrationFrame& thresh,
                                                 const AmbientChainSpace& amb, double d,
                                                 double epsilon, double mu) {
    if (!(epsilon > 0.0))
        throw InvalidInputError("smooth_hodge_derivative_d: epsilon must be > 0");
    const WeightVector w = activation_weights(thresh, amb, d, epsilon);
    Eigen::VectorXd dwe(amb.edge_dim()), dwt(amb.triangle_dim());
    for (int e = 0; e < amb.edge_dim(); ++e)
        dwe[e] = w.w_edges[e] * (1.0 - w.w_edges[e]) / epsilon;
    for (int t = 0; t < amb.triangle_dim(); ++t)
        dwt[t] = w.w_triangles[t] * (1.0 - w.w_triangles[t]) / epsilon;
    Eigen::MatrixXd dL =
        detail::assemble_smooth(amb, w.w_edges, w.w_triangles, mu, true, dwe, dwt);
    symmetrize(dL);
    return dL;
}

/// Spectral norm of L - Ltilde (largest singular value; the matrices are
/// symmetric so this is the largest absolute eigenvalue).
inline double perturb_operator(const HodgeOperator& l, const HodgeOperator& lt) {
    if (l.matrix.rows() != lt.matrix.rows() || l.matrix.cols() != lt.matrix.cols()) {
        throw InvalidInputError("perturb_operator: shape mismatch");
    }
    const Eigen::MatrixXd diff = l.matrix - lt.matrix;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

/// Default transition width: 1e-3 of the median pairwise distance.
inline double default_epsilon(const PointCloudFrame& frame) {
    const double med = median_pairwise_distance(frame);
    return 1e-3 * (med > 0.0 ? med : 1.0);
}

inline constexpr double kDefaultMu = 1.0;

}  // namespace hodge_transport
