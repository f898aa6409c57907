#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <vector>

#include "hodge_transport/common.hpp"

namespace hodge_transport {

// ---------------------------------------------------------------------------
// Ambient chain space: the maximal complex on a fixed vertex set, truncated at
// dimension 2. Edge/triangle bases are enumerated once in lexicographic order
// and every parameter-dependent object lives in these fixed coordinates.
//
// Orientation convention: edge (i,j), i<j, is oriented i->j; triangle (i,j,k),
// i<j<k, has boundary (j,k) - (i,k) + (i,j).
// ---------------------------------------------------------------------------

struct AmbientChainSpace {
    int vertex_count = 0;
    std::vector<std::array<int, 2>> edges;      // all pairs i<j, lex order
    std::vector<std::array<int, 3>> triangles;  // all triples i<j<k, lex order
    // triangle t -> indices of its edges ((j,k), (i,k), (i,j)), matching the
    // boundary signs (+1, -1, +1).
    std::vector<std::array<int, 3>> triangle_edges;

    int edge_dim() const { return static_cast<int>(edges.size()); }
    int triangle_dim() const { return static_cast<int>(triangles.size()); }

    /// Lexicographic index of edge (i,j), i<j.
    int edge_index(int i, int j) const {
        const long n = vertex_count;
        return static_cast<int>(i * n - (static_cast<long>(i) * (i + 1)) / 2 + (j - i - 1));
    }
};

inline AmbientChainSpace build_ambient(int n) {
    if (n < 3) {
        throw InvalidInputError("build_ambient: vertex count must be >= 3, got " +
                                std::to_string(n));
    }
    AmbientChainSpace amb;
    amb.vertex_count = n;
    amb.edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) amb.edges.push_back({i, j});
    amb.triangles.reserve(static_cast<std::size_t>(n) * (n - 1) * (n - 2) / 6);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) amb.triangles.push_back({i, j, k});
    amb.triangle_edges.reserve(amb.triangles.size());
    for (const auto& t : amb.triangles) {
        amb.triangle_edges.push_back({amb.edge_index(t[1], t[2]),
                                      amb.edge_index(t[0], t[2]),
                                      amb.edge_index(t[0], t[1])});
    }
    return amb;
}

// ---------------------------------------------------------------------------
// Time-evolving point clouds.
// ---------------------------------------------------------------------------

struct PointCloudFrame {
    double time = 0.0;
    std::vector<Eigen::Vector2d> points;
};

struct PointCloudSeries {
    std::vector<PointCloudFrame> frames;

    int point_count() const {
        return frames.empty() ? 0 : static_cast<int>(frames.front().points.size());
    }

    void validate() const {
        if (frames.empty()) throw InvalidInputError("PointCloudSeries: no frames");
        const std::size_t n = frames.front().points.size();
        if (n < 3) throw InvalidInputError("PointCloudSeries: need at least 3 points per frame");
        double prev = -kInfinity;
        for (const auto& f : frames) {
            if (f.points.size() != n)
                throw InvalidInputError("PointCloudSeries: frames disagree on point count");
            if (!(f.time > prev))
                throw InvalidInputError("PointCloudSeries: times must be strictly increasing");
            prev = f.time;
        }
    }
};

inline double median_pairwise_distance(const PointCloudFrame& frame) {
    std::vector<double> d;
    const auto& p = frame.points;
    d.reserve(p.size() * (p.size() - 1) / 2);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) d.push_back((p[i] - p[j]).norm());
    if (d.empty()) return 0.0;
    std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
    return d[d.size() / 2];
}

// ---------------------------------------------------------------------------
// Filtration thresholds: r_sigma = diameter of the simplex at this frame.
// ---------------------------------------------------------------------------

struct FiltrationFrame {
    int time_index = 0;
    Eigen::VectorXd edge_thresholds;      // length m
    Eigen::VectorXd triangle_thresholds;  // length m2
};

inline FiltrationFrame compute_thresholds(const PointCloudFrame& frame,
                                          const AmbientChainSpace& amb,
                                          int time_index = 0) {
    if (static_cast<int>(frame.points.size()) != amb.vertex_count) {
        throw InvalidInputError("compute_thresholds: frame has " +
                                std::to_string(frame.points.size()) + " points, ambient expects " +
                                std::to_string(amb.vertex_count));
    }
    FiltrationFrame out;
    out.time_index = time_index;
    out.edge_thresholds.resize(amb.edge_dim());
    for (int e = 0; e < amb.edge_dim(); ++e) {
        const auto& [i, j] = amb.edges[e];
        out.edge_thresholds[e] = (frame.points[i] - frame.points[j]).norm();
    }
    out.triangle_thresholds.resize(amb.triangle_dim());
    for (int t = 0; t < amb.triangle_dim(); ++t) {
        const auto& te = amb.triangle_edges[t];
        out.triangle_thresholds[t] = std::max({out.edge_thresholds[te[0]],
                                               out.edge_thresholds[te[1]],
                                               out.edge_thresholds[te[2]]});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Boundary matrices of the active Vietoris-Rips complex, embedded in the
// ambient basis (zero columns for inactive simplices). A simplex with
// r_sigma == d is active (closed filtration).
// ---------------------------------------------------------------------------

struct BoundaryMatrices {
    Eigen::MatrixXd b1;  // vertex_count x m
    Eigen::MatrixXd b2;  // m x m2
    std::vector<char> active_edges;
    std::vector<char> active_triangles;

    int active_edge_count() const {
        int c = 0;
        for (char a : active_edges) c += (a != 0);
        return c;
    }
    int active_triangle_count() const {
        int c = 0;
        for (char a : active_triangles) c += (a != 0);
        return c;
    }
};

inline BoundaryMatrices boundary_at_scale(const FiltrationFrame& thresh,
                                          const AmbientChainSpace& amb, double d) {
    if (!(d >= 0.0)) {
        throw InvalidInputError("boundary_at_scale: scale must be >= 0, got " +
                                std::to_string(d));
    }
    const int m = amb.edge_dim();
    const int m2 = amb.triangle_dim();
    BoundaryMatrices out;
    out.b1 = Eigen::MatrixXd::Zero(amb.vertex_count, m);
    out.b2 = Eigen::MatrixXd::Zero(m, m2);
    out.active_edges.assign(m, 0);
    out.active_triangles.assign(m2, 0);
    for (int e = 0; e < m; ++e) {
        if (thresh.edge_thresholds[e] <= d) {
            out.active_edges[e] = 1;
            const auto& [i, j] = amb.edges[e];
            out.b1(i, e) = -1.0;
            out.b1(j, e) = 1.0;
        }
    }
    for (int t = 0; t < m2; ++t) {
        if (thresh.triangle_thresholds[t] <= d) {
            out.active_triangles[t] = 1;
            const auto& te = amb.triangle_edges[t];
            out.b2(te[0], t) = 1.0;   // (j,k)
            out.b2(te[1], t) = -1.0;  // (i,k)
            out.b2(te[2], t) = 1.0;   // (i,j)
        }
    }
    return out;
}

/// Boundary matrices of the full maximal complex (every simplex active).
inline BoundaryMatrices full_boundaries(const AmbientChainSpace& amb) {
    FiltrationFrame zero;
    zero.edge_thresholds = Eigen::VectorXd::Zero(amb.edge_dim());
    zero.triangle_thresholds = Eigen::VectorXd::Zero(amb.triangle_dim());
    return boundary_at_scale(zero, amb, 0.0);
}

}  // namespace hodge_transport
