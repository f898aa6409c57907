#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <vector>

#include "hodge_transport/chains.hpp"
#include "hodge_transport/common.hpp"

namespace hodge_transport {

// ---------------------------------------------------------------------------
// H1 Vietoris-Rips persistence with representative cycles, by standard column
// reduction over GF(2). Simplices are ordered by (threshold, dimension,
// lexicographic index); the dimension tiebreak keeps every face ahead of its
// cofaces (a triangle threshold equals its longest edge). Cycles are lifted to
// signed real vectors afterwards so that B1 * c = 0 holds in integers.
// ---------------------------------------------------------------------------

struct PersistencePoint {
    double birth = 0.0;
    double death = kInfinity;
    Eigen::VectorXd rep_cycle;  // length m, entries in {-1, 0, +1}

    double lifetime() const { return death - birth; }
    bool finite() const { return std::isfinite(death); }
};

struct PersistenceDiagram {
    int time_index = 0;
    std::vector<PersistencePoint> points;  // descending lifetime, birth tiebreak
};

namespace detail {

class Bitset {
public:
    explicit Bitset(int bits = 0) : words_((bits + 63) / 64, 0) {}
    void set(int i) { words_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }
    void xor_with(const Bitset& o) {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    }
    int highest() const {
        for (int w = static_cast<int>(words_.size()) - 1; w >= 0; --w) {
            if (words_[w]) return (w << 6) + 63 - __builtin_clzll(words_[w]);
        }
        return -1;
    }
    template <typename Fn>
    void for_each(Fn fn) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t x = words_[w];
            while (x) {
                const int b = __builtin_ctzll(x);
                fn(static_cast<int>((w << 6) + b));
                x &= x - 1;
            }
        }
    }

private:
    std::vector<std::uint64_t> words_;
};

/// Signed lift of a GF(2) cycle (even-degree edge subgraph): decompose into
/// edge-disjoint closed walks and sign each edge by traversal vs the i<j
/// orientation. Deterministic: walks start at the smallest open vertex and
/// always take the smallest unused incident edge.
inline Eigen::VectorXd signed_cycle_lift(const std::vector<int>& support,
                                         const AmbientChainSpace& amb) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(amb.edge_dim());
    std::map<int, std::vector<int>> incident;  // vertex -> edge ids (sorted)
    for (int e : support) {
        incident[amb.edges[e][0]].push_back(e);
        incident[amb.edges[e][1]].push_back(e);
    }
    for (auto& [v, list] : incident) std::sort(list.begin(), list.end());
    std::vector<char> used(amb.edge_dim(), 0);

    for (auto& [start, list0] : incident) {
        (void)list0;
        while (true) {
            // Find an unused edge at `start`.
            int first = -1;
            for (int e : incident[start]) {
                if (!used[e]) {
                    first = e;
                    break;
                }
            }
            if (first < 0) break;
            // Walk until we return to `start`; even degrees guarantee closure.
            int v = start;
            while (true) {
                int next_edge = -1;
                for (int e : incident[v]) {
                    if (!used[e]) {
                        next_edge = e;
                        break;
                    }
                }
                if (next_edge < 0) break;  // closed walk consumed
                used[next_edge] = 1;
                const int a = amb.edges[next_edge][0];
                const int b = amb.edges[next_edge][1];
                if (v == a) {
                    c[next_edge] += 1.0;  // traversed along orientation a->b
                    v = b;
                } else {
                    c[next_edge] -= 1.0;
                    v = a;
                }
                if (v == start) break;
            }
        }
    }
    return c;
}

}  // namespace detail

inline PersistenceDiagram compute_h1_persistence(const FiltrationFrame& thresh,
                                                 const AmbientChainSpace& amb) {
    const int n = amb.vertex_count;
    const int m = amb.edge_dim();
    const int m2 = amb.triangle_dim();

    // Filtration order of edges: (threshold, lex index). Vertices all enter at
    // 0 before every edge; triangles follow their edges by the dim tiebreak.
    std::vector<int> edge_order(m);
    std::iota(edge_order.begin(), edge_order.end(), 0);
    std::sort(edge_order.begin(), edge_order.end(), [&](int a, int b) {
        if (thresh.edge_thresholds[a] != thresh.edge_thresholds[b])
            return thresh.edge_thresholds[a] < thresh.edge_thresholds[b];
        return a < b;
    });
    std::vector<int> edge_pos(m);
    for (int p = 0; p < m; ++p) edge_pos[edge_order[p]] = p;

    std::vector<int> tri_order(m2);
    std::iota(tri_order.begin(), tri_order.end(), 0);
    std::sort(tri_order.begin(), tri_order.end(), [&](int a, int b) {
        if (thresh.triangle_thresholds[a] != thresh.triangle_thresholds[b])
            return thresh.triangle_thresholds[a] < thresh.triangle_thresholds[b];
        return a < b;
    });

    // --- Dimension-1 pass: reduce edge boundaries over vertex rows, keeping
    // the chain-of-edges V column so positive edges come with their cycle.
    std::vector<int> vertex_pivot_owner(n, -1);        // vertex -> edge pos
    std::vector<std::array<int, 2>> reduced_bnd(m);    // by edge pos, sorted desc
    std::vector<detail::Bitset> vcol(m);               // by edge pos, over edge pos
    std::vector<char> edge_positive(m, 0);             // by edge pos
    for (int p = 0; p < m; ++p) {
        const int e = edge_order[p];
        int lo = amb.edges[e][0], hi = amb.edges[e][1];
        detail::Bitset v(m);
        v.set(p);
        // Boundary over GF(2) is the vertex pair; adding a column with equal
        // high vertex replaces {hi, lo} by the symmetric difference, which for
        // 0/2-element sets stays a 0/2-element set.
        std::array<int, 2> bnd{std::max(lo, hi), std::min(lo, hi)};
        while (bnd[0] >= 0 && vertex_pivot_owner[bnd[0]] >= 0) {
            const int owner = vertex_pivot_owner[bnd[0]];
            const auto& ob = reduced_bnd[owner];
            // XOR {bnd} with {ob}: highs equal and cancel.
            int x = bnd[1], y = ob[1];
            if (x == y) {
                bnd = {-1, -1};  // empty
            } else {
                bnd = {std::max(x, y), std::min(x, y)};
            }
            v.xor_with(vcol[owner]);
        }
        if (bnd[0] < 0) {
            edge_positive[p] = 1;  // creates a 1-cycle; v holds it
        } else {
            vertex_pivot_owner[bnd[0]] = p;
            reduced_bnd[p] = bnd;
        }
        vcol[p] = std::move(v);
    }

    // --- Dimension-2 pass: reduce triangle boundaries over edge-position rows.
    std::vector<int> edge_pivot_owner(m, -1);  // edge pos -> triangle order idx
    std::vector<detail::Bitset> tcol(m2, detail::Bitset(0));
    struct Pair {
        int birth_edge;  // ambient edge id
        int death_tri;   // ambient triangle id
    };
    std::vector<Pair> pairs;
    std::vector<char> edge_paired(m, 0);  // by edge pos
    for (int q = 0; q < m2; ++q) {
        const int t = tri_order[q];
        detail::Bitset col(m);
        for (int e : amb.triangle_edges[t]) col.set(edge_pos[e]);
        int low = col.highest();
        while (low >= 0 && edge_pivot_owner[low] >= 0) {
            col.xor_with(tcol[edge_pivot_owner[low]]);
            low = col.highest();
        }
        if (low >= 0) {
            edge_pivot_owner[low] = q;
            tcol[q] = std::move(col);
            edge_paired[low] = 1;
            pairs.push_back({edge_order[low], t});
        }
        // Columns reducing to zero create 2-cycles; irrelevant in degree 1.
    }

    // --- Emit intervals with signed representatives.
    PersistenceDiagram diag;
    diag.time_index = thresh.time_index;
    auto make_point = [&](int edge_pos_born, double death) {
        PersistencePoint pt;
        pt.birth = thresh.edge_thresholds[edge_order[edge_pos_born]];
        pt.death = death;
        std::vector<int> support;
        vcol[edge_pos_born].for_each(
            [&](int p) { support.push_back(edge_order[p]); });
        pt.rep_cycle = detail::signed_cycle_lift(support, amb);
        return pt;
    };
    for (const auto& pr : pairs) {
        diag.points.push_back(make_point(edge_pos[pr.birth_edge],
                                         thresh.triangle_thresholds[pr.death_tri]));
    }
    for (int p = 0; p < m; ++p) {
        if (edge_positive[p] && !edge_paired[p])
            diag.points.push_back(make_point(p, kInfinity));
    }
    std::stable_sort(diag.points.begin(), diag.points.end(),
                     [](const PersistencePoint& a, const PersistencePoint& b) {
                         if (a.lifetime() != b.lifetime())
                             return a.lifetime() > b.lifetime();
                         return a.birth < b.birth;
                     });
    return diag;
}

// ---------------------------------------------------------------------------
// Feature selection.
// ---------------------------------------------------------------------------

/// The k longest-lived intervals alive at scale d (birth <= d < death),
/// descending lifetime; fewer than k may be returned.
inline std::vector<const PersistencePoint*> select_dominant_alive(
    const PersistenceDiagram& diagram, double d, int k) {
    if (k < 1) throw InvalidInputError("select_dominant_alive: k must be >= 1");
    std::vector<const PersistencePoint*> alive;
    for (const auto& pt : diagram.points) {
        if (pt.birth <= d && d < pt.death) alive.push_back(&pt);
    }
    // Diagram order is already descending lifetime with birth tiebreak.
    if (static_cast<int>(alive.size()) > k) alive.resize(k);
    return alive;
}

/// The two largest-lifetime finite points as (birth, death) pairs; ties by
/// smaller birth first.
inline std::array<Eigen::Vector2d, 2> top2_points(const PersistenceDiagram& diagram) {
    std::vector<const PersistencePoint*> finite;
    for (const auto& pt : diagram.points) {
        if (pt.finite()) finite.push_back(&pt);
    }
    if (finite.size() < 2) {
        throw ShortDiagramError("top2_points: fewer than 2 finite points at time index " +
                                    std::to_string(diagram.time_index),
                                diagram.time_index);
    }
    return {Eigen::Vector2d(finite[0]->birth, finite[0]->death),
            Eigen::Vector2d(finite[1]->birth, finite[1]->death)};
}

}  // namespace hodge_transport
