#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "hodge_transport/common.hpp"
#include "hodge_transport/persistence.hpp"

namespace hodge_transport {

// ---------------------------------------------------------------------------
// Vineyard-style successive matching of the top-2 persistence points.
// Costs are squared Euclidean distances in the (birth, death) plane; only the
// identity and swap assignments exist for two points.
// ---------------------------------------------------------------------------

struct TrackState {
    std::vector<std::array<Eigen::Vector2d, 2>> labeled;  // per time
    std::vector<char> swap_flags;                         // per step (n_t - 1)
    std::vector<double> margins;                          // per step
    std::vector<double> separations;                      // per time

    int swap_count() const {
        int c = 0;
        for (char s : swap_flags) c += (s != 0);
        return c;
    }
};

inline TrackState successive_match(const std::vector<PersistenceDiagram>& diagrams) {
    if (diagrams.empty()) throw InvalidInputError("successive_match: no diagrams");
    TrackState st;
    st.labeled.reserve(diagrams.size());
    st.separations.reserve(diagrams.size());

    auto top2 = [&](std::size_t j) {
        try {
            return top2_points(diagrams[j]);
        } catch (const ShortDiagramError&) {
            throw ShortDiagramError(
                "successive_match: diagram at time index " + std::to_string(j) +
                    " has fewer than 2 finite points",
                static_cast<int>(j));
        }
    };

    std::array<Eigen::Vector2d, 2> tracked = top2(0);
    st.labeled.push_back(tracked);
    st.separations.push_back((tracked[0] - tracked[1]).norm());
    for (std::size_t j = 1; j < diagrams.size(); ++j) {
        const auto cand = top2(j);
        const double c_id = (tracked[0] - cand[0]).squaredNorm() +
                            (tracked[1] - cand[1]).squaredNorm();
        const double c_swap = (tracked[0] - cand[1]).squaredNorm() +
                              (tracked[1] - cand[0]).squaredNorm();
        const bool swap = c_swap < c_id;  // strict: ties keep identity
        st.swap_flags.push_back(swap ? 1 : 0);
        st.margins.push_back(std::abs(c_id - c_swap));
        tracked = swap ? std::array<Eigen::Vector2d, 2>{cand[1], cand[0]} : cand;
        st.labeled.push_back(tracked);
        st.separations.push_back((cand[0] - cand[1]).norm());
    }
    return st;
}

// ---------------------------------------------------------------------------
// Holonomy-guided relabeling: the one-step transport decides per step whether
// the labels follow the identity or the swap, via
// swap-likeness = (|Q12|+|Q21|) - (|Q11|+|Q22|).
// ---------------------------------------------------------------------------

struct HolonomyGuidedResult {
    std::vector<std::array<Eigen::Vector2d, 2>> relabeled;  // p-hat per time
    std::vector<double> swap_likeness;                      // per step
    std::vector<char> swap_steps;                           // per step
    double track_error = 0.0;  // vs successive matching, Appendix-C formula
};

inline double swap_likeness(const Eigen::MatrixXd& q) {
    return (std::abs(q(0, 1)) + std::abs(q(1, 0))) -
           (std::abs(q(0, 0)) + std::abs(q(1, 1)));
}

inline HolonomyGuidedResult holonomy_guided_match(
    const std::vector<PersistenceDiagram>& diagrams,
    const std::vector<Eigen::MatrixXd>& steps) {
    if (diagrams.size() < 2)
        throw InvalidInputError("holonomy_guided_match: need at least 2 diagrams");
    if (steps.size() < diagrams.size() - 1)
        throw InvalidInputError("holonomy_guided_match: steps/diagrams misaligned");
    for (const auto& q : steps) {
        if (q.rows() != 2 || q.cols() != 2)
            throw UnsupportedRankError("holonomy_guided_match: requires rank 2",
                                       static_cast<int>(q.rows()));
    }

    HolonomyGuidedResult res;
    res.relabeled.reserve(diagrams.size());
    res.relabeled.push_back(top2_points(diagrams[0]));
    bool swapped = false;  // cumulative permutation state
    for (std::size_t j = 0; j + 1 < diagrams.size(); ++j) {
        const double sl = swap_likeness(steps[j]);
        res.swap_likeness.push_back(sl);
        const bool step_swaps = sl > 0.0;
        res.swap_steps.push_back(step_swaps ? 1 : 0);
        if (step_swaps) swapped = !swapped;
        const auto cand = top2_points(diagrams[j + 1]);
        res.relabeled.push_back(
            swapped ? std::array<Eigen::Vector2d, 2>{cand[1], cand[0]} : cand);
    }

    const TrackState base = successive_match(diagrams);
    double acc = 0.0;
    for (std::size_t j = 0; j < diagrams.size(); ++j) {
        const double sq = (base.labeled[j][0] - res.relabeled[j][0]).squaredNorm() +
                          (base.labeled[j][1] - res.relabeled[j][1]).squaredNorm();
        acc += std::sqrt(sq);
    }
    res.track_error = acc / static_cast<double>(diagrams.size());
    return res;
}

// ---------------------------------------------------------------------------
// PD drift: per-time minimum average matching distance between the top-2
// points of two diagram series (plain distances, not squared).
// ---------------------------------------------------------------------------

struct DriftSeries {
    std::vector<double> per_time;
    double mean = 0.0;
};

inline DriftSeries pd_drift(const std::vector<PersistenceDiagram>& baseline,
                            const std::vector<PersistenceDiagram>& noisy) {
    if (baseline.size() != noisy.size())
        throw InvalidInputError("pd_drift: series lengths differ");
    if (baseline.empty()) throw InvalidInputError("pd_drift: empty series");
    DriftSeries out;
    out.per_time.reserve(baseline.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < baseline.size(); ++j) {
        const auto p = top2_points(baseline[j]);
        const auto q = top2_points(noisy[j]);
        const double keep = (p[0] - q[0]).norm() + (p[1] - q[1]).norm();
        const double swap = (p[0] - q[1]).norm() + (p[1] - q[0]).norm();
        const double drift = 0.5 * std::min(keep, swap);
        out.per_time.push_back(drift);
        acc += drift;
    }
    out.mean = acc / static_cast<double>(baseline.size());
    return out;
}

}  // namespace hodge_transport
