#pragma once

#include <optional>
#include <vector>

#include "hodge_transport/chains.hpp"
#include "hodge_transport/datasets.hpp"
#include "hodge_transport/laplacian.hpp"
#include "hodge_transport/persistence.hpp"
#include "hodge_transport/spectral.hpp"
#include "hodge_transport/transport.hpp"
#include "hodge_transport/util.hpp"

namespace hodge_transport {

// ---------------------------------------------------------------------------
// Frame grids over (d, t): per-time persistence diagrams, per-point Hodge
// operators, regular-region certification, and persistence-selected frames.
// A grid point is certified regular when its kernel dimension matches every
// existing 4-neighbor and its spectral gap is at least gamma_min; frames are
// kept only at regular points, mirroring the exclusion of the singular set.
// ---------------------------------------------------------------------------

struct FrameGridConfig {
    int n_d = 30;
    double d_min = 0.55;
    double d_max = 1.4;
    int k = 2;             // selected rank; 0 selects the full kernel
    double zero_tol = 0.0;  // 0 -> per-operator default
    double gamma_min = 1e-4;
    bool smooth = false;  // extended operator by default (Appendix-C path)
    double epsilon = 1e-3;
    double mu = kDefaultMu;
    int threads = 1;
};

struct FrameGrid {
    int nd = 0, nt = 0;
    double delta_d = 0.0, delta_t = 0.0;
    std::vector<double> d_values;
    std::vector<double> t_values;
    std::vector<PersistenceDiagram> diagrams;        // per time
    std::vector<int> zero_dim;                       // nd x nt
    std::vector<double> gap;                         // nd x nt
    std::vector<char> regular;                       // nd x nt
    std::vector<std::optional<ZeroModeFrame>> frames;  // nd x nt

    int index(int i, int j) const { return i * nt + j; }
    const std::optional<ZeroModeFrame>& frame(int i, int j) const {
        return frames[index(i, j)];
    }
};

inline FrameGrid build_frame_grid(const PointCloudSeries& series,
                                  const AmbientChainSpace& amb,
                                  const FrameGridConfig& cfg) {
    series.validate();
    if (cfg.n_d < 2) throw InvalidConfigError("build_frame_grid: n_d must be >= 2");
    if (!(cfg.d_min < cfg.d_max))
        throw InvalidConfigError("build_frame_grid: need d_min < d_max");

    FrameGrid grid;
    grid.nd = cfg.n_d;
    grid.nt = static_cast<int>(series.frames.size());
    grid.delta_d = (cfg.d_max - cfg.d_min) / (cfg.n_d - 1);
    grid.delta_t = grid.nt > 1
                       ? (series.frames.back().time - series.frames.front().time) /
                             (grid.nt - 1)
                       : 1.0;
    grid.d_values.resize(grid.nd);
    for (int i = 0; i < grid.nd; ++i) grid.d_values[i] = cfg.d_min + i * grid.delta_d;
    grid.t_values.resize(grid.nt);
    for (int j = 0; j < grid.nt; ++j) grid.t_values[j] = series.frames[j].time;

    std::vector<FiltrationFrame> thresholds(grid.nt);
    grid.diagrams.resize(grid.nt);
    parallel_for(grid.nt, cfg.threads, [&](int j) {
        thresholds[j] = compute_thresholds(series.frames[j], amb, j);
        grid.diagrams[j] = compute_h1_persistence(thresholds[j], amb);
    });

    const int total = grid.nd * grid.nt;
    grid.zero_dim.assign(total, -1);
    grid.gap.assign(total, 0.0);
    grid.regular.assign(total, 0);
    grid.frames.assign(total, std::nullopt);

    // Pass 1: spectra and candidate frames.
    std::vector<std::optional<ZeroModeFrame>> candidates(total);
    parallel_for(total, cfg.threads, [&](int idx) {
        const int i = idx / grid.nt;
        const int j = idx % grid.nt;
        const double d = grid.d_values[i];
        HodgeOperator op =
            cfg.smooth ? smooth_hodge(thresholds[j], amb, d, cfg.epsilon, cfg.mu)
                       : extended_hodge(boundary_at_scale(thresholds[j], amb, d));
        ZeroModes zm;
        try {
            zm = zero_modes(op, cfg.zero_tol);
        } catch (const GapFailureError&) {
            return;  // left uncertified
        }
        grid.zero_dim[idx] = zm.summary.zero_dim;
        grid.gap[idx] = zm.summary.gap;
        if (cfg.k <= 0) {
            ZeroModeFrame f;
            f.grid_i = i;
            f.grid_j = j;
            f.selection = FrameSelection::FullKernel;
            f.psi = std::move(zm.basis);
            candidates[idx] = std::move(f);
        } else {
            try {
                ZeroModeFrame f = selected_frame(op, grid.diagrams[j], d, cfg.k,
                                                 cfg.zero_tol);
                f.grid_i = i;
                f.grid_j = j;
                candidates[idx] = std::move(f);
            } catch (const Error&) {
                // rank deficit / degenerate selection: point stays masked
            }
        }
    });

    // Pass 2: regular-region certification against existing 4-neighbors.
    for (int i = 0; i < grid.nd; ++i) {
        for (int j = 0; j < grid.nt; ++j) {
            const int idx = grid.index(i, j);
            if (grid.zero_dim[idx] < 0 || grid.gap[idx] < cfg.gamma_min) continue;
            bool ok = true;
            const int di[4] = {-1, 1, 0, 0};
            const int dj[4] = {0, 0, -1, 1};
            for (int s = 0; s < 4 && ok; ++s) {
                const int ni = i + di[s], nj = j + dj[s];
                if (ni < 0 || ni >= grid.nd || nj < 0 || nj >= grid.nt) continue;
                ok = grid.zero_dim[grid.index(ni, nj)] == grid.zero_dim[idx];
            }
            if (ok) {
                grid.regular[idx] = 1;
                if (candidates[idx]) grid.frames[idx] = std::move(candidates[idx]);
            }
        }
    }
    return grid;
}

/// Curvature of the grid's frames (masked outside regular 5-point stencils).
inline CurvatureField grid_curvature(const FrameGrid& grid) {
    return curvature_grid(grid.frames, grid.nd, grid.nt, grid.delta_d, grid.delta_t);
}

/// Frames along the time column nearest to scale d_star (throws on gaps).
inline std::vector<ZeroModeFrame> column_frames(const FrameGrid& grid, double d_star,
                                                int* column_index = nullptr) {
    int best = 0;
    double bestdist = kInfinity;
    for (int i = 0; i < grid.nd; ++i) {
        const double dist = std::abs(grid.d_values[i] - d_star);
        if (dist < bestdist) {
            bestdist = dist;
            best = i;
        }
    }
    if (column_index) *column_index = best;
    std::vector<ZeroModeFrame> out;
    out.reserve(grid.nt);
    for (int j = 0; j < grid.nt; ++j) {
        const auto& f = grid.frame(best, j);
        if (!f) {
            throw RankDeficitError("column_frames: masked grid point at column d=" +
                                       std::to_string(grid.d_values[best]) +
                                       ", time index " + std::to_string(j),
                                   0, 0);
        }
        out.push_back(*f);
    }
    return out;
}

}  // namespace hodge_transport
