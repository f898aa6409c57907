#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "hodge_transport/chains.hpp"
#include "hodge_transport/common.hpp"
#include "hodge_transport/transport.hpp"

namespace hodge_transport {

// ---------------------------------------------------------------------------
// Deterministic synthetic generators for the five experiments. All series
// sample t_j = j * T / (n_times - 1), so the final frame reproduces the first
// (point-wise for the dumbbell/size-only systems; as a point set for the
// role-exchanging double circles).
// ---------------------------------------------------------------------------

enum class GeneratorName {
    DoubleCirclesApproach,
    SizeOnlyControl,
    DumbbellDeform,
    DumbbellRotate,
    VineyardLike,
};

struct GeneratorConfig {
    GeneratorName name = GeneratorName::DoubleCirclesApproach;
    int n_points_per_feature = 12;
    int n_points_second = 16;  // double circles: second ring point count
    int n_times = 40;
    double period = 1.0;
    std::uint64_t seed = 1;

    // Shape parameters (per generator; unused ones ignored).
    double radius = 1.0;              // double circles: mean radius
    double separation_max = 3.5;      // double circles: center distance at t=0
    double separation_min = 2.05;     // double circles: center distance at T/2
    double approach_sharpness = 6.0;  // double circles: exponent on the
                                      // approach profile (1 = plain cosine)
    double radius_ratio = 1.244;      // double circles: static r1/r2 ratio
    double size_contrast = 0.08;      // double circles: dip swing at T/2
    double dip_width_steps = 1.0;     // double circles: dip width in samples
    double jitter = 0.02;           // angular jitter, fraction of point spacing
    double scale_amplitude = 0.2;    // size-only control: c(t) = 1 + a sin(2 pi t/T)
    double outer_radius = 0.95;      // dumbbell: first outer circle
    double outer_radius_2 = 0.78;    // dumbbell: second outer circle
    double outer_separation = 6.1;   // dumbbell: outer center distance
    double mid_radius = 1.2;         // dumbbell: middle loop base radius
    double deform_amplitude = 0.12;  // dumbbell: size/aspect modulation amplitude
    double mid_sway = 0.85;          // dumbbell deform: center sway amplitude

    void validate() const {
        if (n_times < 8) throw InvalidConfigError("GeneratorConfig: n_times must be >= 8");
        if (n_points_per_feature < 4)
            throw InvalidConfigError("GeneratorConfig: need >= 4 points per feature");
        if (!(radius > 0.0) || !(mid_radius > 0.0) || !(outer_radius > 0.0) ||
            !(outer_radius_2 > 0.0))
            throw InvalidConfigError("GeneratorConfig: radii must be positive");
        if (!(period > 0.0)) throw InvalidConfigError("GeneratorConfig: period must be positive");
    }
};

namespace detail {

/// Frozen per-slot angular jitter, <= `frac` of the equiangular spacing.
inline std::vector<double> angular_jitter(int n, double frac, Rng& rng) {
    std::vector<double> jit(n);
    const double spacing = 2.0 * M_PI / n;
    for (int a = 0; a < n; ++a) jit[a] = rng.uniform(-frac, frac) * spacing;
    return jit;
}

inline void append_loop(PointCloudFrame& frame, const Eigen::Vector2d& center,
                        double rx, double ry, double phase,
                        const std::vector<double>& jit) {
    const int n = static_cast<int>(jit.size());
    for (int a = 0; a < n; ++a) {
        const double th = 2.0 * M_PI * a / n + jit[a] + phase;
        frame.points.emplace_back(center.x() + rx * std::cos(th),
                                  center.y() + ry * std::sin(th));
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Double circles approaching and separating on the x-axis: centers
// (+-s(t)/2, 0) with s(t) = smin + (smax - smin)(1 + cos(2 pi t/T))/2. The
// rings carry different point counts (n1-gon, n2-gon) and a static radius
// ratio balancing their lifetimes with a small margin; a smooth periodic dip
// w(t) = u(t)^p, u = (1 + cos(2 pi (t - T/2)/T))/2 (p derived from the sample
// spacing so the dip spans ~dip_width_steps samples) swings the radii by
// +-size_contrast/2 at T/2, flipping the top-2 lifetime ranks for exactly the
// dip-window samples at the closest approach.
// ---------------------------------------------------------------------------

inline PointCloudSeries gen_double_circles(const GeneratorConfig& cfg) {
    cfg.validate();
    if (!(cfg.separation_min > 0.0))
        throw InvalidConfigError("gen_double_circles: separation_min must be > 0");
    if (!(cfg.separation_max >= cfg.separation_min))
        throw InvalidConfigError("gen_double_circles: separation_max < separation_min");
    if (!(cfg.radius_ratio > 0.0))
        throw InvalidConfigError("gen_double_circles: radius_ratio must be > 0");
    // rho1 + rho2 = 2; the dip shrinks r1 and grows r2, so the radius sum
    // peaks at 2 + max(0, rho2 - rho1) * size_contrast / 2.
    const double rho1 = 2.0 * cfg.radius_ratio / (1.0 + cfg.radius_ratio);
    const double rho2 = 2.0 / (1.0 + cfg.radius_ratio);
    const double max_sum =
        2.0 + 0.5 * cfg.size_contrast * std::max(0.0, rho2 - rho1);
    if (cfg.separation_min <= cfg.radius * max_sum)
        throw InvalidConfigError("gen_double_circles: circles touch at closest approach");

    // Sharpness making the dip window span dip_width_steps samples.
    const double half_width = 0.5 * cfg.dip_width_steps / (cfg.n_times - 1);
    const double u_edge = std::cos(M_PI * half_width) * std::cos(M_PI * half_width);
    const double p = std::log(2.0) / -std::log(u_edge);

    Rng rng(cfg.seed);
    const int n2 = cfg.n_points_second > 0 ? cfg.n_points_second
                                           : cfg.n_points_per_feature;
    const auto jit1 = detail::angular_jitter(cfg.n_points_per_feature, cfg.jitter, rng);
    const auto jit2 = detail::angular_jitter(n2, cfg.jitter, rng);
    PointCloudSeries series;
    series.frames.reserve(cfg.n_times);
    for (int j = 0; j < cfg.n_times; ++j) {
        const double t = cfg.period * j / (cfg.n_times - 1);
        const double u =
            (1.0 + std::cos(2.0 * M_PI * (t - 0.5 * cfg.period) / cfg.period)) / 2.0;
        // approach profile: u^q interpolates the plain cosine (q = 1) toward
        // an approach concentrated at T/2 (larger q).
        const double s = cfg.separation_min +
                         (cfg.separation_max - cfg.separation_min) *
                             (1.0 - std::pow(u, cfg.approach_sharpness));
        const double w = std::pow(u, p);
        const double r1 = cfg.radius * rho1 * (1.0 - 0.5 * cfg.size_contrast * w);
        const double r2 = cfg.radius * rho2 * (1.0 + 0.5 * cfg.size_contrast * w);
        PointCloudFrame frame;
        frame.time = t;
        frame.points.reserve(cfg.n_points_per_feature + n2);
        detail::append_loop(frame, {-0.5 * s, 0.0}, r1, r1, 0.0, jit1);
        detail::append_loop(frame, {0.5 * s, 0.0}, r2, r2, 0.0, jit2);
        series.frames.push_back(std::move(frame));
    }
    return series;
}

/// Total point count of the double-circle system for a given config.
inline int double_circles_point_count(const GeneratorConfig& cfg) {
    return cfg.n_points_per_feature +
           (cfg.n_points_second > 0 ? cfg.n_points_second : cfg.n_points_per_feature);
}

// ---------------------------------------------------------------------------
// Size-only control: the t=0 double-circle frame rescaled by
// c(t) = 1 + a sin(2 pi t / T); point identities fixed over time.
// ---------------------------------------------------------------------------

inline PointCloudSeries gen_size_only(const GeneratorConfig& cfg) {
    cfg.validate();
    if (!(std::abs(cfg.scale_amplitude) < 0.3))
        throw InvalidConfigError("gen_size_only: |scale_amplitude| must be < 0.3");
    GeneratorConfig base = cfg;
    base.n_times = std::max(cfg.n_times, 8);
    const PointCloudSeries ref = gen_double_circles(base);
    const PointCloudFrame& frame0 = ref.frames.front();

    PointCloudSeries series;
    series.frames.reserve(cfg.n_times);
    for (int j = 0; j < cfg.n_times; ++j) {
        const double t = cfg.period * j / (cfg.n_times - 1);
        const double c = 1.0 + cfg.scale_amplitude * std::sin(2.0 * M_PI * t / cfg.period);
        PointCloudFrame frame;
        frame.time = t;
        frame.points.reserve(frame0.points.size());
        for (const auto& p : frame0.points) frame.points.push_back(c * p);
        series.frames.push_back(std::move(frame));
    }
    return series;
}

// ---------------------------------------------------------------------------
// Dumbbell systems: two fixed outer circles plus a middle loop.
//   deform: middle axes rx = r(1 + A cos(2 pi t/T)), ry = r(1 + A/2 cos(2 pi
//           t/T)) (size and aspect modulated together) with a center sway
//           (eps sin(2 pi t/T), 0). The middle's lifetime crosses the first
//           outer loop's at the quarter phases, where the sway is extremal:
//           at one crossing the loops nearly merge (adiabatic passage - the
//           harmonic features exchange), at the other they are far apart
//           (diabatic passage - no exchange). The net cycle holonomy is
//           swap-like, far from the identity.
//   rotate: the middle points slide along the fixed t=0 ellipse by phase
//           2 pi t / T.
// Both variants share the t=0 frame.
// ---------------------------------------------------------------------------

enum class DumbbellVariant { Deform, Rotate };

inline PointCloudSeries gen_dumbbell(const GeneratorConfig& cfg, DumbbellVariant variant) {
    cfg.validate();
    const double rx0 = cfg.mid_radius * (1.0 + cfg.deform_amplitude);
    const double ry0 = cfg.mid_radius * (1.0 + 0.5 * cfg.deform_amplitude);
    // Conservative reach bound over the whole cycle.
    const double reach = std::abs(cfg.mid_sway) + rx0;
    const double half = 0.5 * cfg.outer_separation;
    if (half - cfg.outer_radius_2 <= reach) {
        throw InvalidConfigError(
            "gen_dumbbell: middle loop overlaps the second outer circle");
    }
    // Toward the first outer circle the sway and the size swing are in
    // quadrature; the reach there is r(1 + sqrt(eps^2/r^2 + A^2)) at most.
    const double reach1 =
        cfg.mid_radius + std::sqrt(cfg.mid_sway * cfg.mid_sway +
                                   cfg.mid_radius * cfg.mid_radius *
                                       cfg.deform_amplitude * cfg.deform_amplitude);
    if (half - cfg.outer_radius <= reach1) {
        throw InvalidConfigError(
            "gen_dumbbell: middle loop overlaps the first outer circle");
    }

    Rng rng(cfg.seed);
    const int n = cfg.n_points_per_feature;
    const auto jit_left = detail::angular_jitter(n, cfg.jitter, rng);
    const auto jit_right = detail::angular_jitter(n, cfg.jitter, rng);
    const auto jit_mid = detail::angular_jitter(n, cfg.jitter, rng);

    PointCloudSeries series;
    series.frames.reserve(cfg.n_times);
    for (int j = 0; j < cfg.n_times; ++j) {
        const double t = cfg.period * j / (cfg.n_times - 1);
        const double w = 2.0 * M_PI * t / cfg.period;
        PointCloudFrame frame;
        frame.time = t;
        frame.points.reserve(3 * n);
        detail::append_loop(frame, {-half, 0.0}, cfg.outer_radius, cfg.outer_radius, 0.0,
                            jit_left);
        detail::append_loop(frame, {half, 0.0}, cfg.outer_radius_2, cfg.outer_radius_2,
                            0.0, jit_right);
        if (variant == DumbbellVariant::Deform) {
            const double rx = cfg.mid_radius * (1.0 + cfg.deform_amplitude * std::cos(w));
            const double ry =
                cfg.mid_radius * (1.0 + 0.5 * cfg.deform_amplitude * std::cos(w));
            detail::append_loop(frame, {-cfg.mid_sway * std::sin(w), 0.0}, rx, ry, 0.0,
                                jit_mid);
        } else {
            detail::append_loop(frame, {0.0, 0.0}, rx0, ry0, w, jit_mid);
        }
        series.frames.push_back(std::move(frame));
    }
    return series;
}

// ---------------------------------------------------------------------------
// Vineyard-like system: three non-elder vines tracing thirds of a common
// closed (birth, death) curve (so vine a at T continues vine a+1 mod 3), an
// elder vine, and a companion analytic frame family. The frames span the
// 3-plane orthogonal to a unit normal n(t) circling a cone of half-angle
// theta0 in a fixed R^4; with cos(theta0) = 2/3 the loop encloses solid angle
// 2 pi / 3, so the cycle holonomy is the order-3 cyclic rotation permuting
// the three feature directions: nearest permutation (1,2,0), -120 degrees on
// the quotient plane orthogonal to the invariant all-ones direction.
// ---------------------------------------------------------------------------

struct VineyardLikeData {
    std::vector<double> times;
    // vines[a][j] = (birth, death) of non-elder vine a at time j.
    std::array<std::vector<Eigen::Vector2d>, 3> vines;
    Eigen::Vector2d elder;
    std::vector<std::pair<int, int>> crossing_windows;  // [first, last] index pairs
    std::vector<ZeroModeFrame> frames;                  // 4 x 3 frames over t
    // Quotient-plane basis inside the 3-frame coefficient space (complement of
    // the normalized all-ones vector); fixed so (1,2,0) measures as -120 deg.
    Eigen::Matrix<double, 3, 2> quotient_basis;
};

inline VineyardLikeData gen_vineyard_like(const GeneratorConfig& cfg) {
    cfg.validate();
    VineyardLikeData data;
    const int nt = cfg.n_times;
    const double T = cfg.period;

    // Vines: thirds of the closed ellipse V(s) = (b0 + rb cos(2 pi s),
    // d0 + rd sin(2 pi s)) with vine a at parameter (t/T + a)/3. The strong
    // eccentricity makes the three vines bunch up twice per period, giving
    // visible crossing windows.
    const double b0 = 0.6, rb = 0.12;
    const double d0 = 2.2, rd = 0.5;
    data.elder = Eigen::Vector2d(0.15, 3.4);
    data.times.reserve(nt);
    for (int a = 0; a < 3; ++a) data.vines[a].reserve(nt);
    for (int j = 0; j < nt; ++j) {
        const double t = T * j / (nt - 1);
        data.times.push_back(t);
        for (int a = 0; a < 3; ++a) {
            const double s = (t / T + a) / 3.0;
            data.vines[a].emplace_back(b0 + rb * std::cos(2.0 * M_PI * s),
                                       d0 + rd * std::sin(2.0 * M_PI * s));
        }
    }
    // Crossing windows: contiguous runs where some vine pair is closer than
    // 40% of its time-maximum distance.
    {
        std::vector<char> close(nt, 0);
        double dmax = 0.0;
        for (int j = 0; j < nt; ++j)
            for (int a = 0; a < 3; ++a)
                dmax = std::max(dmax,
                                (data.vines[a][j] - data.vines[(a + 1) % 3][j]).norm());
        for (int j = 0; j < nt; ++j)
            for (int a = 0; a < 3; ++a)
                if ((data.vines[a][j] - data.vines[(a + 1) % 3][j]).norm() < 0.4 * dmax)
                    close[j] = 1;
        int start = -1;
        for (int j = 0; j <= nt; ++j) {
            if (j < nt && close[j]) {
                if (start < 0) start = j;
            } else if (start >= 0) {
                data.crossing_windows.emplace_back(start, j - 1);
                start = -1;
            }
        }
    }

    // Frame family over the cone. Ambient basis: f0 = e0, feature directions
    // v_a = e_{a+1}. The normal n(t) circles at polar angle theta0 around f0
    // through the quotient plane directions q1, q2 lifted to R^4.
    const double cos_t0 = 2.0 / 3.0;
    const double sin_t0 = std::sqrt(1.0 - cos_t0 * cos_t0);
    data.quotient_basis.col(0) = Eigen::Vector3d(1, -1, 0) / std::sqrt(2.0);
    data.quotient_basis.col(1) = Eigen::Vector3d(1, 1, -2) / std::sqrt(6.0);
    Eigen::Vector4d f0(1, 0, 0, 0);
    Eigen::Vector4d q1(0, 1, 1, -2), q2(0, 1, -1, 0);
    q1.normalize();
    q2.normalize();
    data.frames.reserve(nt);
    for (int j = 0; j < nt; ++j) {
        const double w = 2.0 * M_PI * j / (nt - 1);  // loop parameter in [0, 2 pi]
        // Orientation (q1 toward -q2) selects the (1,2,0) monodromy rather
        // than its inverse.
        const Eigen::Vector4d mdir = std::cos(w) * q1 - std::sin(w) * q2;
        // Rotation by theta0 in the (f0, mdir) plane, identity elsewhere.
        const Eigen::Matrix4d rot =
            Eigen::Matrix4d::Identity() +
            (cos_t0 - 1.0) * (f0 * f0.transpose() + mdir * mdir.transpose()) +
            sin_t0 * (mdir * f0.transpose() - f0 * mdir.transpose());
        ZeroModeFrame frame;
        frame.grid_j = j;
        frame.selection = FrameSelection::FullKernel;
        frame.psi.resize(4, 3);
        for (int a = 0; a < 3; ++a)
            frame.psi.col(a) = rot * Eigen::Vector4d::Unit(a + 1);
        data.frames.push_back(std::move(frame));
    }
    return data;
}

// ---------------------------------------------------------------------------
// Seeded noise perturbation: i.i.d. centered Gaussian displacement per
// coordinate.
// ---------------------------------------------------------------------------

inline PointCloudSeries add_noise(const PointCloudSeries& series, double sigma,
                                  std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw InvalidInputError("add_noise: sigma must be >= 0");
    if (sigma == 0.0) return series;
    Rng rng(seed);
    PointCloudSeries out = series;
    for (auto& frame : out.frames) {
        for (auto& p : frame.points) {
            p.x() += sigma * rng.gaussian();
            p.y() += sigma * rng.gaussian();
        }
    }
    return out;
}

inline PointCloudSeries generate(const GeneratorConfig& cfg) {
    switch (cfg.name) {
        case GeneratorName::DoubleCirclesApproach:
            return gen_double_circles(cfg);
        case GeneratorName::SizeOnlyControl:
            return gen_size_only(cfg);
        case GeneratorName::DumbbellDeform:
            return gen_dumbbell(cfg, DumbbellVariant::Deform);
        case GeneratorName::DumbbellRotate:
            return gen_dumbbell(cfg, DumbbellVariant::Rotate);
        case GeneratorName::VineyardLike:
            throw InvalidConfigError(
                "generate: the vineyard-like system is analytic (frames, not points); "
                "use gen_vineyard_like");
    }
    throw InvalidConfigError("generate: unknown generator");
}

}  // namespace hodge_transport
