#include <catch2/catch_amalgamated.hpp>

#include "analytic_family.hpp"
#include "hodge_transport/transport.hpp"
#include "oracles.hpp"

using namespace hodge_transport;

namespace {

Eigen::MatrixXd random_orthonormal(Rng& rng, int m, int k) {
    Eigen::MatrixXd a(m, k);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) a(i, j) = rng.gaussian();
    return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() *
           Eigen::MatrixXd::Identity(m, k);
}

Eigen::MatrixXd random_rotation(Rng& rng, int k) {
    Eigen::MatrixXd q = random_orthonormal(rng, k, k);
    if (q.determinant() < 0) q.col(0) = -q.col(0);
    return q;
}

ZeroModeFrame wrap(const Eigen::MatrixXd& psi) {
    ZeroModeFrame f;
    f.psi = psi;
    return f;
}

HodgeOperator ring_laplacian(int n, double center_x, int* edge_offset = nullptr) {
    (void)center_x;
    (void)edge_offset;
    const auto amb = build_ambient(n);
    PointCloudFrame f;
    oracles::add_circle(f, 0, 0, 1.0, n);
    const auto th = compute_thresholds(f, amb);
    return extended_hodge(
        boundary_at_scale(th, amb, 2.0 * std::sin(M_PI / n) + 1e-9));
}

}  // namespace

TEST_CASE("selected_frame builds persistence-selected kernels") {
    SECTION("single ring, k = 1") {
        const int n = 8;
        const auto amb = build_ambient(n);
        PointCloudFrame f;
        oracles::add_circle(f, 0, 0, 1.0, n);
        const auto th = compute_thresholds(f, amb);
        const auto diag = compute_h1_persistence(th, amb);
        const double d = diag.points.front().birth * 1.05;
        const auto op = extended_hodge(boundary_at_scale(th, amb, d));
        const auto frame = selected_frame(op, diag, d, 1);
        REQUIRE(frame.k() == 1);
        REQUIRE(frame.psi.col(0).norm() == Catch::Approx(1.0).margin(1e-10));
        const auto zm = zero_modes(op);
        REQUIRE((op.matrix * frame.psi.col(0)).norm() <= zm.summary.zero_tol *
                                                            (1.0 + op.matrix.norm()));
    }

    SECTION("two rings, k = 2: columns have disjoint supports") {
        const int n = 8;
        const auto amb = build_ambient(2 * n);
        PointCloudFrame f;
        oracles::add_circle(f, -6, 0, 1.0, n);
        oracles::add_circle(f, 6, 0, 1.0, n);
        const auto th = compute_thresholds(f, amb);
        const auto diag = compute_h1_persistence(th, amb);
        const double d = diag.points.front().birth * 1.05;
        const auto op = extended_hodge(boundary_at_scale(th, amb, d));
        const auto frame = selected_frame(op, diag, d, 2);
        REQUIRE(frame.k() == 2);
        REQUIRE((frame.psi.transpose() * frame.psi - Eigen::Matrix2d::Identity())
                    .cwiseAbs()
                    .maxCoeff() <= 1e-10);
        for (int c = 0; c < 2; ++c) {
            bool left = false, right = false;
            for (int e = 0; e < amb.edge_dim(); ++e) {
                if (std::abs(frame.psi(e, c)) > 1e-9)
                    (amb.edges[e][1] < n ? left : right) = true;
            }
            REQUIRE(left != right);
        }
    }

    SECTION("k beyond the kernel dimension is a rank deficit") {
        const int n = 8;
        const auto amb = build_ambient(n);
        PointCloudFrame f;
        oracles::add_circle(f, 0, 0, 1.0, n);
        const auto th = compute_thresholds(f, amb);
        const auto diag = compute_h1_persistence(th, amb);
        const double d = diag.points.front().birth * 1.05;
        const auto op = extended_hodge(boundary_at_scale(th, amb, d));
        REQUIRE_THROWS_AS(selected_frame(op, diag, d, 2), RankDeficitError);
    }
}

TEST_CASE("one_step_transport") {
    Rng rng(51);
    const Eigen::MatrixXd psi = random_orthonormal(rng, 7, 2);

    SECTION("identical frames give the identity") {
        const auto q = one_step_transport(wrap(psi), wrap(psi));
        REQUIRE((q - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
    }

    SECTION("a pure gauge rotation is recovered") {
        const Eigen::MatrixXd r = random_rotation(rng, 2);
        const auto q = one_step_transport(wrap(psi), wrap(psi * r));
        REQUIRE((q - r).cwiseAbs().maxCoeff() <= 1e-12);
    }

    SECTION("positive-diagonal overlap has identity polar factor") {
        Eigen::Matrix2d m;
        m << 2.0, 0.0, 0.0, 0.5;
        const auto q = polar_orthogonal(m);
        REQUIRE((q - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
    }

    SECTION("near-orthogonal subspaces break down") {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 2);
        a(0, 0) = 1.0;
        a(1, 1) = 1.0;
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(6, 2);
        b(2, 0) = 1.0;
        b(3, 1) = 1.0;
        REQUIRE_THROWS_AS(one_step_transport(wrap(a), wrap(b)),
                          TransportBreakdownError);
    }

    SECTION("rank mismatch is invalid input") {
        REQUIRE_THROWS_AS(one_step_transport(wrap(psi), wrap(psi.leftCols(1))),
                          InvalidInputError);
    }
}

TEST_CASE("cycle_holonomy") {
    Rng rng(53);

    SECTION("static frames give identity with zero deviations") {
        const Eigen::MatrixXd psi = random_orthonormal(rng, 6, 2);
        std::vector<ZeroModeFrame> frames(5, wrap(psi));
        const auto rec = cycle_holonomy(frames);
        REQUIRE(rec.deviation <= 1e-12);
        for (double c : rec.cumulative) REQUIRE(c <= 1e-12);
        REQUIRE((rec.permutation - Eigen::Matrix2d::Identity()).norm() <= 1e-12);
    }

    SECTION("orthogonality of steps and the cycle") {
        // Smoothly rotating subspace: frames of the analytic sphere family.
        analytic::SphereFamily fam{1.1, 1.0};
        std::vector<ZeroModeFrame> frames;
        for (int j = 0; j < 24; ++j)
            frames.push_back(fam.frame(0.7, 2.0 * M_PI * j / 24));
        const auto rec = cycle_holonomy(frames);
        for (const auto& q : rec.steps) {
            REQUIRE((q.transpose() * q - Eigen::Matrix2d::Identity()).norm() <= 1e-9);
        }
        REQUIRE((rec.cycle_holonomy.transpose() * rec.cycle_holonomy -
                 Eigen::Matrix2d::Identity())
                    .norm() <= 1e-9);
        REQUIRE(rec.cumulative.size() == frames.size());
        REQUIRE(rec.deviation >= 0.0);
        REQUIRE(rec.deviation <= 2.0 * std::sqrt(2.0) + 1e-9);
    }

    SECTION("gauge covariance: per-point re-gauging conjugates the cycle") {
        analytic::SphereFamily fam{0.9, 1.3};
        std::vector<ZeroModeFrame> frames;
        for (int j = 0; j < 16; ++j)
            frames.push_back(fam.frame(0.8, 2.0 * M_PI * j / 16));
        const auto base = cycle_holonomy(frames);

        std::vector<Eigen::MatrixXd> gauges;
        std::vector<ZeroModeFrame> regauged;
        for (const auto& f : frames) {
            const Eigen::MatrixXd g = random_orthonormal(rng, 2, 2);
            gauges.push_back(g);
            regauged.push_back(wrap(f.psi * g));
        }
        const auto re = cycle_holonomy(regauged);

        const Eigen::MatrixXd expected =
            gauges.front().transpose() * base.cycle_holonomy * gauges.front();
        REQUIRE((re.cycle_holonomy - expected).cwiseAbs().maxCoeff() <= 1e-10);

        const auto gi_a = gauge_invariants(base.cycle_holonomy);
        const auto gi_b = gauge_invariants(re.cycle_holonomy);
        REQUIRE(gi_a.trace == Catch::Approx(gi_b.trace).margin(1e-10));
        REQUIRE(gi_a.determinant == Catch::Approx(gi_b.determinant).margin(1e-10));
        REQUIRE(std::abs(base.deviation - re.deviation) <= 1e-10);
    }
}

TEST_CASE("gauge_invariants") {
    SECTION("identity") {
        const auto gi = gauge_invariants(Eigen::Matrix2d::Identity());
        REQUIRE(gi.trace == Catch::Approx(2.0));
        REQUIRE(gi.determinant == Catch::Approx(1.0));
        for (const auto& z : gi.spectrum) {
            REQUIRE(z.real() == Catch::Approx(1.0));
            REQUIRE(z.imag() == Catch::Approx(0.0).margin(1e-12));
        }
    }
    SECTION("rotation by -120 degrees") {
        const double th = -2.0 * M_PI / 3.0;
        Eigen::Matrix2d r;
        r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        const auto gi = gauge_invariants(r);
        REQUIRE(gi.trace == Catch::Approx(-1.0));  // 2 cos(120 deg)
        REQUIRE(gi.determinant == Catch::Approx(1.0));
    }
    SECTION("swap matrix") {
        Eigen::Matrix2d s;
        s << 0, 1, 1, 0;
        const auto gi = gauge_invariants(s);
        REQUIRE(gi.trace == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(gi.determinant == Catch::Approx(-1.0));
    }
}

TEST_CASE("nearest_signed_permutation") {
    SECTION("recovers a perturbed 3-cycle") {
        Eigen::Matrix3d p = Eigen::Matrix3d::Zero();
        p(0, 1) = 1.0;
        p(1, 2) = 1.0;
        p(2, 0) = -1.0;
        Rng rng(59);
        Eigen::Matrix3d noise;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) noise(i, j) = 0.05 * rng.gaussian();
        std::vector<int> images, signs;
        const Eigen::MatrixXd found =
            nearest_signed_permutation(p + noise, &images, &signs);
        REQUIRE((found - p).cwiseAbs().maxCoeff() <= 1e-12);
        REQUIRE(images == std::vector<int>{1, 2, 0});
        REQUIRE(signs == std::vector<int>{1, 1, -1});
    }
}

TEST_CASE("curvature on the analytic sphere family") {
    analytic::SphereFamily fam{0.8, 1.2};
    const int nd = 9, nt = 9;
    const double d0 = 0.5, t0 = 0.2;
    const double hd = 0.02, ht = 0.02;

    std::vector<std::optional<ZeroModeFrame>> frames(nd * nt);
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nt; ++j)
            frames[i * nt + j] = fam.frame(d0 + i * hd, t0 + j * ht);

    const auto field = curvature_grid(frames, nd, nt, hd, ht);

    SECTION("matches the closed-form solid-angle density") {
        for (int i = 1; i + 1 < nd; ++i) {
            for (int j = 1; j + 1 < nt; ++j) {
                const int idx = i * nt + j;
                REQUIRE(field.mask[idx]);
                const double expected = fam.curvature_norm(d0 + i * hd);
                REQUIRE(field.norm[idx] ==
                        Catch::Approx(expected).epsilon(5e-3).margin(1e-6));
            }
        }
    }

    SECTION("matches the brute-force projection-difference oracle exactly") {
        const int i = 3, j = 4;
        const Eigen::MatrixXd dense = oracles::curvature_bruteforce(
            frames[i * nt + j]->psi, frames[(i + 1) * nt + j]->psi,
            frames[(i - 1) * nt + j]->psi, frames[i * nt + (j + 1)]->psi,
            frames[i * nt + (j - 1)]->psi, hd, ht);
        const int idx = i * nt + j;
        const Eigen::MatrixXd lifted =
            frames[idx]->psi * field.f[idx] * frames[idx]->psi.transpose();
        REQUIRE((lifted - dense).cwiseAbs().maxCoeff() <= 1e-10);
    }

    SECTION("constant frames have zero curvature") {
        std::vector<std::optional<ZeroModeFrame>> flat(25, fam.frame(0.4, 0.1));
        const auto zero = curvature_grid(flat, 5, 5, 0.1, 0.1);
        for (int idx = 0; idx < 25; ++idx) {
            if (zero.mask[idx]) REQUIRE(zero.norm[idx] <= 1e-12);
        }
    }

    SECTION("per-point re-gauging conjugates F and preserves its norm") {
        Rng rng(61);
        std::vector<std::optional<ZeroModeFrame>> regauged(nd * nt);
        std::vector<Eigen::MatrixXd> gauges(nd * nt);
        for (int idx = 0; idx < nd * nt; ++idx) {
            gauges[idx] = random_orthonormal(rng, 2, 2);
            regauged[idx] = wrap(frames[idx]->psi * gauges[idx]);
        }
        const auto re = curvature_grid(regauged, nd, nt, hd, ht);
        for (int i = 1; i + 1 < nd; ++i) {
            for (int j = 1; j + 1 < nt; ++j) {
                const int idx = i * nt + j;
                REQUIRE(std::abs(re.norm[idx] - field.norm[idx]) <= 1e-10);
                const Eigen::MatrixXd conj =
                    gauges[idx].transpose() * field.f[idx] * gauges[idx];
                REQUIRE((re.f[idx] - conj).cwiseAbs().maxCoeff() <= 1e-10);
            }
        }
    }

    SECTION("masking: missing or rank-mismatched neighbors") {
        std::vector<std::optional<ZeroModeFrame>> holes = frames;
        holes[2 * nt + 3].reset();
        const auto masked = curvature_grid(holes, nd, nt, hd, ht);
        REQUIRE(!masked.mask[2 * nt + 3]);
        REQUIRE(!masked.mask[1 * nt + 3]);
        REQUIRE(!masked.mask[3 * nt + 3]);
        REQUIRE(!masked.mask[2 * nt + 2]);
        REQUIRE(!masked.mask[2 * nt + 4]);
        REQUIRE(masked.mask[5 * nt + 5]);
    }
}

TEST_CASE("loop holonomy") {
    analytic::SphereFamily fam{0.8, 1.2};

    SECTION("flat region gives the identity") {
        auto frame_at = [&](int, int) {
            static const ZeroModeFrame f = fam.frame(0.4, 0.3);
            return f;
        };
        const auto u = loop_holonomy(frame_at, 0, 0, 3, 3);
        REQUIRE((u - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
    }

    SECTION("degenerate rectangle gives the identity") {
        auto frame_at = [&](int i, int j) { return fam.frame(0.4 + 0.01 * i, 0.3 + 0.01 * j); };
        const auto u = loop_holonomy(frame_at, 2, 2, 2, 2);
        REQUIRE((u - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
    }

    SECTION("refinement: U_box approaches I - F * area at order >= 1.8") {
        const double d0 = 0.6, t0 = 0.4;
        std::vector<double> areas, errors;
        for (double h : {0.08, 0.04, 0.02, 0.01}) {
            auto frame_at = [&](int i, int j) {
                return fam.frame(d0 + i * h, t0 + j * h);
            };
            // Curvature at the cell center from the same spacing.
            const Eigen::MatrixXd fc = curvature_coefficient(
                fam.frame(d0 + h, t0 + h).psi, fam.frame(d0 + 2 * h, t0 + h).psi,
                fam.frame(d0, t0 + h).psi, fam.frame(d0 + h, t0 + 2 * h).psi,
                fam.frame(d0 + h, t0).psi, h, h);
            const auto u = loop_holonomy(frame_at, 0, 0, 2, 2);
            const double area = (2 * h) * (2 * h);
            // Compare in the center frame; the O(h) frame difference between
            // the corner and center gauges is absorbed by measuring the
            // deviation norm, which is gauge-covariant only up to O(area^2)
            // terms we are quantifying.
            const double err = (u - Eigen::MatrixXd::Identity(2, 2) +
                                area * fc)
                                   .norm();
            areas.push_back(area);
            errors.push_back(err);
        }
        double slope_sum = 0.0;
        for (std::size_t s = 1; s < areas.size(); ++s) {
            slope_sum += std::log(errors[s - 1] / errors[s]) /
                         std::log(areas[s - 1] / areas[s]);
        }
        const double mean_slope = slope_sum / (areas.size() - 1);
        INFO("errors: " << errors[0] << " " << errors[1] << " " << errors[2] << " "
                        << errors[3]);
        REQUIRE(mean_slope >= 1.8);
    }
}
