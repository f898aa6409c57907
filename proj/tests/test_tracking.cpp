#include <catch2/catch_amalgamated.hpp>

#include "hodge_transport/tracking.hpp"
#include "oracles.hpp"

using namespace hodge_transport;

namespace {

PersistenceDiagram diagram_of(std::initializer_list<Eigen::Vector2d> pts, int ti = 0) {
    PersistenceDiagram d;
    d.time_index = ti;
    for (const auto& p : pts) {
        PersistencePoint pp;
        pp.birth = p.x();
        pp.death = p.y();
        pp.rep_cycle = Eigen::VectorXd::Ones(1);
        d.points.push_back(pp);
    }
    std::stable_sort(d.points.begin(), d.points.end(),
                     [](const PersistencePoint& a, const PersistencePoint& b) {
                         if (a.lifetime() != b.lifetime())
                             return a.lifetime() > b.lifetime();
                         return a.birth < b.birth;
                     });
    return d;
}

}  // namespace

TEST_CASE("successive_match") {
    SECTION("stationary diagrams: zero swaps, constant margins") {
        std::vector<PersistenceDiagram> series(6, diagram_of({{0.2, 1.8}, {0.5, 1.2}}));
        const auto st = successive_match(series);
        REQUIRE(st.swap_count() == 0);
        for (std::size_t s = 1; s < st.margins.size(); ++s)
            REQUIRE(st.margins[s] == Catch::Approx(st.margins[0]));
        for (double sep : st.separations)
            REQUIRE(sep == Catch::Approx((Eigen::Vector2d(0.2, 1.8) -
                                          Eigen::Vector2d(0.5, 1.2))
                                             .norm()));
    }

    SECTION("a one-sample rank flip: exactly one swap flagged") {
        // Feature A stays put; feature B's death rises past A's lifetime for
        // exactly one sample and falls back. Appendix-C flags mark the steps
        // whose raw lifetime ranking disagrees with the tracked labels, so
        // this flags exactly once, at the rank flip.
        std::vector<PersistenceDiagram> series;
        const int nt = 11;
        for (int j = 0; j < nt; ++j) {
            const double s = static_cast<double>(j) / (nt - 1);
            const double hump = 1.35 * std::exp(-std::pow((s - 0.5) / 0.25, 2));
            const Eigen::Vector2d a(0.2, 2.0);
            const Eigen::Vector2d b(0.6, 1.2 + hump);
            series.push_back(diagram_of({a, b}, j));
        }
        const auto st = successive_match(series);
        REQUIRE(st.swap_count() == 1);
        const int swap_at =
            static_cast<int>(std::find(st.swap_flags.begin(), st.swap_flags.end(), 1) -
                             st.swap_flags.begin());
        REQUIRE(swap_at == 4);  // entering the flipped sample at s = 0.5
        // Branch-following: label 1 is feature A again at the end.
        REQUIRE(st.labeled.back()[0] == Eigen::Vector2d(0.2, 2.0));
    }

    SECTION("a one-way rank crossing flags every post-crossing step") {
        // With no return crossing, the raw ranking stays flipped relative to
        // the branch-following labels, so each remaining step flags.
        std::vector<PersistenceDiagram> series;
        const int nt = 11;
        for (int j = 0; j < nt; ++j) {
            const double s = static_cast<double>(j) / (nt - 1);
            series.push_back(diagram_of({Eigen::Vector2d(0.15, 2.0 - s),
                                         Eigen::Vector2d(0.25, 1.05 + s)},
                                        j));
        }
        const auto st = successive_match(series);
        REQUIRE(st.swap_count() == 5);
    }

    SECTION("short diagram carries its time index") {
        std::vector<PersistenceDiagram> series(3, diagram_of({{0.2, 1.8}, {0.5, 1.2}}));
        series[2] = diagram_of({{0.1, 0.9}}, 2);
        try {
            successive_match(series);
            FAIL("expected ShortDiagramError");
        } catch (const ShortDiagramError& e) {
            REQUIRE(e.time_index == 2);
        }
    }
}

TEST_CASE("holonomy_guided_match") {
    const Eigen::Matrix2d qid = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d qswap;
    qswap << 0, 1, -1, 0;

    std::vector<PersistenceDiagram> series;
    for (int j = 0; j < 5; ++j)
        series.push_back(diagram_of({{0.2, 1.8}, {0.6, 1.2}}, j));

    SECTION("identity transports reproduce the ordinary order") {
        std::vector<Eigen::MatrixXd> steps(4, qid);
        const auto hg = holonomy_guided_match(series, steps);
        REQUIRE(hg.track_error == Catch::Approx(0.0).margin(1e-12));
        for (double sl : hg.swap_likeness) REQUIRE(sl < 0.0);
    }

    SECTION("one swap-dominant step exchanges labels from that step on") {
        std::vector<Eigen::MatrixXd> steps(4, qid);
        steps[1] = qswap;
        const auto hg = holonomy_guided_match(series, steps);
        REQUIRE(hg.swap_likeness[1] > 0.0);
        // Times 0..1 ordinary, 2.. swapped.
        REQUIRE(hg.relabeled[1][0] == Eigen::Vector2d(0.2, 1.8));
        for (int j = 2; j < 5; ++j) {
            REQUIRE(hg.relabeled[j][0] == Eigen::Vector2d(0.6, 1.2));
            REQUIRE(hg.relabeled[j][1] == Eigen::Vector2d(0.2, 1.8));
        }
        // Successive matching stays identity on a static series, so the
        // disagreement is positive.
        REQUIRE(hg.track_error > 0.0);
    }

    SECTION("rank other than 2 is unsupported") {
        std::vector<Eigen::MatrixXd> steps(4, Eigen::MatrixXd::Identity(3, 3));
        REQUIRE_THROWS_AS(holonomy_guided_match(series, steps), UnsupportedRankError);
    }
}

TEST_CASE("pd_drift") {
    std::vector<PersistenceDiagram> base;
    for (int j = 0; j < 4; ++j)
        base.push_back(diagram_of({{0.2, 1.9}, {0.5, 1.3}}, j));

    SECTION("identical series drift zero") {
        const auto dr = pd_drift(base, base);
        REQUIRE(dr.mean == Catch::Approx(0.0).margin(1e-15));
    }

    SECTION("rigid shift of both points by delta gives drift delta") {
        const double delta = 0.37;
        std::vector<PersistenceDiagram> shifted;
        for (int j = 0; j < 4; ++j)
            shifted.push_back(diagram_of(
                {{0.2 + delta, 1.9}, {0.5 + delta, 1.3}}, j));
        const auto dr = pd_drift(base, shifted);
        REQUIRE(dr.mean == Catch::Approx(delta));
        for (double v : dr.per_time) REQUIRE(v == Catch::Approx(delta));
    }

    SECTION("label swap is absorbed by the matching") {
        std::vector<PersistenceDiagram> swapped;
        for (int j = 0; j < 4; ++j)
            swapped.push_back(diagram_of({{0.5, 1.3}, {0.2, 1.9}}, j));
        const auto dr = pd_drift(base, swapped);
        REQUIRE(dr.mean == Catch::Approx(0.0).margin(1e-15));
    }

    SECTION("pseudometric properties on random triples") {
        Rng rng(67);
        auto random_series = [&]() {
            std::vector<PersistenceDiagram> s;
            for (int j = 0; j < 3; ++j) {
                const double b1 = rng.uniform(0, 1), b2 = rng.uniform(0, 1);
                s.push_back(diagram_of({{b1, b1 + rng.uniform(0.5, 2.0)},
                                        {b2, b2 + rng.uniform(0.5, 2.0)}},
                                       j));
            }
            return s;
        };
        for (int trial = 0; trial < 20; ++trial) {
            const auto a = random_series();
            const auto b = random_series();
            const auto c = random_series();
            const double ab = pd_drift(a, b).mean;
            const double ba = pd_drift(b, a).mean;
            const double ac = pd_drift(a, c).mean;
            const double cb = pd_drift(c, b).mean;
            REQUIRE(ab == Catch::Approx(ba).margin(1e-12));  // symmetry
            REQUIRE(ab >= 0.0);
            REQUIRE(ab <= ac + cb + 1e-12);  // triangle inequality
        }
    }
}
