#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "hodge_transport/datasets.hpp"
#include "hodge_transport/io.hpp"
#include "hodge_transport/svg.hpp"

using namespace hodge_transport;

TEST_CASE("format_double round-trips") {
    Rng rng(71);
    for (int i = 0; i < 200; ++i) {
        const double v = std::ldexp(rng.uniform(-1, 1), static_cast<int>(rng.uniform(-30, 30)));
        REQUIRE(std::stod(format_double(v)) == v);
    }
    REQUIRE(format_double(kInfinity) == "inf");
    REQUIRE(format_double(1.0) == "1");
}

TEST_CASE("point cloud CSV round trip") {
    GeneratorConfig cfg;
    cfg.n_times = 9;
    const auto series = gen_double_circles(cfg);
    const auto path = std::filesystem::temp_directory_path() / "ht_test_points.csv";
    save_point_cloud_csv(series, path.string());
    const auto loaded = load_point_cloud_csv(path.string());
    REQUIRE(loaded.frames.size() == series.frames.size());
    for (std::size_t j = 0; j < series.frames.size(); ++j) {
        REQUIRE(loaded.frames[j].time == series.frames[j].time);
        REQUIRE(loaded.frames[j].points.size() == series.frames[j].points.size());
        for (std::size_t p = 0; p < series.frames[j].points.size(); ++p)
            REQUIRE(loaded.frames[j].points[p] == series.frames[j].points[p]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("key=value config parsing") {
    std::istringstream in(
        "# comment line\n"
        "n_d = 24\n"
        "d_max=1.75  # trailing comment\n"
        "out = results/exp1\n"
        "\n"
        "flag=1\n");
    const auto cfg = parse_key_value(in);
    REQUIRE(cfg.get_int("n_d", 0) == 24);
    REQUIRE(cfg.get_double("d_max", 0.0) == Catch::Approx(1.75));
    REQUIRE(cfg.get("out", "") == "results/exp1");
    REQUIRE(cfg.get_int("missing", 7) == 7);
    REQUIRE_THROWS_AS(cfg.get_int("out", 0), InvalidConfigError);
}

TEST_CASE("svg heatmap smoke test") {
    const int nd = 4, nt = 5;
    std::vector<double> values(nd * nt);
    std::vector<char> mask(nd * nt, 1);
    for (int i = 0; i < nd * nt; ++i) values[i] = i;
    mask[3] = 0;
    const auto path = std::filesystem::temp_directory_path() / "ht_test_heat.svg";
    save_heatmap_svg(path.string(), values, mask, nd, nt, "test");
    REQUIRE(std::filesystem::file_size(path) > 200);
    std::filesystem::remove(path);
}
