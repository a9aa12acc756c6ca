#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "spot/geometry.hpp"

using namespace spot;

TEST_CASE("wrap_pi maps into (-pi, pi]") {
    CHECK(wrap_pi(0.0) == 0.0);
    CHECK(wrap_pi(kPi) == Catch::Approx(kPi));
    CHECK(wrap_pi(-kPi) == Catch::Approx(kPi)); // -pi folds to +pi
    CHECK(wrap_pi(3.0 * kPi) == Catch::Approx(kPi));
    CHECK(wrap_pi(2.0 * kPi + 0.25) == Catch::Approx(0.25));
    CHECK(wrap_pi(-2.5 * kPi) == Catch::Approx(-0.5 * kPi));
}

TEST_CASE("point_in_polygon counts boundary as inside") {
    PolygonPoints square{{0, 0}, {4, 0}, {4, 4}, {0, 4}};
    CHECK(point_in_polygon(square, {2, 2}));
    CHECK(point_in_polygon(square, {0, 0}));   // vertex
    CHECK(point_in_polygon(square, {2, 0}));   // edge
    CHECK_FALSE(point_in_polygon(square, {5, 2}));
    CHECK_FALSE(point_in_polygon(square, {-1e-6, 2}));
}

TEST_CASE("signed_area and orientation") {
    PolygonPoints ccw{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
    CHECK(signed_area(ccw) == Catch::Approx(4.0));
    PolygonPoints cw = ccw;
    std::reverse(cw.begin(), cw.end());
    CHECK(signed_area(cw) == Catch::Approx(-4.0));
    ensure_ccw(cw);
    CHECK(signed_area(cw) == Catch::Approx(4.0));
}

TEST_CASE("polyline overlap: fully inside, disjoint, chord") {
    PolygonPoints square{{0, 0}, {10, 0}, {10, 10}, {0, 10}};

    std::vector<Vec2> inside{{2, 5}, {8, 5}};
    CHECK(polyline_overlap_length(inside, square) == Catch::Approx(6.0));

    std::vector<Vec2> outside{{20, 0}, {30, 0}};
    CHECK(polyline_overlap_length(outside, square) == Catch::Approx(0.0));

    // 10 m chord with exactly 6 m inside, checked against a 1 mm sampling oracle
    std::vector<Vec2> chord{{-2, 5}, {8, 5}};
    double exact = polyline_overlap_length(chord, square);
    double sampled = 0.0;
    const double step = 1e-3;
    double len = distance(chord[0], chord[1]);
    for (double s = 0.0; s < len; s += step) {
        Vec2 mid = chord[0] + (chord[1] - chord[0]) * ((s + step / 2.0) / len);
        if (point_in_polygon(square, mid)) sampled += step;
    }
    CHECK(exact == Catch::Approx(6.0).margin(1e-9));
    CHECK(std::abs(exact - sampled) < 2e-3);
}

TEST_CASE("polyline overlap handles multiple entries") {
    // two disjoint squares along one straight path
    PolygonPoints left{{1, -1}, {3, -1}, {3, 1}, {1, 1}};
    std::vector<Vec2> path{{0, 0}, {10, 0}};
    auto runs = polyline_polygon_runs(path, left);
    REQUIRE(runs.size() == 1);
    CHECK(runs[0].s_begin == Catch::Approx(1.0));
    CHECK(runs[0].s_end == Catch::Approx(3.0));
    CHECK_FALSE(runs[0].begins_at_path_start);
    CHECK(runs[0].entry_edge >= 0);
}

TEST_CASE("overlap agrees with dense sampling on random cases") {
    std::mt19937_64 rng(20240811);
    for (int trial = 0; trial < 25; ++trial) {
        auto poly = test::random_convex_polygon(rng, {test::urand(rng, -5, 5),
                                                      test::urand(rng, -5, 5)}, 8.0);
        std::vector<Vec2> path;
        int segs = 2 + static_cast<int>(rng() % 3);
        Vec2 p{test::urand(rng, -20, 20), test::urand(rng, -20, 20)};
        path.push_back(p);
        for (int i = 0; i < segs; ++i) {
            p = p + Vec2{test::urand(rng, -15, 15), test::urand(rng, -15, 15)};
            path.push_back(p);
        }
        double exact = polyline_overlap_length(path, poly);
        double sampled = 0.0;
        const double step = 1e-3;
        for (std::size_t i = 1; i < path.size(); ++i) {
            double len = distance(path[i - 1], path[i]);
            int n = static_cast<int>(len / step);
            for (int k = 0; k < n; ++k) {
                Vec2 mid = path[i - 1] +
                           (path[i] - path[i - 1]) * ((k + 0.5) * step / len);
                if (point_in_polygon(poly, mid)) sampled += step;
            }
        }
        CHECK(std::abs(exact - sampled) < 0.05);
    }
}

TEST_CASE("polygons_interiors_disjoint") {
    PolygonPoints a{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
    PolygonPoints b{{3, 0}, {5, 0}, {5, 2}, {3, 2}};
    PolygonPoints c{{1, 1}, {4, 1}, {4, 3}, {1, 3}};
    CHECK(polygons_interiors_disjoint(a, b));
    CHECK_FALSE(polygons_interiors_disjoint(a, c));
    CHECK_FALSE(polygons_interiors_disjoint(b, c));
    // touching along an edge still has zero intersection area
    PolygonPoints d{{2, 0}, {4, 0}, {4, 2}, {2, 2}};
    CHECK(polygons_interiors_disjoint(a, d));
}

TEST_CASE("point_at_arclength walks the polyline") {
    std::vector<Vec2> path{{0, 0}, {3, 0}, {3, 4}};
    CHECK(point_at_arclength(path, 0.0) == Vec2{0, 0});
    CHECK(point_at_arclength(path, 3.0) == Vec2{3, 0});
    Vec2 mid = point_at_arclength(path, 5.0);
    CHECK(mid.x == Catch::Approx(3.0));
    CHECK(mid.y == Catch::Approx(2.0));
    CHECK(point_at_arclength(path, 100.0) == Vec2{3, 4});
    CHECK(polyline_length(path) == Catch::Approx(7.0));
}
