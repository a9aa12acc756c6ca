#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "spot/road_graph.hpp"

using namespace spot;

namespace {

std::vector<Waypoint> line_waypoints(RoadId road, WaypointId base, double y, int n) {
    std::vector<Waypoint> out;
    for (int i = 0; i < n; ++i) {
        Waypoint w;
        w.wp_id = base + i;
        w.road_id = road;
        w.position = {static_cast<double>(i), y};
        out.push_back(w);
    }
    return out;
}

} // namespace

TEST_CASE("assemble validates spacing and symmetry") {
    auto wps = line_waypoints(0, 0, 0.0, 5);
    RoadSegment seg;
    seg.road_id = 0;
    for (const auto& w : wps) seg.waypoints.push_back(w.wp_id);
    RoadGraph g = RoadGraph::assemble(wps, {seg});

    for (const auto& [id, edges] : g.adjacency) {
        for (const AdjEdge& e : edges) {
            // symmetric back edge with identical length
            const auto& back = g.edges(e.to);
            auto it = std::find_if(back.begin(), back.end(),
                                   [&](const AdjEdge& r) { return r.to == id; });
            REQUIRE(it != back.end());
            CHECK(e.length == Catch::Approx(it->length).margin(1e-12));
            // edge length equals endpoint distance
            CHECK(std::abs(e.length - distance(g.wp(id).position, g.wp(e.to).position)) < 1e-9);
        }
    }

    SECTION("bad spacing rejected") {
        auto bad = wps;
        bad[2].position.x = 10.0;
        CHECK_THROWS_AS(RoadGraph::assemble(bad, {seg}), Error);
    }
    SECTION("single-waypoint road rejected") {
        RoadSegment tiny;
        tiny.road_id = 1;
        tiny.waypoints = {0};
        CHECK_THROWS_AS(RoadGraph::assemble(wps, {seg, tiny}), Error);
    }
}

TEST_CASE("assemble links nearby roads and derives neighbors") {
    auto a = line_waypoints(0, 0, 0.0, 5);
    auto b = line_waypoints(1, 100, 1.0, 5); // 1 m above road 0
    std::vector<Waypoint> wps = a;
    wps.insert(wps.end(), b.begin(), b.end());
    RoadSegment sa, sb;
    sa.road_id = 0;
    sb.road_id = 1;
    for (const auto& w : a) sa.waypoints.push_back(w.wp_id);
    for (const auto& w : b) sb.waypoints.push_back(w.wp_id);
    RoadGraph g = RoadGraph::assemble(wps, {sa, sb});

    CHECK(g.roads.at(0).neighbors.count(1) == 1);
    CHECK(g.roads.at(1).neighbors.count(0) == 1);
    bool cross = false;
    for (const AdjEdge& e : g.edges(0)) {
        if (e.to >= 100) cross = true;
    }
    CHECK(cross);
}

TEST_CASE("shortest_route on a corridor equals exhaustive enumeration") {
    RoadGraph g = test::corridor_graph(200);
    std::vector<WaypointId> from{5};
    std::vector<WaypointId> to{180};
    auto route = shortest_route(g, from, to);
    REQUIRE(route.size() == 176);
    CHECK(route.front().wp_id == 5);
    CHECK(route.back().wp_id == 180);
    // on a corridor the only simple path is the corridor itself
    for (std::size_t i = 0; i < route.size(); ++i) {
        CHECK(route[i].wp_id == static_cast<WaypointId>(5 + i));
    }
}

TEST_CASE("shortest_route same endpoints and unreachable") {
    RoadGraph g = test::corridor_graph(10);
    auto self = shortest_route(g, {3, 4}, {4, 3});
    REQUIRE(self.size() == 1);
    CHECK(self.front().wp_id == 3); // smaller id wins the zero-distance tie

    // disconnected component
    test::GraphBuilder b;
    b.node(0, 0, 0);
    b.node(1, 1, 0);
    b.node(10, 50, 50);
    b.node(11, 51, 50);
    b.edge(0, 1);
    b.edge(10, 11);
    RoadGraph g2 = b.take();
    CHECK_THROWS_MATCHES(shortest_route(g2, {0}, {10}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::unreachable;
                         }));
}

TEST_CASE("shortest_route picks the shorter of two branches") {
    // ring: 0..9 around, plus a long detour
    test::GraphBuilder b;
    for (int i = 0; i < 10; ++i) b.node(i, static_cast<double>(i), 0.0);
    for (int i = 1; i < 10; ++i) b.edge(i - 1, i);
    // detour over the top: 0 - 20..24 - 9, each hop ~2.7 m (longer)
    for (int i = 0; i < 5; ++i) b.node(20 + i, 1.5 * (i + 1), 2.0);
    b.edge(0, 20);
    for (int i = 1; i < 5; ++i) b.edge(20 + i - 1, 20 + i);
    b.edge(24, 9);
    RoadGraph g = b.take();
    auto route = shortest_route(g, {0}, {9});
    REQUIRE(route.size() == 10); // the straight corridor
    CHECK(route[1].wp_id == 1);
}
