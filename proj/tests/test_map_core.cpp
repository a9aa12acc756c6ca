#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "helpers.hpp"
#include "spot/documents.hpp"
#include "spot/gates.hpp"
#include "spot/map_io.hpp"
#include "spot/simulator.hpp"

using namespace spot;

namespace {

FovPolygon square_fov(const std::string& id, double x0, double x1, double y0, double y1) {
    return {id, {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

RoadGraph one_road(int n) { return test::corridor_graph(n); }

} // namespace

TEST_CASE("compute_gates coverage ratios are exact") {
    RoadGraph g = one_road(18);

    SECTION("fully covered road") {
        auto gates = compute_gates(g, {square_fov("CCTV_00", -1, 18, -1, 1)});
        REQUIRE(gates.size() == 1);
        CHECK(gates[0].coverage_ratio == 1.0);
        CHECK(gates[0].covered_count() == 18);
    }
    SECTION("disjoint road emits no gate") {
        auto gates = compute_gates(g, {square_fov("CCTV_00", 100, 110, -1, 1)});
        CHECK(gates.empty());
    }
    SECTION("10 of 18 covered, ratio from brute-force recount") {
        // covers x in [3, 12] -> waypoints 3..12 inclusive = 10 of 18
        auto fov = square_fov("CCTV_13", 3.0, 12.0, -1, 1);
        auto gates = compute_gates(g, {fov});
        REQUIRE(gates.size() == 1);
        int brute = 0;
        for (const auto& [id, w] : g.waypoints) {
            if (point_in_fov(fov, w.position)) ++brute;
        }
        CHECK(brute == 10);
        CHECK(gates[0].coverage_ratio == static_cast<double>(brute) / 18.0);
        CHECK(gates[0].coverage_ratio == Catch::Approx(0.5556).margin(5e-5));
        REQUIRE(gates[0].covered_wp_indices.size() == 1);
        CHECK(gates[0].covered_wp_indices[0] == std::pair<int, int>{3, 12});
        CHECK(gates[0].boundary_wp_ids == std::vector<WaypointId>{3, 12});
    }
    SECTION("split coverage produces two runs with boundaries") {
        auto gates = compute_gates(g, {square_fov("CCTV_01", -0.5, 4.5, -1, 1)});
        auto gates2 = compute_gates(
            g, {FovPolygon{"CCTV_01",
                           {{-0.5, -1}, {4.5, -1}, {4.5, 1}, {-0.5, 1}}},
                FovPolygon{"CCTV_01b", {{9.5, -1}, {12.5, -1}, {12.5, 1}, {9.5, 1}}}});
        REQUIRE(gates.size() == 1);
        REQUIRE(gates2.size() == 2);
    }
}

TEST_CASE("gate exactness: stored ratio equals brute-force recomputation") {
    TownSpec town{2, 2, 40.0, 1};
    RoadGraph g = generate_town(town);
    CameraPlacement placement;
    placement.count = 3;
    placement.max_range = 25.0;
    auto cams = place_cameras(g, placement);
    std::vector<FovPolygon> fovs;
    for (const auto& c : cams) fovs.push_back(build_fov_polygon(c));
    auto gates = compute_gates(g, fovs);
    REQUIRE(!gates.empty());
    for (const auto& gate : gates) {
        const FovPolygon* fov = nullptr;
        for (const auto& f : fovs) {
            if (f.cctv_id == gate.cctv_id) fov = &f;
        }
        const auto& seg = g.roads.at(gate.road_id);
        int covered = 0;
        for (WaypointId id : seg.waypoints) {
            if (point_in_fov(*fov, g.wp(id).position)) ++covered;
        }
        CHECK(gate.coverage_ratio ==
              static_cast<double>(covered) / static_cast<double>(seg.waypoints.size()));
        CHECK(covered == gate.covered_count());
    }
}

TEST_CASE("build_zones per camera") {
    RoadGraph g = one_road(18);
    CameraSpec cam;
    cam.cctv_id = "CCTV_02";
    cam.position = {5, 0, 6};
    cam.pitch_deg = -20;
    cam.fov_deg = 60;
    cam.max_range = 20;

    SECTION("zone covers gated roads and their fringe") {
        auto gates = compute_gates(g, {square_fov("CCTV_02", 3, 12, -1, 1)});
        auto zones = build_zones(g, gates, {cam});
        REQUIRE(zones.size() == 1);
        CHECK(zones[0].zone_id == "Z_0_2"); // index from the camera suffix
        CHECK(zones[0].covered_roads == std::set<RoadId>{0});
        CHECK(zones[0].neighbor_roads.empty()); // corridor has one road
    }
    SECTION("camera with no gates yields an empty zone") {
        auto zones = build_zones(g, {}, {cam});
        REQUIRE(zones.size() == 1);
        CHECK(zones[0].covered_roads.empty());
        CHECK(zones[0].cctvs == std::set<std::string>{"CCTV_02"});
    }
}

TEST_CASE("road document golden format") {
    RoadDocLine line;
    line.road_id = 131;
    line.n_waypoints = 18;
    line.coverage = {{"CCTV_13", to_tenths(54.3)}, {"CCTV_00", to_tenths(12.8)}};
    line.neighbors = {8, 11, 92, 93};
    std::string expect =
        "Road 131: Waypoints = 18, Coverage = CCTV_13 (54.3%), CCTV_00 (12.8%), "
        "Neighbors = [8, 11, 92, 93]";
    CHECK(render(line) == expect);
    auto parsed = parse_doc_line(expect);
    REQUIRE(std::holds_alternative<RoadDocLine>(parsed));
    CHECK(std::get<RoadDocLine>(parsed) == line);
}

TEST_CASE("coverage percentages round half up to one decimal") {
    CHECK(tenths_to_string(to_tenths(0.543 * 100.0)) == "54.3");
    CHECK(tenths_to_string(to_tenths(0.12849 * 100.0)) == "12.8");
    CHECK(tenths_to_string(to_tenths(12.25)) == "12.3"); // exact half rounds up
    CHECK(tenths_to_string(to_tenths(100.0)) == "100.0");
    CHECK(tenths_to_string(to_tenths(-20.0)) == "-20.0");
}

TEST_CASE("uncovered road renders the none sentinel") {
    RoadDocLine line;
    line.road_id = 7;
    line.n_waypoints = 42;
    line.neighbors = {};
    std::string text = render(line);
    CHECK(text == "Road 7: Waypoints = 42, Coverage = none, Neighbors = []");
    auto parsed = parse_doc_line(text);
    CHECK(std::get<RoadDocLine>(parsed) == line);
}

TEST_CASE("camera and zone document lines round-trip") {
    CameraDocLine cam;
    cam.cctv_id = "CCTV_05";
    cam.x_t = 1205;
    cam.y_t = 502;
    cam.z_t = 60;
    cam.yaw_t = 900;
    cam.pitch_t = -200;
    cam.fov_t = 600;
    std::string text = render(cam);
    CHECK(text == "CCTV_05: Pos = (120.5, 50.2, 6.0), Yaw = 90.0, Pitch = -20.0, FOV = 60.0");
    CHECK(std::get<CameraDocLine>(parse_doc_line(text)) == cam);

    ZoneDocLine zone;
    zone.zone_id = "Z_0_3";
    zone.cctvs = {"CCTV_02"};
    zone.roads = {4, 5, 216};
    zone.neighbors = {8, 11};
    std::string ztext = render(zone);
    CHECK(ztext == "Zone Z_0_3: CCTVs = [CCTV_02], Roads = [4, 5, 216], Neighbors = [8, 11]");
    CHECK(std::get<ZoneDocLine>(parse_doc_line(ztext)) == zone);
}

TEST_CASE("generated documents round-trip through the parser") {
    TownSpec town{2, 2, 40.0, 3};
    RoadGraph g = generate_town(town);
    CameraPlacement placement;
    placement.count = 4;
    placement.max_range = 25.0;
    auto cams = place_cameras(g, placement);
    std::vector<FovPolygon> fovs;
    for (const auto& c : cams) fovs.push_back(build_fov_polygon(c));
    auto gates = compute_gates(g, fovs);
    auto zones = build_zones(g, gates, cams);
    auto docs = generate_documents(g, gates, zones, cams, fovs);
    REQUIRE(docs.size() == g.roads.size() + zones.size() + cams.size());

    for (const auto& d : docs) {
        auto parsed = parse_doc_line(d.text);
        CHECK(render(parsed) == d.text);
        CHECK(d.bbox.valid());
    }

    // road doc bboxes contain all subject-road waypoints
    for (const auto& d : docs) {
        if (d.doc_id.rfind("road_", 0) != 0) continue;
        RoadId rid = std::stoi(d.doc_id.substr(5));
        for (WaypointId id : g.roads.at(rid).waypoints) {
            CHECK(d.bbox.contains(g.wp(id).position));
        }
    }
}

TEST_CASE("map file save/load round-trips") {
    namespace fs = std::filesystem;
    TownSpec town{2, 2, 40.0, 5};
    RoadGraph g = generate_town(town);
    CameraPlacement placement;
    placement.count = 2;
    placement.max_range = 22.0;
    auto cams = place_cameras(g, placement);

    fs::path dir = fs::temp_directory_path() / "spot_map_io_test";
    fs::create_directories(dir);
    std::string path = (dir / "map.json").string();
    save_map(path, g, cams);
    MapFile loaded = load_map(path);
    CHECK(loaded.graph.waypoints.size() == g.waypoints.size());
    CHECK(loaded.graph.roads.size() == g.roads.size());
    REQUIRE(loaded.cameras.size() == cams.size());
    CHECK(loaded.cameras[0].cctv_id == cams[0].cctv_id);

    // byte-stable re-save
    std::string path2 = (dir / "map2.json").string();
    save_map(path2, loaded.graph, loaded.cameras);
    std::ifstream a(path), b(path2);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    fs::remove_all(dir);
}

TEST_CASE("shortest route between cameras via gates") {
    RoadGraph g = one_road(200);
    std::vector<FovPolygon> fovs{square_fov("CCTV_00", 0, 20, -1, 1),
                                 square_fov("CCTV_01", 150, 170, -1, 1)};
    auto gates = compute_gates(g, fovs);
    auto route = shortest_route(g, gates, "CCTV_00", "CCTV_01");
    CHECK(route.front().wp_id == 20);  // nearest gated waypoints of each camera
    CHECK(route.back().wp_id == 150);
    auto self_route = shortest_route(g, gates, "CCTV_00", "CCTV_00");
    CHECK(self_route.size() == 1);
}
