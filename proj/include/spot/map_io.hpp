#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spot/camera.hpp"
#include "spot/road_graph.hpp"

namespace spot {

// Map file schema: one JSON object {"waypoints": [...], "roads": [...], "cameras": [...]}.
// Partial files (e.g. cameras only) are accepted; missing keys read as empty.

inline nlohmann::json to_json(const Waypoint& w) {
    return {{"wp_id", w.wp_id},         {"road_id", w.road_id},
            {"lane_id", w.lane_id},     {"position", {w.position.x, w.position.y}},
            {"yaw", w.yaw},             {"is_intersection", w.is_intersection}};
}

inline nlohmann::json to_json(const RoadSegment& s) {
    return {{"road_id", s.road_id},
            {"waypoints", s.waypoints},
            {"neighbors", std::vector<RoadId>(s.neighbors.begin(), s.neighbors.end())}};
}

inline nlohmann::json to_json(const CameraSpec& c) {
    return {{"cctv_id", c.cctv_id},
            {"position", {c.position.x, c.position.y, c.position.z}},
            {"yaw", c.yaw_deg},
            {"pitch", c.pitch_deg},
            {"roll", c.roll_deg},
            {"fov_deg", c.fov_deg},
            {"max_range", c.max_range},
            {"image_width", c.image_width},
            {"image_height", c.image_height}};
}

inline nlohmann::json map_to_json(const RoadGraph& g, const std::vector<CameraSpec>& cams) {
    nlohmann::json j;
    j["waypoints"] = nlohmann::json::array();
    for (const auto& [id, w] : g.waypoints) j["waypoints"].push_back(to_json(w));
    j["roads"] = nlohmann::json::array();
    for (const auto& [id, r] : g.roads) j["roads"].push_back(to_json(r));
    j["cameras"] = nlohmann::json::array();
    for (const auto& c : cams) j["cameras"].push_back(to_json(c));
    return j;
}

inline CameraSpec camera_from_json(const nlohmann::json& j) {
    CameraSpec c;
    c.cctv_id = j.at("cctv_id").get<std::string>();
    auto pos = j.at("position");
    c.position = {pos.at(0).get<double>(), pos.at(1).get<double>(), pos.at(2).get<double>()};
    c.yaw_deg = j.at("yaw").get<double>();
    c.pitch_deg = j.at("pitch").get<double>();
    c.roll_deg = j.value("roll", 0.0);
    c.fov_deg = j.at("fov_deg").get<double>();
    c.max_range = j.at("max_range").get<double>();
    c.image_width = j.at("image_width").get<int>();
    c.image_height = j.at("image_height").get<int>();
    validate(c);
    return c;
}

struct MapFile {
    RoadGraph graph;
    std::vector<CameraSpec> cameras;
};

inline MapFile map_from_json(const nlohmann::json& j) {
    std::vector<Waypoint> wps;
    for (const auto& wj : j.value("waypoints", nlohmann::json::array())) {
        Waypoint w;
        w.wp_id = wj.at("wp_id").get<WaypointId>();
        w.road_id = wj.at("road_id").get<RoadId>();
        w.lane_id = wj.value("lane_id", 0);
        auto pos = wj.at("position");
        w.position = {pos.at(0).get<double>(), pos.at(1).get<double>()};
        w.yaw = wj.value("yaw", 0.0);
        w.is_intersection = wj.value("is_intersection", false);
        wps.push_back(w);
    }
    std::vector<RoadSegment> segs;
    for (const auto& rj : j.value("roads", nlohmann::json::array())) {
        RoadSegment s;
        s.road_id = rj.at("road_id").get<RoadId>();
        s.waypoints = rj.at("waypoints").get<std::vector<WaypointId>>();
        for (const auto& n : rj.value("neighbors", nlohmann::json::array())) {
            s.neighbors.insert(n.get<RoadId>());
        }
        segs.push_back(std::move(s));
    }
    MapFile out;
    if (!wps.empty()) {
        // Neighbor sets come from the file; adjacency is rebuilt from geometry.
        out.graph = RoadGraph::assemble(std::move(wps), std::move(segs), 1.2,
                                        /*derive_neighbors=*/false);
    }
    for (const auto& cj : j.value("cameras", nlohmann::json::array())) {
        out.cameras.push_back(camera_from_json(cj));
    }
    return out;
}

inline void save_map(const std::string& path, const RoadGraph& g,
                     const std::vector<CameraSpec>& cams) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), Errc::io_error, "cannot open " + path + " for writing");
    out << map_to_json(g, cams).dump(2) << "\n";
}

inline MapFile load_map(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Errc::io_error, "cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        raise(Errc::bad_input, path + ": " + e.what());
    }
    return map_from_json(j);
}

} // namespace spot
