#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "spot/camera.hpp"
#include "spot/road_graph.hpp"

namespace spot {

/// Precomputed overlap between one road's waypoints and one camera's footprint.
struct RoadCctvGate {
    RoadId road_id = 0;
    std::string cctv_id;
    std::vector<std::pair<int, int>> covered_wp_indices; // inclusive index runs
    double coverage_ratio = 0.0;                         // covered / total, exact
    std::vector<WaypointId> boundary_wp_ids;             // first/last wp of each run

    [[nodiscard]] int covered_count() const {
        int n = 0;
        for (auto [a, b] : covered_wp_indices) n += b - a + 1;
        return n;
    }
};

inline std::vector<RoadCctvGate> compute_gates(const RoadGraph& g,
                                               const std::vector<FovPolygon>& fovs) {
    std::vector<RoadCctvGate> gates;
    for (const auto& [rid, seg] : g.roads) {
        for (const auto& fov : fovs) {
            RoadCctvGate gate;
            gate.road_id = rid;
            gate.cctv_id = fov.cctv_id;
            int covered = 0;
            int run_start = -1;
            for (std::size_t i = 0; i < seg.waypoints.size(); ++i) {
                bool in = point_in_fov(fov, g.wp(seg.waypoints[i]).position);
                if (in) {
                    ++covered;
                    if (run_start < 0) run_start = static_cast<int>(i);
                } else if (run_start >= 0) {
                    gate.covered_wp_indices.emplace_back(run_start, static_cast<int>(i) - 1);
                    run_start = -1;
                }
            }
            if (run_start >= 0) {
                gate.covered_wp_indices.emplace_back(run_start,
                                                     static_cast<int>(seg.waypoints.size()) - 1);
            }
            if (covered == 0) continue;
            gate.coverage_ratio = static_cast<double>(covered) /
                                  static_cast<double>(seg.waypoints.size());
            for (auto [a, b] : gate.covered_wp_indices) {
                gate.boundary_wp_ids.push_back(seg.waypoints[static_cast<std::size_t>(a)]);
                gate.boundary_wp_ids.push_back(seg.waypoints[static_cast<std::size_t>(b)]);
            }
            gates.push_back(std::move(gate));
        }
    }
    return gates;
}

/// Waypoint ids covered by any gate of the given camera, ascending.
inline std::vector<WaypointId> gated_waypoints(const RoadGraph& g,
                                               const std::vector<RoadCctvGate>& gates,
                                               const std::string& cctv_id) {
    std::set<WaypointId> out;
    for (const auto& gate : gates) {
        if (gate.cctv_id != cctv_id) continue;
        const auto& seg = g.roads.at(gate.road_id);
        for (auto [a, b] : gate.covered_wp_indices) {
            for (int i = a; i <= b; ++i) out.insert(seg.waypoints[static_cast<std::size_t>(i)]);
        }
    }
    return {out.begin(), out.end()};
}

inline std::vector<Waypoint> shortest_route(const RoadGraph& g,
                                            const std::vector<RoadCctvGate>& gates,
                                            const std::string& from_cam,
                                            const std::string& to_cam) {
    return shortest_route(g, gated_waypoints(g, gates, from_cam),
                          gated_waypoints(g, gates, to_cam));
}

/// Camera-seeded surveillance region: the roads a camera gates plus their fringe.
struct Zone {
    std::string zone_id; // "Z_r_n"
    std::set<std::string> cctvs;
    std::set<RoadId> covered_roads;
    std::set<RoadId> neighbor_roads;
};

/// One zone per camera; the zone index is the camera's numeric suffix when present.
inline std::vector<Zone> build_zones(const RoadGraph& g, const std::vector<RoadCctvGate>& gates,
                                     const std::vector<CameraSpec>& cams) {
    std::vector<Zone> zones;
    for (std::size_t k = 0; k < cams.size(); ++k) {
        const auto& cam = cams[k];
        Zone z;
        long idx = static_cast<long>(k);
        if (auto pos = cam.cctv_id.rfind('_'); pos != std::string::npos) {
            try {
                idx = std::stol(cam.cctv_id.substr(pos + 1));
            } catch (...) {
            }
        }
        z.zone_id = "Z_0_" + std::to_string(idx);
        z.cctvs.insert(cam.cctv_id);
        for (const auto& gate : gates) {
            if (gate.cctv_id == cam.cctv_id) z.covered_roads.insert(gate.road_id);
        }
        for (RoadId rid : z.covered_roads) {
            for (RoadId n : g.roads.at(rid).neighbors) {
                if (!z.covered_roads.count(n)) z.neighbor_roads.insert(n);
            }
        }
        zones.push_back(std::move(z));
    }
    return zones;
}

} // namespace spot
