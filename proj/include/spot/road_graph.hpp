#pragma once

#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "spot/errors.hpp"
#include "spot/geometry.hpp"

namespace spot {

using WaypointId = std::int64_t;
using RoadId = int;

/// Road centerline sample at roughly 1 m spacing.
struct Waypoint {
    WaypointId wp_id = 0;
    RoadId road_id = 0;
    int lane_id = 0;
    Vec2 position;
    double yaw = 0.0; // normalized to [-pi, pi)
    bool is_intersection = false;
};

struct RoadSegment {
    RoadId road_id = 0;
    std::vector<WaypointId> waypoints; // ordered along the road
    std::set<RoadId> neighbors;
};

struct AdjEdge {
    WaypointId to = 0;
    double length = 0.0;
    double bearing = 0.0; // direction of travel along this edge
};

/// Immutable road network: roads, waypoints, and waypoint-level adjacency.
class RoadGraph {
public:
    std::map<RoadId, RoadSegment> roads;
    std::map<WaypointId, Waypoint> waypoints;
    std::map<WaypointId, std::vector<AdjEdge>> adjacency;

    [[nodiscard]] const Waypoint& wp(WaypointId id) const {
        auto it = waypoints.find(id);
        require(it != waypoints.end(), Errc::bad_input,
                "unknown waypoint id " + std::to_string(id));
        return it->second;
    }

    [[nodiscard]] const std::vector<AdjEdge>& edges(WaypointId id) const {
        static const std::vector<AdjEdge> kEmpty;
        auto it = adjacency.find(id);
        return it == adjacency.end() ? kEmpty : it->second;
    }

    /// Nearest waypoint to a position (ties by smaller id); linear scan.
    [[nodiscard]] std::pair<WaypointId, double> nearest_waypoint(const Vec2& p) const {
        WaypointId best = -1;
        double best_d = std::numeric_limits<double>::max();
        for (const auto& [id, w] : waypoints) {
            double d = distance(w.position, p);
            if (d < best_d) {
                best_d = d;
                best = id;
            }
        }
        return {best, best_d};
    }

    /// Build adjacency from road order plus proximity links between different
    /// roads (< link_radius), derive road neighbor sets, and validate invariants.
    static RoadGraph assemble(std::vector<Waypoint> wps, std::vector<RoadSegment> segs,
                              double link_radius = 1.2, bool derive_neighbors = true) {
        RoadGraph g;
        for (auto& w : wps) {
            w.yaw = normalize_yaw(w.yaw);
            require(g.waypoints.emplace(w.wp_id, w).second, Errc::bad_input,
                    "duplicate waypoint id " + std::to_string(w.wp_id));
        }
        for (auto& s : segs) {
            require(s.waypoints.size() >= 2, Errc::bad_input,
                    "road " + std::to_string(s.road_id) + " needs at least 2 waypoints");
            for (WaypointId id : s.waypoints) {
                require(g.waypoints.count(id) > 0, Errc::bad_input,
                        "road references missing waypoint " + std::to_string(id));
            }
            require(g.roads.emplace(s.road_id, s).second, Errc::bad_input,
                    "duplicate road id " + std::to_string(s.road_id));
        }

        // In-road chain edges, both directions.
        for (const auto& [rid, seg] : g.roads) {
            for (std::size_t i = 1; i < seg.waypoints.size(); ++i) {
                const Waypoint& a = g.waypoints.at(seg.waypoints[i - 1]);
                const Waypoint& b = g.waypoints.at(seg.waypoints[i]);
                double d = distance(a.position, b.position);
                require(d >= 0.5 && d <= 1.5, Errc::bad_input,
                        "road " + std::to_string(rid) + ": waypoint spacing " +
                            std::to_string(d) + " outside [0.5, 1.5] m");
                g.add_edge_pair(a.wp_id, b.wp_id);
            }
        }

        // Cross-road proximity links via a coarse spatial hash.
        std::unordered_map<std::int64_t, std::vector<WaypointId>> cells;
        auto cell_of = [link_radius](const Vec2& p) {
            auto cx = static_cast<std::int64_t>(std::floor(p.x / (2.0 * link_radius)));
            auto cy = static_cast<std::int64_t>(std::floor(p.y / (2.0 * link_radius)));
            return cx * 73856093LL ^ cy * 19349663LL;
        };
        for (const auto& [id, w] : g.waypoints) cells[cell_of(w.position)].push_back(id);
        for (const auto& [ida, a] : g.waypoints) {
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                for (std::int64_t dy = -1; dy <= 1; ++dy) {
                    Vec2 probe{a.position.x + 2.0 * link_radius * static_cast<double>(dx),
                               a.position.y + 2.0 * link_radius * static_cast<double>(dy)};
                    auto it = cells.find(cell_of(probe));
                    if (it == cells.end()) continue;
                    for (WaypointId idb : it->second) {
                        if (idb <= ida) continue;
                        const Waypoint& b = g.waypoints.at(idb);
                        if (b.road_id == a.road_id) continue;
                        if (distance(a.position, b.position) <= link_radius) {
                            g.add_edge_pair(ida, idb);
                            if (derive_neighbors) {
                                g.roads.at(a.road_id).neighbors.insert(b.road_id);
                                g.roads.at(b.road_id).neighbors.insert(a.road_id);
                            }
                        }
                    }
                }
            }
        }

        for (const auto& [rid, seg] : g.roads) {
            for (RoadId n : seg.neighbors) {
                auto it = g.roads.find(n);
                require(it != g.roads.end() && it->second.neighbors.count(rid) > 0,
                        Errc::bad_input, "road neighbor relation not symmetric");
            }
        }
        for (auto& [id, edges] : g.adjacency) {
            std::sort(edges.begin(), edges.end(),
                      [](const AdjEdge& a, const AdjEdge& b) { return a.to < b.to; });
        }
        return g;
    }

    static double normalize_yaw(double yaw) {
        double r = wrap_pi(yaw);
        if (r == kPi) r = -kPi; // store as [-pi, pi)
        return r;
    }

private:
    void add_edge_pair(WaypointId a, WaypointId b) {
        const Vec2& pa = waypoints.at(a).position;
        const Vec2& pb = waypoints.at(b).position;
        double len = distance(pa, pb);
        auto& ea = adjacency[a];
        if (std::none_of(ea.begin(), ea.end(), [b](const AdjEdge& e) { return e.to == b; })) {
            ea.push_back({b, len, bearing(pa, pb)});
            adjacency[b].push_back({a, len, bearing(pb, pa)});
        }
    }
};

/// Minimum-length waypoint path between any pair drawn from two id sets.
/// Deterministic: Dijkstra ordered by (distance, waypoint id).
inline std::vector<Waypoint> shortest_route(const RoadGraph& g,
                                            const std::vector<WaypointId>& from_wps,
                                            const std::vector<WaypointId>& to_wps) {
    require(!from_wps.empty() && !to_wps.empty(), Errc::bad_input,
            "shortest_route requires gated waypoints on both cameras");
    std::set<WaypointId> targets(to_wps.begin(), to_wps.end());

    std::map<WaypointId, double> dist;
    std::map<WaypointId, WaypointId> parent;
    using QItem = std::pair<double, WaypointId>;
    std::priority_queue<QItem, std::vector<QItem>, std::greater<>> pq;
    for (WaypointId s : from_wps) {
        auto [it, fresh] = dist.emplace(s, 0.0);
        (void)it;
        if (fresh) {
            parent[s] = -1;
            pq.emplace(0.0, s);
        }
    }

    WaypointId goal = -1;
    double goal_dist = std::numeric_limits<double>::max();
    std::set<WaypointId> settled;
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (settled.count(u)) continue;
        settled.insert(u);
        if (targets.count(u) && (d < goal_dist || (d == goal_dist && u < goal))) {
            goal = u;
            goal_dist = d;
        }
        if (goal >= 0 && d > goal_dist) break;
        for (const AdjEdge& e : g.edges(u)) {
            double nd = d + e.length;
            auto it = dist.find(e.to);
            if (it == dist.end() || nd < it->second ||
                (nd == it->second && u < parent[e.to])) {
                dist[e.to] = nd;
                parent[e.to] = u;
                pq.emplace(nd, e.to);
            }
        }
    }
    require(goal >= 0, Errc::unreachable, "no route between the requested cameras");

    std::vector<Waypoint> path;
    for (WaypointId cur = goal; cur != -1; cur = parent.at(cur)) path.push_back(g.wp(cur));
    std::reverse(path.begin(), path.end());
    return path;
}

} // namespace spot
