#pragma once

#include <random>
#include <vector>

#include "spot/planner.hpp"
#include "spot/road_graph.hpp"

namespace spot::test {

/// Graph built by hand for search tests (bypasses road spacing validation).
struct GraphBuilder {
    RoadGraph g;

    GraphBuilder() {
        RoadSegment seg;
        seg.road_id = 0;
        g.roads[0] = seg;
    }

    WaypointId node(WaypointId id, double x, double y, bool intersection = false) {
        Waypoint w;
        w.wp_id = id;
        w.road_id = 0;
        w.position = {x, y};
        w.is_intersection = intersection;
        g.waypoints[id] = w;
        g.roads[0].waypoints.push_back(id);
        return id;
    }

    void edge(WaypointId a, WaypointId b) {
        const Vec2& pa = g.waypoints.at(a).position;
        const Vec2& pb = g.waypoints.at(b).position;
        double len = distance(pa, pb);
        g.adjacency[a].push_back({b, len, bearing(pa, pb)});
        g.adjacency[b].push_back({a, len, bearing(pb, pa)});
    }

    RoadGraph take() {
        for (auto& [id, edges] : g.adjacency) {
            std::sort(edges.begin(), edges.end(),
                      [](const AdjEdge& x, const AdjEdge& y) { return x.to < y.to; });
        }
        return std::move(g);
    }
};

/// One-road corridor along +x with 1 m spacing, waypoint ids 0..n-1.
inline RoadGraph corridor_graph(int n) {
    GraphBuilder b;
    for (int i = 0; i < n; ++i) b.node(i, static_cast<double>(i), 0.0);
    for (int i = 1; i < n; ++i) b.edge(i - 1, i);
    return b.take();
}

/// Exhaustive simple-path enumeration scored exactly like the beam search with a
/// neutral reasoner: the independent argmax oracle for beam equivalence checks.
struct EnumeratedPath {
    std::vector<WaypointId> path;
    double score = 0.0;
};

inline void enumerate_paths_rec(const RoadGraph& g, const PlanStart& start,
                                const DriverProfile& profile, const BeamConfig& cfg,
                                std::vector<WaypointId>& path, double score, double heading,
                                int depth, std::vector<EnumeratedPath>& out) {
    if (depth == cfg.depth) {
        out.push_back({path, score});
        return;
    }
    double d_pred = predicted_distance(start.v_med, start.a_eff, cfg.step_dt);
    bool extended = false;
    for (const AdjEdge& e : g.edges(path.back())) {
        if (std::find(path.begin(), path.end(), e.to) != path.end()) continue;
        if (!feasible(e.length, d_pred, cfg.eta)) continue;
        extended = true;
        double s_dir = score_direction(heading, e.bearing);
        double s_spd = score_speed(e.length, d_pred, cfg.sigma_spd);
        double s_curv =
            curvature_penalty(std::abs(wrap_pi(e.bearing - heading)), start.v_med, profile, cfg);
        double base = symbolic_score(s_dir, s_spd, s_curv, cfg);
        path.push_back(e.to);
        enumerate_paths_rec(g, start, profile, cfg, path, score + base, e.bearing, depth + 1,
                            out);
        path.pop_back();
    }
    if (!extended) out.push_back({path, score});
}

inline std::vector<EnumeratedPath> enumerate_paths(const RoadGraph& g, const PlanStart& start,
                                                   const DriverProfile& profile,
                                                   const BeamConfig& cfg) {
    auto [wp, dist] = g.nearest_waypoint(start.position);
    std::vector<WaypointId> path{wp};
    std::vector<EnumeratedPath> out;
    enumerate_paths_rec(g, start, profile, cfg, path, 0.0, start.heading, 0, out);
    std::sort(out.begin(), out.end(), [](const EnumeratedPath& a, const EnumeratedPath& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.path < b.path;
    });
    return out;
}

/// Random connected graph with <= max_nodes nodes for search stress tests.
inline RoadGraph random_graph(std::mt19937_64& rng, int max_nodes) {
    int n = 6 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_nodes - 5));
    GraphBuilder b;
    std::vector<Vec2> pos;
    for (int i = 0; i < n; ++i) {
        Vec2 p{static_cast<double>(rng() % 600) / 10.0, static_cast<double>(rng() % 600) / 10.0};
        pos.push_back(p);
        b.node(i, p.x, p.y, (rng() % 3) == 0);
    }
    std::set<std::pair<WaypointId, WaypointId>> edges;
    for (int i = 1; i < n; ++i) { // spanning tree
        auto j = static_cast<WaypointId>(rng() % static_cast<std::uint64_t>(i));
        edges.emplace(j, i);
    }
    int extra = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    for (int k = 0; k < extra; ++k) {
        auto a = static_cast<WaypointId>(rng() % static_cast<std::uint64_t>(n));
        auto c = static_cast<WaypointId>(rng() % static_cast<std::uint64_t>(n));
        if (a == c) continue;
        edges.emplace(std::min(a, c), std::max(a, c));
    }
    for (auto [a, c] : edges) {
        if (distance(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(c)]) < 1e-6) {
            continue;
        }
        b.edge(a, c);
    }
    return b.take();
}

inline double urand(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() % 1000000) / 1000000.0);
}

/// Random convex polygon around a center (vertices on a jittered circle).
inline PolygonPoints random_convex_polygon(std::mt19937_64& rng, const Vec2& center,
                                           double radius) {
    int n = 5 + static_cast<int>(rng() % 4);
    std::vector<double> angles;
    for (int i = 0; i < n; ++i) angles.push_back(urand(rng, 0.0, 2.0 * kPi));
    std::sort(angles.begin(), angles.end());
    PolygonPoints poly;
    for (double a : angles) {
        double r = radius * urand(rng, 0.6, 1.0);
        poly.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
    }
    ensure_ccw(poly);
    return poly;
}

} // namespace spot::test
