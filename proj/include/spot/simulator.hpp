#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "spot/camera.hpp"
#include "spot/csv.hpp"
#include "spot/gates.hpp"
#include "spot/perception.hpp"
#include "spot/road_graph.hpp"

namespace spot {

/// Desk-scale grid town: streets every block_size meters, waypoints at 1 m.
/// Block size is used in whole meters.
struct TownSpec {
    int blocks_x = 4;
    int blocks_y = 4;
    double block_size = 50.0;
    std::uint64_t seed = 1;
};

inline void validate(const TownSpec& t) {
    require(t.blocks_x >= 2 && t.blocks_y >= 2, Errc::bad_input,
            "town needs at least 2 blocks per axis");
    require(t.block_size >= 20.0, Errc::bad_input, "block_size must be >= 20 m");
}

/// Grid streets partitioned into roads between adjacent intersections.
/// Horizontal roads own the lattice (intersection) waypoints; vertical roads
/// stop one meter short and connect through them via proximity adjacency.
inline RoadGraph generate_town(const TownSpec& spec) {
    validate(spec);
    const int block = static_cast<int>(std::llround(spec.block_size));
    const int nx = spec.blocks_x;
    const int ny = spec.blocks_y;

    std::vector<Waypoint> wps;
    std::vector<RoadSegment> segs;
    WaypointId next_wp = 0;
    RoadId next_road = 0;

    auto add_wp = [&](RoadId road, double x, double y, double yaw, bool inter) {
        Waypoint w;
        w.wp_id = next_wp++;
        w.road_id = road;
        w.lane_id = 0;
        w.position = {x, y};
        w.yaw = RoadGraph::normalize_yaw(yaw);
        w.is_intersection = inter;
        wps.push_back(w);
        return w.wp_id;
    };

    // Horizontal roads: block i on line j spans x in [i*B, (i+1)*B); the
    // rightmost block also owns the final lattice point.
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            RoadId road = next_road++;
            RoadSegment seg;
            seg.road_id = road;
            int x0 = i * block;
            int x1 = (i + 1) * block;
            int x_end = (i == nx - 1) ? x1 : x1 - 1;
            for (int x = x0; x <= x_end; ++x) {
                bool inter = (x % block == 0);
                seg.waypoints.push_back(add_wp(road, x, j * block, 0.0, inter));
            }
            segs.push_back(std::move(seg));
        }
    }
    // Vertical roads: interior points only, one meter clear of each lattice point.
    for (int i = 0; i <= nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            RoadId road = next_road++;
            RoadSegment seg;
            seg.road_id = road;
            int y0 = j * block + 1;
            int y1 = (j + 1) * block - 1;
            for (int y = y0; y <= y1; ++y) {
                seg.waypoints.push_back(add_wp(road, i * block, y, kPi / 2.0, false));
            }
            segs.push_back(std::move(seg));
        }
    }
    return RoadGraph::assemble(std::move(wps), std::move(segs), 1.2);
}

struct CameraPlacement {
    int count = 8;
    double height = 6.0;      // m
    double pitch_deg = -20.0;
    double fov_deg = 60.0;
    double max_range = 22.0;  // m
    int image_width = 800;
    int image_height = 600;
};

/// One camera per selected intersection, yaw cycling round-robin over the
/// incident street directions, verified pairwise non-overlapping.
inline std::vector<CameraSpec> place_cameras(const RoadGraph& graph,
                                             const CameraPlacement& placement) {
    require(placement.count >= 1, Errc::bad_input, "camera count must be >= 1");

    // Distinct intersection positions, ordered by (y, x).
    std::vector<Vec2> inters;
    for (const auto& [id, w] : graph.waypoints) {
        if (!w.is_intersection) continue;
        bool dup = false;
        for (const auto& p : inters) {
            if (distance(p, w.position) < 0.5) dup = true;
        }
        if (!dup) inters.push_back(w.position);
    }
    require(!inters.empty(), Errc::bad_input, "graph has no intersections");
    std::sort(inters.begin(), inters.end(), [](const Vec2& a, const Vec2& b) {
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    require(static_cast<int>(inters.size()) >= placement.count, Errc::bad_input,
            "fewer intersections than requested cameras");

    std::vector<CameraSpec> cams;
    std::vector<FovPolygon> fovs;
    const std::array<double, 4> yaw_cycle{0.0, 90.0, 180.0, 270.0};
    for (int k = 0; k < placement.count; ++k) {
        std::size_t idx =
            placement.count == 1
                ? 0
                : static_cast<std::size_t>(std::llround(
                      static_cast<double>(k) * static_cast<double>(inters.size() - 1) /
                      static_cast<double>(placement.count - 1)));
        Vec2 at = inters[idx];

        // incident street directions at this lattice point
        std::vector<double> incident;
        for (const auto& [id, w] : graph.waypoints) {
            if (distance(w.position, at) > 1.5 || distance(w.position, at) < 0.5) continue;
            incident.push_back(rad2deg(bearing(at, w.position)));
        }
        double yaw = yaw_cycle[static_cast<std::size_t>(k) % yaw_cycle.size()];
        if (!incident.empty()) {
            double best = incident.front();
            double best_err = 1e9;
            for (double cand : incident) {
                double err = std::abs(wrap_pi(deg2rad(cand - yaw)));
                if (err < best_err - 1e-9) {
                    best_err = err;
                    best = cand;
                }
            }
            yaw = best;
        }

        CameraSpec cam;
        cam.cctv_id = strfmt("CCTV_%02d", k);
        cam.position = {at.x, at.y, placement.height};
        cam.yaw_deg = yaw;
        cam.pitch_deg = placement.pitch_deg;
        cam.roll_deg = 0.0;
        cam.fov_deg = placement.fov_deg;
        cam.max_range = placement.max_range;
        cam.image_width = placement.image_width;
        cam.image_height = placement.image_height;

        FovPolygon fov = build_fov_polygon(cam);
        for (const auto& other : fovs) {
            require(polygons_interiors_disjoint(fov.vertices, other.vertices),
                    Errc::overlap_unavoidable,
                    cam.cctv_id + " footprint overlaps " + other.cctv_id +
                        " at the requested density");
        }
        fovs.push_back(fov);
        cams.push_back(std::move(cam));
    }
    return cams;
}

enum class EventKind { sudden_accel, sudden_brake, sharp_turn, lane_weave };

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::sudden_accel: return "SuddenAccel";
        case EventKind::sudden_brake: return "SuddenBrake";
        case EventKind::sharp_turn: return "SharpTurn";
        default: return "LaneWeave";
    }
}

struct ScenarioEvent {
    double t = 0.0;
    EventKind kind = EventKind::sudden_accel;
    double magnitude = 1.0;
};

struct ScenarioSpec {
    std::string scenario_id;
    WaypointId start_wp = 0;
    std::vector<TurnKind> route; // decisions at successive intersections
    double cruise_speed = 8.0;   // m/s
    double duration_s = 90.0;
    std::vector<ScenarioEvent> events; // time-ordered
};

inline void validate(const ScenarioSpec& s, const RoadGraph& g) {
    require(g.waypoints.count(s.start_wp) > 0, Errc::route_inconsistent,
            s.scenario_id + ": start waypoint not in graph");
    require(s.cruise_speed > 0.0 && s.duration_s > 0.0, Errc::bad_input,
            s.scenario_id + ": speed and duration must be positive");
    for (std::size_t i = 1; i < s.events.size(); ++i) {
        require(s.events[i].t >= s.events[i - 1].t, Errc::bad_input,
                s.scenario_id + ": events must be time-ordered");
    }
}

struct GroundTruthRecord {
    int frame = 0;
    double t = 0.0;
    Vec3 position; // z = 0
    double speed = 0.0;
    double heading = 0.0;
    std::vector<std::string> visible_cams; // sorted
};

namespace detail {

/// Pick the neighbor matching the desired turn relative to the current heading;
/// falls back Straight > Left > Right > back the way we came.
inline std::optional<WaypointId> pick_branch(const RoadGraph& g, WaypointId at,
                                             WaypointId prev, double heading,
                                             TurnKind desired) {
    struct Option {
        WaypointId to;
        TurnKind cls;
        double abs_angle;
    };
    std::vector<Option> options;
    for (const AdjEdge& e : g.edges(at)) {
        if (e.to == prev) continue;
        double ang = wrap_pi(e.bearing - heading);
        TurnKind cls = TurnKind::straight;
        if (std::abs(ang) > deg2rad(30.0)) {
            if (std::abs(ang) > deg2rad(150.0)) continue; // no u-turns here
            cls = ang > 0 ? TurnKind::left : TurnKind::right;
        }
        options.push_back({e.to, cls, std::abs(ang)});
    }
    if (options.empty()) return std::nullopt;
    std::sort(options.begin(), options.end(), [](const Option& a, const Option& b) {
        if (a.abs_angle != b.abs_angle) return a.abs_angle < b.abs_angle;
        return a.to < b.to;
    });
    for (const auto& o : options) {
        if (o.cls == desired) return o.to;
    }
    for (TurnKind fallback : {TurnKind::straight, TurnKind::left, TurnKind::right}) {
        for (const auto& o : options) {
            if (o.cls == fallback) return o.to;
        }
    }
    return options.front().to;
}

} // namespace detail

/// Deterministic point-vehicle rollout: follow the waypoint chain at the cruise
/// speed with trapezoidal ramps; events inject speed steps, forced turns, and
/// lateral weave. Speed is recorded as actual displacement over dt.
inline std::vector<GroundTruthRecord> simulate(const ScenarioSpec& scenario,
                                               const RoadGraph& graph,
                                               const std::vector<FovPolygon>& fovs, double dt) {
    validate(scenario, graph);
    require(dt > 0.0, Errc::bad_input, "dt must be positive");

    // Initial direction: along the start road toward its next waypoint.
    const Waypoint& start = graph.wp(scenario.start_wp);
    const RoadSegment& start_road = graph.roads.at(start.road_id);
    auto it = std::find(start_road.waypoints.begin(), start_road.waypoints.end(), start.wp_id);
    require(it != start_road.waypoints.end(), Errc::route_inconsistent,
            scenario.scenario_id + ": start waypoint not on its road");
    WaypointId prev_wp = start.wp_id;
    std::optional<WaypointId> next_wp;
    if (std::next(it) != start_road.waypoints.end()) {
        next_wp = *std::next(it);
    } else if (it != start_road.waypoints.begin()) {
        next_wp = *std::prev(it);
    }
    require(next_wp.has_value(), Errc::route_inconsistent,
            scenario.scenario_id + ": start road has no continuation");

    Vec2 pos = start.position;
    Vec2 seg_a = start.position;
    Vec2 seg_b = graph.wp(*next_wp).position;
    double heading = bearing(seg_a, seg_b);
    double seg_remaining = distance(seg_a, seg_b);

    std::size_t decision_idx = 0;
    std::optional<TurnKind> forced_turn;
    double v = 0.0;
    double v_target = scenario.cruise_speed;
    const double ramp = 2.5;       // m/s^2 cruise ramps
    const double event_ramp = 8.0; // m/s^2 during sudden events

    struct ActiveEvent {
        EventKind kind;
        double until = 0.0;
        double magnitude = 1.0;
        double t0 = 0.0;
    };
    std::vector<ActiveEvent> active;
    std::size_t next_event = 0;

    std::vector<GroundTruthRecord> out;
    const int frames = static_cast<int>(std::llround(scenario.duration_s / dt));
    Vec2 prev_pos = pos;
    bool ended = false;

    for (int frame = 0; frame < frames && !ended; ++frame) {
        double t = frame * dt;

        while (next_event < scenario.events.size() && scenario.events[next_event].t <= t) {
            const ScenarioEvent& ev = scenario.events[next_event];
            if (ev.kind == EventKind::sharp_turn) {
                forced_turn = ev.magnitude >= 0 ? TurnKind::left : TurnKind::right;
            } else {
                active.push_back({ev.kind, t + (ev.kind == EventKind::lane_weave ? 2.0 : 1.0),
                                  ev.magnitude, t});
            }
            ++next_event;
        }
        active.erase(std::remove_if(active.begin(), active.end(),
                                    [t](const ActiveEvent& e) { return t > e.until; }),
                     active.end());

        v_target = scenario.cruise_speed;
        double accel_limit = ramp;
        double weave_offset = 0.0;
        for (const auto& e : active) {
            if (e.kind == EventKind::sudden_accel || e.kind == EventKind::sudden_brake) {
                v_target = scenario.cruise_speed * e.magnitude;
                accel_limit = event_ramp;
            } else if (e.kind == EventKind::lane_weave) {
                weave_offset = e.magnitude * std::sin(2.0 * kPi * (t - e.t0) / 2.0);
            }
        }
        v += std::clamp(v_target - v, -accel_limit * dt, accel_limit * dt);

        // advance along the waypoint chain
        double travel = v * dt;
        while (travel > 0.0) {
            if (travel < seg_remaining) {
                double frac = travel / seg_remaining;
                pos = pos + (seg_b - pos) * frac;
                seg_remaining -= travel;
                travel = 0.0;
            } else {
                travel -= seg_remaining;
                pos = seg_b;
                // choose the next waypoint
                WaypointId at = *next_wp;
                const Waypoint& wp_at = graph.wp(at);
                std::optional<WaypointId> cont;
                std::vector<const AdjEdge*> onward;
                for (const AdjEdge& e : graph.edges(at)) {
                    if (e.to != prev_wp) onward.push_back(&e);
                }
                if (wp_at.is_intersection && onward.size() > 1) {
                    TurnKind desired = TurnKind::straight;
                    if (forced_turn) {
                        desired = *forced_turn;
                        forced_turn.reset();
                    } else if (decision_idx < scenario.route.size()) {
                        desired = scenario.route[decision_idx];
                    }
                    ++decision_idx;
                    cont = detail::pick_branch(graph, at, prev_wp, heading, desired);
                } else if (!onward.empty()) {
                    // follow the road: smallest turn first, deterministic ties
                    cont = detail::pick_branch(graph, at, prev_wp, heading, TurnKind::straight);
                }
                if (!cont) {
                    ended = true; // dead end; stop the rollout here
                    break;
                }
                prev_wp = at;
                next_wp = cont;
                seg_a = wp_at.position;
                seg_b = graph.wp(*cont).position;
                seg_remaining = distance(seg_a, seg_b);
                heading = bearing(seg_a, seg_b);
            }
        }
        if (ended) break;

        Vec2 normal{-std::sin(heading), std::cos(heading)};
        Vec2 recorded = pos + normal * weave_offset;

        GroundTruthRecord rec;
        rec.frame = frame;
        rec.t = t;
        rec.position = {recorded.x, recorded.y, 0.0};
        rec.speed = frame == 0 ? v : distance(recorded, prev_pos) / dt;
        rec.heading = heading;
        for (const auto& fov : fovs) {
            if (point_in_fov(fov, recorded)) rec.visible_cams.push_back(fov.cctv_id);
        }
        std::sort(rec.visible_cams.begin(), rec.visible_cams.end());
        out.push_back(std::move(rec));
        prev_pos = recorded;
    }
    return out;
}

/// Forward-project the ground-truth track into per-camera pixel observations.
/// Emits only points inside both the footprint polygon and the image rectangle.
inline std::vector<PixelObservation> project_observations(
    const std::vector<GroundTruthRecord>& gt, const std::vector<CameraSpec>& cams,
    const std::vector<FovPolygon>& fovs, int track_id = 1,
    Handedness handedness = Handedness::opencv_right) {
    std::vector<CameraModel> models;
    models.reserve(cams.size());
    for (const auto& c : cams) models.push_back(camera_model_from_spec(c, handedness));

    std::vector<PixelObservation> out;
    for (const auto& rec : gt) {
        for (std::size_t ci = 0; ci < cams.size(); ++ci) {
            if (!point_in_fov(fovs[ci], {rec.position.x, rec.position.y})) continue;
            auto px = project_world_point(models[ci], rec.position);
            if (!px) continue;
            if (px->x < 0.0 || px->x >= cams[ci].image_width || px->y < 0.0 ||
                px->y >= cams[ci].image_height) {
                continue;
            }
            PixelObservation obs;
            obs.frame = rec.frame;
            obs.t = rec.t;
            obs.cctv_id = cams[ci].cctv_id;
            obs.track_id = track_id;
            obs.u = px->x;
            obs.v = px->y;
            out.push_back(std::move(obs));
        }
    }
    return out;
}

struct Visit {
    int order = 0;
    std::string cctv_id;
    int first_frame = 0;
    int last_frame = 0;
};

using VisitSequence = std::vector<Visit>;

/// Maximal visibility runs per camera; same-camera runs separated by fewer than
/// merge_gap frames are merged, runs shorter than min_steps are discarded.
inline VisitSequence derive_visit_sequence(const std::vector<GroundTruthRecord>& gt,
                                           int min_steps = 15, int merge_gap = 3) {
    std::map<std::string, std::vector<std::pair<int, int>>> runs;
    std::map<std::string, int> open; // cctv -> first frame of the open run
    std::map<std::string, int> last_seen;

    for (const auto& rec : gt) {
        std::set<std::string> here(rec.visible_cams.begin(), rec.visible_cams.end());
        for (const auto& cam : here) {
            auto it = open.find(cam);
            if (it == open.end()) {
                auto ls = last_seen.find(cam);
                if (ls != last_seen.end() && !runs[cam].empty() &&
                    rec.frame - ls->second < merge_gap) {
                    open[cam] = runs[cam].back().first; // flicker: reopen the last run
                    runs[cam].pop_back();
                } else {
                    open[cam] = rec.frame;
                }
            }
            last_seen[cam] = rec.frame;
        }
        std::vector<std::string> to_close;
        for (const auto& [cam, first] : open) {
            if (!here.count(cam)) to_close.push_back(cam);
        }
        for (const auto& cam : to_close) {
            runs[cam].emplace_back(open[cam], last_seen[cam]);
            open.erase(cam);
        }
    }
    for (const auto& [cam, first] : open) runs[cam].emplace_back(first, last_seen[cam]);

    VisitSequence visits;
    for (const auto& [cam, list] : runs) {
        for (auto [a, b] : list) {
            if (b - a + 1 < min_steps) continue;
            visits.push_back({0, cam, a, b});
        }
    }
    std::sort(visits.begin(), visits.end(), [](const Visit& a, const Visit& b) {
        if (a.first_frame != b.first_frame) return a.first_frame < b.first_frame;
        return a.cctv_id < b.cctv_id;
    });
    for (std::size_t i = 0; i < visits.size(); ++i) visits[i].order = static_cast<int>(i);
    return visits;
}

inline void export_scenario(const std::vector<GroundTruthRecord>& gt,
                            const std::vector<PixelObservation>& obs,
                            const VisitSequence& visits, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);

    CsvWriter gt_csv(out_dir + "/gt_traj.csv");
    gt_csv.row({"frame", "t", "x", "y", "z", "speed", "heading", "visible_cams"});
    for (const auto& r : gt) {
        gt_csv.row({std::to_string(r.frame), strfmt("%.4f", r.t), strfmt("%.6f", r.position.x),
                    strfmt("%.6f", r.position.y), strfmt("%.6f", r.position.z),
                    strfmt("%.6f", r.speed), strfmt("%.6f", r.heading),
                    join(r.visible_cams, ";")});
    }
    gt_csv.close();

    CsvWriter obs_csv(out_dir + "/observations.csv");
    obs_csv.row({"frame", "t", "cctv_id", "track_id", "u", "v"});
    for (const auto& o : obs) {
        obs_csv.row({std::to_string(o.frame), strfmt("%.4f", o.t), o.cctv_id,
                     std::to_string(o.track_id), strfmt("%.6f", o.u), strfmt("%.6f", o.v)});
    }
    obs_csv.close();

    CsvWriter visits_csv(out_dir + "/visits.csv");
    visits_csv.row({"order", "cctv_id", "first_frame", "last_frame"});
    for (const auto& v : visits) {
        visits_csv.row({std::to_string(v.order), v.cctv_id, std::to_string(v.first_frame),
                        std::to_string(v.last_frame)});
    }
    visits_csv.close();
}

/// Seeded scenario fleet: starts inside camera footprints, straight-biased
/// routes, and anomaly events drawn from the four scripted kinds.
inline std::vector<ScenarioSpec> make_scenarios(const RoadGraph& /*graph*/,
                                                const std::vector<RoadCctvGate>& gates,
                                                int count, std::uint64_t seed,
                                                double duration_s = 90.0) {
    require(count >= 1, Errc::bad_input, "scenario count must be >= 1");
    std::vector<WaypointId> starts;
    std::set<WaypointId> seen;
    for (const auto& gate : gates) {
        for (WaypointId id : gate.boundary_wp_ids) {
            if (seen.insert(id).second) starts.push_back(id);
        }
    }
    require(!starts.empty(), Errc::bad_input, "no gated waypoints to start scenarios from");
    std::sort(starts.begin(), starts.end());

    std::mt19937_64 rng(seed);
    std::vector<ScenarioSpec> out;
    for (int i = 0; i < count; ++i) {
        ScenarioSpec s;
        s.scenario_id = strfmt("s%03d", i);
        s.start_wp = starts[rng() % starts.size()];
        s.cruise_speed = 5.0 + static_cast<double>(rng() % 600) / 100.0; // 5..11 m/s
        s.duration_s = duration_s;
        // leg-structured routes: hold a direction for a few blocks, then turn
        int decisions = 10 + static_cast<int>(rng() % 5);
        while (static_cast<int>(s.route.size()) < decisions) {
            int leg = 2 + static_cast<int>(rng() % 3); // 2..4 intersections straight
            for (int d = 0; d < leg; ++d) s.route.push_back(TurnKind::straight);
            s.route.push_back(rng() % 2 == 0 ? TurnKind::left : TurnKind::right);
        }
        int n_events = static_cast<int>(rng() % 3); // 0..2 anomaly events
        double t_cursor = 4.0;
        for (int e = 0; e < n_events; ++e) {
            t_cursor += 3.0 + static_cast<double>(rng() % 1200) / 100.0;
            ScenarioEvent ev;
            ev.t = t_cursor;
            switch (rng() % 4) {
                case 0:
                    ev.kind = EventKind::sudden_accel;
                    ev.magnitude = 1.3 + static_cast<double>(rng() % 40) / 100.0;
                    break;
                case 1:
                    ev.kind = EventKind::sudden_brake;
                    ev.magnitude = 0.2 + static_cast<double>(rng() % 30) / 100.0;
                    break;
                case 2:
                    ev.kind = EventKind::sharp_turn;
                    ev.magnitude = (rng() % 2 == 0) ? 1.0 : -1.0;
                    break;
                default:
                    ev.kind = EventKind::lane_weave;
                    ev.magnitude = 0.15 + static_cast<double>(rng() % 15) / 100.0;
                    break;
            }
            s.events.push_back(ev);
        }
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace spot
