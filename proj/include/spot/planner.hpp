#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <span>

#include "spot/camera.hpp"
#include "spot/gates.hpp"
#include "spot/perception.hpp"
#include "spot/reasoner.hpp"
#include "spot/road_graph.hpp"
#include "spot/strutil.hpp"

namespace spot {

/// Latent driving style: normalized 90th-percentile acceleration plus the
/// empirical distribution of recent turn events (Left, Right, Straight).
struct DriverProfile {
    double aggr = 0.5;
    std::array<double, 3> turn_intent{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

    [[nodiscard]] TurnKind intent_argmax() const {
        // ties prefer Straight, then Left, then Right
        double best = turn_intent[2];
        TurnKind kind = TurnKind::straight;
        if (turn_intent[0] > best) {
            best = turn_intent[0];
            kind = TurnKind::left;
        }
        if (turn_intent[1] > best) {
            best = turn_intent[1];
            kind = TurnKind::right;
        }
        return kind;
    }

    [[nodiscard]] double intent_prob(TurnKind k) const {
        switch (k) {
            case TurnKind::left: return turn_intent[0];
            case TurnKind::right: return turn_intent[1];
            default: return turn_intent[2];
        }
    }

    [[nodiscard]] std::string intent_label() const {
        switch (intent_argmax()) {
            case TurnKind::left: return "PREP_LEFT";
            case TurnKind::right: return "PREP_RIGHT";
            default: return "STRAIGHT";
        }
    }
};

/// Percentile by linear interpolation between order statistics.
inline double percentile(std::vector<double> v, double p) {
    require(!v.empty(), Errc::bad_input, "percentile of empty sample");
    std::sort(v.begin(), v.end());
    double rank = p / 100.0 * static_cast<double>(v.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(rank));
    double frac = rank - static_cast<double>(lo);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

inline DriverProfile driver_profile(const std::vector<double>& acc_history, double a_max,
                                    const std::vector<TurnKind>& turn_events) {
    require(a_max > 0.0, Errc::bad_input, "a_max must be positive");
    DriverProfile p;
    if (acc_history.empty()) {
        p.aggr = 0.5;
    } else {
        std::vector<double> abs_acc;
        abs_acc.reserve(acc_history.size());
        for (double a : acc_history) abs_acc.push_back(std::abs(a));
        p.aggr = std::clamp(percentile(std::move(abs_acc), 90.0) / a_max, 0.0, 1.0);
    }
    // Laplace-smoothed turn-event frequencies
    std::array<double, 3> counts{0.0, 0.0, 0.0};
    for (TurnKind t : turn_events) counts[static_cast<std::size_t>(t)] += 1.0;
    double total = static_cast<double>(turn_events.size()) + 3.0;
    for (std::size_t i = 0; i < 3; ++i) p.turn_intent[i] = (counts[i] + 1.0) / total;
    return p;
}

struct BeamConfig {
    int width = 5;             // beam width B
    int depth = 12;            // expansion rounds K
    double step_dt = 1.0;      // seconds per expansion
    double eta = 2.0;          // feasibility tolerance
    double w_d = 1.0;          // direction weight
    double w_s = 1.0;          // speed weight
    double kappa_curv = 0.8;   // curvature penalty gain
    double gamma = 1.0;        // speed coupling in the curvature penalty
    double v_ref = 8.0;        // m/s, typical urban average
    double sigma_spd = 0.5;    // speed kernel width
    double delta_fusion = 1.0; // log-odds gain
    double p_floor = 0.01;     // symmetric clipping for fused probabilities
    double min_dwell_s = 0.5;  // handoff admission gate
    int min_fov_steps = 15;    // admission gate in simulation steps, when dt known
    double snap_radius = 10.0; // start waypoint search radius
    double turn_angle_thresh = deg2rad(15.0); // step turn classification
};

inline void validate(const BeamConfig& c) {
    require(c.width > 0 && c.depth > 0 && c.step_dt > 0 && c.eta > 0 && c.v_ref > 0 &&
                c.sigma_spd > 0 && c.min_dwell_s > 0 && c.snap_radius > 0,
            Errc::bad_input, "beam config values must be positive");
    require(c.p_floor > 0.0 && c.p_floor < 0.5, Errc::bad_input, "p_floor must be in (0, 0.5)");
}

/// Kinematically predicted travel distance for one expansion, floored at zero.
inline double predicted_distance(double v, double a_eff, double dt) {
    require(dt > 0.0, Errc::bad_input, "dt must be positive");
    return std::max(0.0, v * dt + 0.5 * a_eff * dt * dt);
}

inline bool feasible(double dist_map, double d_pred, double eta) {
    require(eta > 0.0, Errc::bad_input, "eta must be positive");
    return dist_map <= d_pred * eta;
}

/// Gaussian kernel on the relative distance error; zero when nothing can move.
inline double score_speed(double d_map, double d_pred, double sigma) {
    if (d_pred <= 0.0) return 0.0;
    double eps = std::abs(d_map - d_pred) / d_pred;
    double q = eps / sigma;
    return std::exp(-q * q);
}

inline double score_direction(double heading, double edge_bearing) {
    return (1.0 + std::cos(wrap_pi(edge_bearing - heading))) / 2.0;
}

/// Turn penalty grows with speed and is mitigated for aggressive drivers.
inline double curvature_penalty(double theta, double v, const DriverProfile& profile,
                                const BeamConfig& cfg) {
    double kappa_eff = cfg.kappa_curv * (1.0 - 0.5 * profile.aggr);
    return kappa_eff * theta * (1.0 + cfg.gamma * v / cfg.v_ref);
}

inline double symbolic_score(double s_dir, double s_spd, double s_curv, const BeamConfig& cfg) {
    return cfg.w_d * s_dir + cfg.w_s * s_spd - s_curv;
}

/// Log-odds-style fusion term; zero at the neutral point p = 0.5.
inline double llm_delta(double p, const BeamConfig& cfg) {
    double clipped = std::clamp(p, cfg.p_floor, 1.0 - cfg.p_floor);
    return cfg.delta_fusion * std::log(clipped / 0.5);
}

struct TraceRecord {
    int step = 0;
    double base = 0.0;
    double llm_raw = 0.0;
    double llm_term = 0.0;
    double total = 0.0;
    double mom = 0.0;
    double dir = 0.0;
    double spd = 0.0;
    double rule = 1.0;
    std::string reason;
};

struct BeamHypothesis {
    std::vector<WaypointId> path;
    double score = 0.0;
    double v_cur = 0.0;
    double heading = 0.0;
    TurnKind active_turn = TurnKind::straight;
    bool frozen = false;
    std::vector<TraceRecord> trace;
};

inline bool beam_order(const BeamHypothesis& a, const BeamHypothesis& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.path < b.path;
}

/// Beam-search start state; a trimmed view of ExitState plus profile inputs.
struct PlanStart {
    Vec2 position;
    double heading = 0.0;
    double v_med = 0.0;
    double a_eff = 0.0;
};

inline PlanStart plan_start_from_exit(const ExitState& e) {
    return {e.exit_position, e.heading, e.v_med, e.a_eff};
}

/// Physically pruned beam search over waypoint adjacency. Paths never revisit a
/// waypoint; the reasoner is consulted only at intersections with more than one
/// surviving branch (one batched call per decision point); hypotheses that cannot
/// expand are carried forward frozen.
inline std::vector<BeamHypothesis> beam_search(const PlanStart& start, const RoadGraph& graph,
                                               const DriverProfile& profile,
                                               const BeamConfig& cfg, Reasoner& reasoner) {
    validate(cfg);
    auto [start_wp, start_dist] = graph.nearest_waypoint(start.position);
    require(start_wp >= 0 && start_dist <= cfg.snap_radius, Errc::no_start_waypoint,
            "no graph waypoint within snap radius of the exit position");

    BeamHypothesis root;
    root.path = {start_wp};
    root.score = 0.0;
    root.v_cur = start.v_med;
    root.heading = start.heading;
    std::vector<BeamHypothesis> beam{root};

    for (int step = 1; step <= cfg.depth; ++step) {
        std::vector<BeamHypothesis> candidates;
        bool expanded_any = false;

        for (const auto& h : beam) {
            if (h.frozen) {
                candidates.push_back(h);
                continue;
            }
            WaypointId u = h.path.back();
            double d_pred = predicted_distance(h.v_cur, start.a_eff, cfg.step_dt);

            struct Branch {
                const AdjEdge* edge;
                double turn_angle; // rad, signed, positive left
            };
            std::vector<Branch> branches;
            for (const AdjEdge& e : graph.edges(u)) {
                if (std::find(h.path.begin(), h.path.end(), e.to) != h.path.end()) continue;
                if (!feasible(e.length, d_pred, cfg.eta)) continue;
                branches.push_back({&e, wrap_pi(e.bearing - h.heading)});
            }

            if (branches.empty()) {
                BeamHypothesis frozen = h;
                frozen.frozen = true;
                candidates.push_back(std::move(frozen));
                continue;
            }
            expanded_any = true;

            std::map<WaypointId, std::pair<double, std::string>> llm; // id -> (p, reason)
            bool consult = graph.wp(u).is_intersection && branches.size() > 1;
            if (consult) {
                BranchQuery q;
                q.aggr = profile.aggr;
                q.turn_intent_label = profile.intent_label();
                q.turn_intent_prob = profile.intent_prob(profile.intent_argmax());
                q.speed_m_s = h.v_cur;
                q.location = graph.wp(u).position;
                for (const auto& br : branches) {
                    BranchInfo info;
                    info.id = br.edge->to;
                    info.turn_angle_deg = rad2deg(br.turn_angle);
                    if (graph.wp(br.edge->to).is_intersection) {
                        info.semantic_tags.push_back("Intersection");
                    }
                    info.feasible = true;
                    q.branches.push_back(std::move(info));
                }
                BranchJudgment judgment = reasoner.judge_branches(q);
                validate_judgment(q, judgment);
                for (const auto& b : judgment.branches) llm[b.id] = {b.score, b.reason};
            }

            for (const auto& br : branches) {
                double s_dir = score_direction(h.heading, br.edge->bearing);
                double s_spd = score_speed(br.edge->length, d_pred, cfg.sigma_spd);
                double s_curv =
                    curvature_penalty(std::abs(br.turn_angle), h.v_cur, profile, cfg);
                double base = symbolic_score(s_dir, s_spd, s_curv, cfg);

                double llm_raw = 0.0;
                double llm_term = 0.0;
                std::string reason;
                if (consult) {
                    auto it = llm.find(br.edge->to);
                    llm_raw = it->second.first;
                    llm_term = llm_delta(llm_raw, cfg);
                    reason = it->second.second;
                }

                TurnKind step_turn = TurnKind::straight;
                if (br.turn_angle > cfg.turn_angle_thresh) step_turn = TurnKind::left;
                if (br.turn_angle < -cfg.turn_angle_thresh) step_turn = TurnKind::right;
                double mom = step_turn == TurnKind::straight
                                 ? 0.5
                                 : (step_turn == h.active_turn ? 1.0 : 0.0);

                BeamHypothesis next = h;
                next.path.push_back(br.edge->to);
                next.score = h.score + base + llm_term;
                next.heading = br.edge->bearing;
                if (step_turn != TurnKind::straight) next.active_turn = step_turn;

                TraceRecord rec;
                rec.step = step;
                rec.base = base;
                rec.llm_raw = llm_raw;
                rec.llm_term = llm_term;
                rec.total = base + llm_term;
                rec.mom = mom;
                rec.dir = s_dir;
                rec.spd = s_spd;
                rec.rule = 1.0;
                rec.reason = reason;
                next.trace.push_back(std::move(rec));
                candidates.push_back(std::move(next));
            }
        }

        std::sort(candidates.begin(), candidates.end(), beam_order);
        if (candidates.size() > static_cast<std::size_t>(cfg.width)) {
            candidates.resize(static_cast<std::size_t>(cfg.width));
        }
        beam = std::move(candidates);
        if (!expanded_any) break;
    }
    std::sort(beam.begin(), beam.end(), beam_order);
    return beam;
}

/// Total polyline length inside a camera footprint.
inline double fov_overlap_length(std::span<const Vec2> path, const FovPolygon& fov) {
    require(path.size() >= 2, Errc::bad_input, "overlap needs a polyline of >= 2 points");
    return polyline_overlap_length(path, fov.vertices);
}

/// Per-segment dwell integral: sum over segments of (length inside) / v_i.
/// Collapses to overlap_length / v under uniform speed.
inline double dwell_time(std::span<const Vec2> path, const FovPolygon& fov,
                         std::span<const double> segment_speeds) {
    require(path.size() >= 2, Errc::bad_input, "dwell needs a polyline of >= 2 points");
    require(segment_speeds.size() == path.size() - 1, Errc::bad_input,
            "need one speed per path segment");
    for (double v : segment_speeds) {
        require(v > 0.0, Errc::zero_speed, "segment speeds must be positive");
    }
    double total = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        std::array<Vec2, 2> seg{path[i - 1], path[i]};
        total += polyline_overlap_length(seg, fov.vertices) / segment_speeds[i - 1];
    }
    return total;
}

struct HandoffCandidate {
    std::string cctv_id;
    double l_ov = 0.0;
    double t_dwell = 0.0;
    double eta_s = 0.0;
    double entry_angle_deg = 0.0; // acute angle vs the crossed footprint edge; 90 = perpendicular
    double speed_m_s = 0.0;
    double score = 0.0;
};

/// Built-in handoff fitness; a reasoner implementing camera scoring replaces it.
inline double score_handoff(const HandoffCandidate& c, const BeamConfig&) {
    return HeuristicReasoner::handoff_rule_score(
        {c.cctv_id, c.eta_s, c.t_dwell, c.entry_angle_deg, c.speed_m_s});
}

namespace detail {

inline double entry_angle_deg(std::span<const Vec2> path, const PolygonPoints& poly,
                              const PolyRun& run) {
    int seg = std::max(0, run.entry_segment);
    Vec2 d = (path[static_cast<std::size_t>(seg) + 1] - path[static_cast<std::size_t>(seg)])
                 .normalized();
    Vec2 edge_dir;
    if (run.entry_edge >= 0) {
        const Vec2& a = poly[static_cast<std::size_t>(run.entry_edge)];
        const Vec2& b = poly[(static_cast<std::size_t>(run.entry_edge) + 1) % poly.size()];
        edge_dir = (b - a).normalized();
    } else {
        // run begins on the path start: measure against the nearest footprint edge
        double best = std::numeric_limits<double>::max();
        for (std::size_t e = 0; e < poly.size(); ++e) {
            const Vec2& a = poly[e];
            const Vec2& b = poly[(e + 1) % poly.size()];
            Vec2 mid = (a + b) * 0.5;
            double dist = distance(mid, run.entry_point);
            if (dist < best) {
                best = dist;
                edge_dir = (b - a).normalized();
            }
        }
    }
    double c = std::clamp(std::abs(d.dot(edge_dir)), 0.0, 1.0);
    return rad2deg(std::acos(c));
}

} // namespace detail

/// Cameras whose footprint the path crosses long enough to matter. The source
/// camera is re-admitted only when the path re-enters its footprint after
/// leaving it; sim_dt > 0 additionally enforces the minimum-steps gate.
inline std::vector<HandoffCandidate> handoff_candidates(
    std::span<const Vec2> path, const std::vector<FovPolygon>& fovs, const ExitState& exit,
    const std::string& source_cam, const BeamConfig& cfg, double sim_dt = 0.0) {
    std::vector<HandoffCandidate> out;
    if (path.size() < 2 || exit.v_med <= 1e-6) return out;

    for (const auto& fov : fovs) {
        auto runs = polyline_polygon_runs(path, fov.vertices);
        if (fov.cctv_id == source_cam) {
            runs.erase(std::remove_if(runs.begin(), runs.end(),
                                      [](const PolyRun& r) { return r.begins_at_path_start; }),
                       runs.end());
        }
        if (runs.empty()) continue;

        HandoffCandidate c;
        c.cctv_id = fov.cctv_id;
        for (const auto& r : runs) c.l_ov += r.s_end - r.s_begin;
        c.speed_m_s = exit.v_med;
        c.t_dwell = c.l_ov / exit.v_med;
        c.eta_s = runs.front().s_begin / exit.v_med;
        c.entry_angle_deg = detail::entry_angle_deg(path, fov.vertices, runs.front());

        if (c.t_dwell < cfg.min_dwell_s) continue;
        if (sim_dt > 0.0 && c.t_dwell < static_cast<double>(cfg.min_fov_steps) * sim_dt) continue;
        c.score = score_handoff(c, cfg);
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const HandoffCandidate& a, const HandoffCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.cctv_id < b.cctv_id;
    });
    return out;
}

struct PlanResult {
    std::vector<Waypoint> best_path;
    std::vector<BeamHypothesis> hypotheses;
    std::vector<HandoffCandidate> candidates;
    std::optional<std::string> next_cam;
    std::vector<TraceRecord> trace; // of the best hypothesis
};

inline PlanResult plan(const ExitState& exit, const RoadGraph& graph,
                       const std::vector<FovPolygon>& fovs, const DriverProfile& profile,
                       const BeamConfig& cfg, Reasoner& reasoner, double sim_dt = 0.0) {
    PlanResult result;
    result.hypotheses = beam_search(plan_start_from_exit(exit), graph, profile, cfg, reasoner);
    const BeamHypothesis& best = result.hypotheses.front();
    for (WaypointId id : best.path) result.best_path.push_back(graph.wp(id));
    result.trace = best.trace;

    std::vector<Vec2> polyline;
    polyline.reserve(result.best_path.size());
    for (const auto& w : result.best_path) polyline.push_back(w.position);
    result.candidates = handoff_candidates(polyline, fovs, exit, exit.cctv_id, cfg, sim_dt);

    if (!result.candidates.empty()) {
        HandoffQuery q;
        for (const auto& c : result.candidates) {
            q.candidates.push_back({c.cctv_id, c.eta_s, c.t_dwell, c.entry_angle_deg,
                                    c.speed_m_s});
        }
        HandoffJudgment judgment = reasoner.score_cameras(q);
        if (judgment.authoritative && judgment.scores.size() == result.candidates.size()) {
            std::map<std::string, double> by_id;
            for (const auto& s : judgment.scores) by_id[s.id] = s.score;
            bool total = true;
            for (const auto& c : result.candidates) total = total && by_id.count(c.cctv_id) > 0;
            if (total) {
                for (auto& c : result.candidates) c.score = by_id.at(c.cctv_id);
                std::sort(result.candidates.begin(), result.candidates.end(),
                          [](const HandoffCandidate& a, const HandoffCandidate& b) {
                              if (a.score != b.score) return a.score > b.score;
                              return a.cctv_id < b.cctv_id;
                          });
            }
        }
        result.next_cam = result.candidates.front().cctv_id;
    }
    return result;
}

/// Human-readable per-step score decomposition of a hypothesis trace.
inline std::string render_trace_text(const std::vector<TraceRecord>& trace) {
    std::string out;
    for (const auto& r : trace) {
        out += strfmt("Step: %d\n", r.step);
        out += " [SCORE_COMP]\n";
        out += strfmt(" Base: %.4f | LLM Raw: %.2f\n", r.base, r.llm_raw);
        out += strfmt(" LLM_Term: %.4f | Total: %.4f\n", r.llm_term, r.total);
        out += "\n";
        out += strfmt("MOM: %.4f | DIR: %.4f | SPD: %.4f | RULE: %.4f\n", r.mom, r.dir, r.spd,
                      r.rule);
        out += " Reason:\n";
        out += " " + (r.reason.empty() ? std::string("(heuristic only)") : r.reason) + "\n\n";
    }
    return out;
}

} // namespace spot
