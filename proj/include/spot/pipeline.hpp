#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "spot/config.hpp"
#include "spot/csv.hpp"
#include "spot/documents.hpp"
#include "spot/eval.hpp"
#include "spot/map_io.hpp"
#include "spot/perception.hpp"
#include "spot/planner.hpp"
#include "spot/retrieval.hpp"
#include "spot/simulator.hpp"

namespace spot {

namespace fs = std::filesystem;

/// Everything derived from a map: graph, cameras, footprints, gates, zones.
struct MapBundle {
    RoadGraph graph;
    std::vector<CameraSpec> cams;
    std::vector<CameraModel> models;
    std::vector<FovPolygon> fovs;
    std::vector<RoadCctvGate> gates;
    std::vector<Zone> zones;

    [[nodiscard]] const FovPolygon& fov(const std::string& cctv_id) const {
        for (const auto& f : fovs) {
            if (f.cctv_id == cctv_id) return f;
        }
        raise(Errc::bad_input, "unknown camera " + cctv_id);
    }

    [[nodiscard]] const CameraModel& model(const std::string& cctv_id) const {
        for (const auto& m : models) {
            if (m.cctv_id == cctv_id) return m;
        }
        raise(Errc::bad_input, "unknown camera " + cctv_id);
    }
};

inline MapBundle build_map_bundle(RoadGraph graph, std::vector<CameraSpec> cams) {
    MapBundle b;
    b.graph = std::move(graph);
    b.cams = std::move(cams);
    for (const auto& c : b.cams) {
        b.models.push_back(camera_model_from_spec(c));
        b.fovs.push_back(build_fov_polygon(c));
    }
    b.gates = compute_gates(b.graph, b.fovs);
    b.zones = build_zones(b.graph, b.gates, b.cams);
    return b;
}

inline MapBundle load_map_bundle(const std::string& out_dir) {
    MapFile town = load_map(out_dir + "/town.json");
    MapFile cams = load_map(out_dir + "/cameras.json");
    return build_map_bundle(std::move(town.graph), std::move(cams.cameras));
}

namespace detail {

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), Errc::io_error, "cannot open " + path + " for writing");
    out << content;
    require(out.good(), Errc::io_error, "write failed: " + path);
}

inline nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Errc::io_error, "cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        raise(Errc::bad_input, path + ": " + e.what());
    }
    return j;
}

/// Run fn(i) for i in [0, n) over a small worker pool; exceptions rethrown.
template <typename Fn>
void parallel_for(int n, int jobs, Fn fn) {
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

inline std::string scenario_dir(const Config& cfg, const std::string& scenario_id) {
    return cfg.output_dir + "/scenarios/" + scenario_id;
}

} // namespace detail

// ---------------------------------------------------------------------------
// sim

inline nlohmann::json scenario_to_json(const ScenarioSpec& s) {
    nlohmann::json ev = nlohmann::json::array();
    for (const auto& e : s.events) {
        ev.push_back({{"t", e.t}, {"kind", to_string(e.kind)}, {"magnitude", e.magnitude}});
    }
    nlohmann::json route = nlohmann::json::array();
    for (TurnKind t : s.route) route.push_back(to_string(t));
    return {{"scenario_id", s.scenario_id}, {"start_wp", s.start_wp},
            {"route", route},             {"cruise_speed", s.cruise_speed},
            {"duration_s", s.duration_s}, {"events", ev}};
}

inline ScenarioSpec scenario_from_json(const nlohmann::json& j) {
    ScenarioSpec s;
    s.scenario_id = j.at("scenario_id").get<std::string>();
    s.start_wp = j.at("start_wp").get<WaypointId>();
    for (const auto& r : j.at("route")) {
        std::string v = r.get<std::string>();
        s.route.push_back(v == "Left" ? TurnKind::left
                                      : v == "Right" ? TurnKind::right : TurnKind::straight);
    }
    s.cruise_speed = j.at("cruise_speed").get<double>();
    s.duration_s = j.at("duration_s").get<double>();
    for (const auto& e : j.at("events")) {
        ScenarioEvent ev;
        ev.t = e.at("t").get<double>();
        std::string kind = e.at("kind").get<std::string>();
        if (kind == "SuddenAccel") ev.kind = EventKind::sudden_accel;
        else if (kind == "SuddenBrake") ev.kind = EventKind::sudden_brake;
        else if (kind == "SharpTurn") ev.kind = EventKind::sharp_turn;
        else ev.kind = EventKind::lane_weave;
        ev.magnitude = e.at("magnitude").get<double>();
        s.events.push_back(ev);
    }
    return s;
}

inline void run_sim(const Config& cfg, int jobs = 1) {
    fs::create_directories(cfg.output_dir);
    RoadGraph graph = generate_town(cfg.town);
    std::vector<CameraSpec> cams = place_cameras(graph, cfg.cameras);
    MapBundle bundle = build_map_bundle(std::move(graph), std::move(cams));

    save_map(cfg.output_dir + "/town.json", bundle.graph, {});
    {
        nlohmann::json j;
        j["waypoints"] = nlohmann::json::array();
        j["roads"] = nlohmann::json::array();
        j["cameras"] = nlohmann::json::array();
        for (const auto& c : bundle.cams) j["cameras"].push_back(to_json(c));
        detail::write_text(cfg.output_dir + "/cameras.json", j.dump(2) + "\n");
    }

    std::vector<ScenarioSpec> scenarios = make_scenarios(
        bundle.graph, bundle.gates, cfg.scenarios.count, cfg.scenarios.seed,
        cfg.scenarios.duration_s);
    {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& s : scenarios) j.push_back(scenario_to_json(s));
        detail::write_text(cfg.output_dir + "/scenarios.json", j.dump(2) + "\n");
    }

    detail::parallel_for(static_cast<int>(scenarios.size()), jobs, [&](int i) {
        const ScenarioSpec& s = scenarios[static_cast<std::size_t>(i)];
        auto gt = simulate(s, bundle.graph, bundle.fovs, cfg.scenarios.dt);
        auto obs = project_observations(gt, bundle.cams, bundle.fovs, /*track_id=*/1);
        auto visits = derive_visit_sequence(gt, /*min_steps=*/cfg.beam.min_fov_steps);
        export_scenario(gt, obs, visits, detail::scenario_dir(cfg, s.scenario_id));
    });
}

// ---------------------------------------------------------------------------
// mapdoc

inline void run_mapdoc(const Config& cfg) {
    MapBundle bundle = load_map_bundle(cfg.output_dir);
    auto docs = generate_documents(bundle.graph, bundle.gates, bundle.zones, bundle.cams,
                                   bundle.fovs);

    std::string text;
    for (const auto& d : docs) text += d.text + "\n";
    detail::write_text(cfg.output_dir + "/documents.txt", text);

    nlohmann::json sigs = nlohmann::json::array();
    for (const auto& d : docs) {
        MinHashSignature sig = minhash(d.text, cfg.retrieval.minhash_cfg());
        sigs.push_back({{"doc_id", d.doc_id},
                        {"seed", sig.seed},
                        {"k", sig.shingle_k},
                        {"L", sig.length},
                        {"slots", sig.slots}});
    }
    detail::write_text(cfg.output_dir + "/signatures.json", sigs.dump() + "\n");

    nlohmann::json meta = nlohmann::json::array();
    for (const auto& d : docs) {
        meta.push_back({{"doc_id", d.doc_id},
                        {"subject_ids", d.subject_ids},
                        {"bbox", {d.bbox.lo.x, d.bbox.lo.y, d.bbox.hi.x, d.bbox.hi.y}}});
    }
    detail::write_text(cfg.output_dir + "/documents_meta.json", meta.dump() + "\n");
}

// ---------------------------------------------------------------------------
// track

/// One observation segment fully inside a camera view, plus profiling inputs.
struct TrackExit {
    ExitState exit;
    int first_frame = 0;
    int last_frame = 0;
    std::vector<double> acc_history;
    std::vector<TurnKind> turn_events;
};

inline nlohmann::json exit_to_json(const TrackExit& e) {
    nlohmann::json dirs = nlohmann::json::array();
    for (Dir8 d : e.exit.dir8_recent) dirs.push_back(to_string(d));
    nlohmann::json turns = nlohmann::json::array();
    for (TurnKind t : e.turn_events) turns.push_back(to_string(t));
    return {{"cctv_id", e.exit.cctv_id},
            {"exit_position", {e.exit.exit_position.x, e.exit.exit_position.y}},
            {"exit_time", e.exit.exit_time},
            {"v_med", e.exit.v_med},
            {"a_eff", e.exit.a_eff},
            {"heading", e.exit.heading},
            {"heading_valid", e.exit.heading_valid},
            {"window_len", e.exit.window_len},
            {"dir8_recent", dirs},
            {"first_frame", e.first_frame},
            {"last_frame", e.last_frame},
            {"acc_history", e.acc_history},
            {"turn_events", turns}};
}

inline TrackExit exit_from_json(const nlohmann::json& j) {
    TrackExit e;
    e.exit.cctv_id = j.at("cctv_id").get<std::string>();
    e.exit.exit_position = {j.at("exit_position").at(0).get<double>(),
                            j.at("exit_position").at(1).get<double>()};
    e.exit.exit_time = j.at("exit_time").get<double>();
    e.exit.v_med = j.at("v_med").get<double>();
    e.exit.a_eff = j.at("a_eff").get<double>();
    e.exit.heading = j.at("heading").get<double>();
    e.exit.heading_valid = j.at("heading_valid").get<bool>();
    e.exit.window_len = j.at("window_len").get<int>();
    for (const auto& d : j.at("dir8_recent")) {
        if (auto dir = dir8_from_string(d.get<std::string>())) e.exit.dir8_recent.push_back(*dir);
    }
    e.first_frame = j.at("first_frame").get<int>();
    e.last_frame = j.at("last_frame").get<int>();
    e.acc_history = j.at("acc_history").get<std::vector<double>>();
    for (const auto& t : j.at("turn_events")) {
        std::string v = t.get<std::string>();
        e.turn_events.push_back(v == "Left" ? TurnKind::left
                                            : v == "Right" ? TurnKind::right
                                                           : TurnKind::straight);
    }
    return e;
}

/// Collapse per-frame turn labels into events: one per run of >= min_run frames.
inline std::vector<TurnKind> turn_events_from_states(const std::vector<KinematicState>& states,
                                                     int min_run = 3) {
    std::vector<TurnKind> events;
    TurnKind cur = TurnKind::straight;
    int run = 0;
    for (const auto& s : states) {
        if (s.turn == cur) {
            ++run;
        } else {
            if (run >= min_run) events.push_back(cur);
            cur = s.turn;
            run = 1;
        }
    }
    if (run >= min_run) events.push_back(cur);
    return events;
}

/// Perception over one scenario's observations: world tracks plus exit events.
struct TrackOutput {
    std::vector<std::tuple<double, int, WorldSample>> world_rows; // (t, track_id, sample)
    std::vector<TrackExit> exits;
};

inline TrackOutput run_track_scenario(const std::vector<PixelObservation>& observations,
                                      const MapBundle& bundle, const PerceptionConfig& pcfg) {
    TrackOutput out;

    // group per (cctv, track), split on frame gaps
    std::map<std::pair<std::string, int>, std::vector<PixelObservation>> grouped;
    for (const auto& o : observations) grouped[{o.cctv_id, o.track_id}].push_back(o);

    for (auto& [key, track] : grouped) {
        std::sort(track.begin(), track.end(),
                  [](const PixelObservation& a, const PixelObservation& b) {
                      return a.frame < b.frame;
                  });
        std::vector<std::vector<PixelObservation>> segments;
        for (const auto& o : track) {
            if (segments.empty() || o.frame - segments.back().back().frame > 2) {
                segments.emplace_back();
            }
            segments.back().push_back(o);
        }

        const CameraModel& model = bundle.model(key.first);
        const CameraSpec* spec = nullptr;
        for (const auto& c : bundle.cams) {
            if (c.cctv_id == key.first) spec = &c;
        }
        double theta_cam = deg2rad(spec->yaw_deg);

        for (const auto& segment : segments) {
            if (static_cast<int>(segment.size()) < pcfg.min_track_frames) continue;
            auto samples = pixel_track_to_world(segment, model);
            for (std::size_t i = 0; i < samples.size(); ++i) {
                out.world_rows.emplace_back(samples[i].t, key.second, samples[i]);
            }
            auto states = estimate_kinematics(samples, theta_cam, pcfg.thresholds);

            TrackExit exit_event;
            exit_event.exit = summarize_exit_state(states, key.first, pcfg.exit_window,
                                                   pcfg.a_max, pcfg.thresholds);
            exit_event.first_frame = segment.front().frame;
            exit_event.last_frame = segment.back().frame;
            for (const auto& s : states) exit_event.acc_history.push_back(s.a);
            exit_event.turn_events = turn_events_from_states(states);
            out.exits.push_back(std::move(exit_event));
        }
    }
    std::sort(out.world_rows.begin(), out.world_rows.end(),
              [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
    std::sort(out.exits.begin(), out.exits.end(), [](const TrackExit& a, const TrackExit& b) {
        return a.first_frame < b.first_frame;
    });
    return out;
}

inline std::vector<PixelObservation> read_observations(const std::string& path) {
    CsvTable table = read_csv(path);
    int c_frame = table.column("frame");
    int c_t = table.column("t");
    int c_cam = table.column("cctv_id");
    int c_track = table.column("track_id");
    int c_u = table.column("u");
    int c_v = table.column("v");
    std::vector<PixelObservation> out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        PixelObservation o;
        o.frame = static_cast<int>(csv_int(path, i, r[static_cast<std::size_t>(c_frame)]));
        o.t = csv_double(path, i, r[static_cast<std::size_t>(c_t)]);
        o.cctv_id = r[static_cast<std::size_t>(c_cam)];
        o.track_id = static_cast<int>(csv_int(path, i, r[static_cast<std::size_t>(c_track)]));
        o.u = csv_double(path, i, r[static_cast<std::size_t>(c_u)]);
        o.v = csv_double(path, i, r[static_cast<std::size_t>(c_v)]);
        out.push_back(std::move(o));
    }
    return out;
}

inline std::vector<std::string> list_scenarios(const Config& cfg) {
    std::vector<std::string> ids;
    fs::path root = fs::path(cfg.output_dir) / "scenarios";
    require(fs::exists(root), Errc::io_error, "no scenarios under " + cfg.output_dir);
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) ids.push_back(entry.path().filename().string());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

inline void run_track(const Config& cfg, int jobs = 1) {
    MapBundle bundle = load_map_bundle(cfg.output_dir);
    auto ids = list_scenarios(cfg);
    detail::parallel_for(static_cast<int>(ids.size()), jobs, [&](int i) {
        std::string dir = detail::scenario_dir(cfg, ids[static_cast<std::size_t>(i)]);
        auto observations = read_observations(dir + "/observations.csv");
        TrackOutput out = run_track_scenario(observations, bundle, cfg.perception);

        CsvWriter tracks(dir + "/world_tracks.csv");
        tracks.row({"t", "track_id", "x", "y", "valid"});
        for (const auto& [t, track_id, sample] : out.world_rows) {
            tracks.row({strfmt("%.4f", t), std::to_string(track_id),
                        strfmt("%.6f", sample.position.x), strfmt("%.6f", sample.position.y),
                        sample.valid ? "1" : "0"});
        }
        tracks.close();

        nlohmann::json j = nlohmann::json::array();
        for (const auto& e : out.exits) j.push_back(exit_to_json(e));
        detail::write_text(dir + "/exits.json", j.dump(2) + "\n");
    });
}

// ---------------------------------------------------------------------------
// plan

inline nlohmann::json plan_to_json(const PlanResult& plan, const std::string& scenario_id,
                                   int exit_index, const TrackExit& exit_event,
                                   const std::string& reasoner_name) {
    nlohmann::json path = nlohmann::json::array();
    for (const auto& w : plan.best_path) {
        path.push_back({{"wp_id", w.wp_id}, {"x", w.position.x}, {"y", w.position.y}});
    }
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : plan.candidates) {
        cands.push_back({{"id", c.cctv_id},
                         {"eta_s", c.eta_s},
                         {"dwell_s", c.t_dwell},
                         {"angle_deg", c.entry_angle_deg},
                         {"speed_m_s", c.speed_m_s},
                         {"score", c.score}});
    }
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& r : plan.trace) {
        trace.push_back({{"step", r.step},
                         {"base", r.base},
                         {"llm_raw", r.llm_raw},
                         {"llm_term", r.llm_term},
                         {"total", r.total},
                         {"mom", r.mom},
                         {"dir", r.dir},
                         {"spd", r.spd},
                         {"rule", r.rule},
                         {"reason", r.reason}});
    }
    nlohmann::json hyps = nlohmann::json::array();
    for (const auto& h : plan.hypotheses) {
        hyps.push_back({{"path", h.path}, {"score", h.score}, {"frozen", h.frozen}});
    }
    return {{"scenario_id", scenario_id},
            {"exit_index", exit_index},
            {"source_cam", exit_event.exit.cctv_id},
            {"exit_time", exit_event.exit.exit_time},
            {"exit_first_frame", exit_event.first_frame},
            {"exit_last_frame", exit_event.last_frame},
            {"v_med", exit_event.exit.v_med},
            {"reasoner", reasoner_name},
            {"best_path", path},
            {"hypotheses", hyps},
            {"candidates", cands},
            {"next_cam", plan.next_cam ? nlohmann::json(*plan.next_cam) : nlohmann::json()},
            {"score_trace", trace}};
}

inline void run_plan(const Config& cfg, int jobs = 1, Reasoner* reasoner_override = nullptr,
                     const std::string& plans_name = "plans.json") {
    MapBundle bundle = load_map_bundle(cfg.output_dir);
    std::unique_ptr<Reasoner> owned;
    if (reasoner_override == nullptr) {
        owned = make_reasoner(cfg.reasoner);
        reasoner_override = owned.get();
    }
    auto ids = list_scenarios(cfg);
    detail::parallel_for(static_cast<int>(ids.size()), jobs, [&](int i) {
        std::string dir = detail::scenario_dir(cfg, ids[static_cast<std::size_t>(i)]);
        nlohmann::json exits = detail::read_json(dir + "/exits.json");
        nlohmann::json plans = nlohmann::json::array();
        int exit_index = 0;
        for (const auto& ej : exits) {
            TrackExit exit_event = exit_from_json(ej);
            // profile on the recent past: the last few maneuver events carry the intent
            std::vector<TurnKind> recent = exit_event.turn_events;
            if (recent.size() > 3) recent.erase(recent.begin(), recent.end() - 3);
            DriverProfile profile =
                driver_profile(exit_event.acc_history, cfg.perception.a_max, recent);
            PlanResult result = plan(exit_event.exit, bundle.graph, bundle.fovs, profile,
                                     cfg.beam, *reasoner_override, cfg.scenarios.dt);
            plans.push_back(plan_to_json(result, ids[static_cast<std::size_t>(i)], exit_index,
                                         exit_event, reasoner_override->name()));
            ++exit_index;
        }
        detail::write_text(dir + "/" + plans_name, plans.dump(2) + "\n");
    });
}

// ---------------------------------------------------------------------------
// eval

struct GtTrack {
    std::vector<double> times;
    std::vector<Vec2> points;
};

inline GtTrack read_gt_track(const std::string& path) {
    CsvTable table = read_csv(path);
    int c_t = table.column("t");
    int c_x = table.column("x");
    int c_y = table.column("y");
    GtTrack out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        out.times.push_back(csv_double(path, i, r[static_cast<std::size_t>(c_t)]));
        out.points.push_back({csv_double(path, i, r[static_cast<std::size_t>(c_x)]),
                              csv_double(path, i, r[static_cast<std::size_t>(c_y)])});
    }
    return out;
}

inline VisitSequence read_visits(const std::string& path) {
    CsvTable table = read_csv(path);
    int c_order = table.column("order");
    int c_cam = table.column("cctv_id");
    int c_first = table.column("first_frame");
    int c_last = table.column("last_frame");
    VisitSequence out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        out.push_back({static_cast<int>(csv_int(path, i, r[static_cast<std::size_t>(c_order)])),
                       r[static_cast<std::size_t>(c_cam)],
                       static_cast<int>(csv_int(path, i, r[static_cast<std::size_t>(c_first)])),
                       static_cast<int>(csv_int(path, i, r[static_cast<std::size_t>(c_last)]))});
    }
    return out;
}

/// Ground-truth next camera for an exit: the visit after the one overlapping
/// the exit's observation segment. Empty when this was the final visit.
inline std::optional<std::string> gt_next_camera(const VisitSequence& visits,
                                                 const std::string& source_cam, int first_frame,
                                                 int last_frame) {
    for (std::size_t i = 0; i < visits.size(); ++i) {
        const Visit& v = visits[i];
        if (v.cctv_id != source_cam) continue;
        if (v.first_frame > last_frame || v.last_frame < first_frame) continue;
        if (i + 1 < visits.size()) return visits[i + 1].cctv_id;
        return std::nullopt;
    }
    return std::nullopt;
}

struct EvalCaseMetrics {
    PredictionCase prediction;
    std::optional<double> ade_m;
    std::optional<double> fde_x;
    std::optional<double> fde_y;
    std::vector<std::pair<int, double>> per_step;
};

/// Metrics for one exported plan against ground truth. Returns nothing when the
/// exit has no subsequent ground-truth visit.
inline std::optional<EvalCaseMetrics> evaluate_plan(const nlohmann::json& plan_json,
                                                    const VisitSequence& visits,
                                                    const GtTrack& gt) {
    std::string source = plan_json.at("source_cam").get<std::string>();
    int first_frame = plan_json.at("exit_first_frame").get<int>();
    int last_frame = plan_json.at("exit_last_frame").get<int>();
    auto gt_next = gt_next_camera(visits, source, first_frame, last_frame);
    if (!gt_next) return std::nullopt;

    EvalCaseMetrics m;
    m.prediction.scenario_id = plan_json.at("scenario_id").get<std::string>();
    m.prediction.gt_next_cam = *gt_next;
    for (const auto& c : plan_json.at("candidates")) {
        m.prediction.predicted_topk.push_back(c.at("id").get<std::string>());
    }

    double exit_time = plan_json.at("exit_time").get<double>();
    double v_med = plan_json.at("v_med").get<double>();
    const auto& path = plan_json.at("best_path");
    if (path.size() >= 2 && v_med > 1e-6) {
        std::vector<Vec2> pred;
        std::vector<double> times;
        double arclen = 0.0;
        Vec2 prev{path.at(0).at("x").get<double>(), path.at(0).at("y").get<double>()};
        pred.push_back(prev);
        times.push_back(exit_time);
        for (std::size_t i = 1; i < path.size(); ++i) {
            Vec2 p{path.at(i).at("x").get<double>(), path.at(i).at("y").get<double>()};
            arclen += distance(prev, p);
            pred.push_back(p);
            times.push_back(exit_time + arclen / v_med);
            prev = p;
        }
        std::vector<Vec2> truth;
        std::vector<double> truth_times;
        for (std::size_t i = 0; i < gt.times.size(); ++i) {
            if (gt.times[i] > exit_time && gt.times[i] <= times.back() + 1e-9) {
                truth.push_back(gt.points[i]);
                truth_times.push_back(gt.times[i]);
            }
        }
        if (!truth.empty()) {
            TrajectoryPair pair = align_by_time(pred, times, truth, truth_times);
            m.ade_m = ade(pair);
            auto [fx, fy] = fde_axis(pair);
            m.fde_x = fx;
            m.fde_y = fy;
            m.per_step = per_step_errors(pair);
        }
    }
    return m;
}

struct FleetMetrics {
    ReportRow row;
    std::vector<EvalCaseMetrics> cases;
};

inline FleetMetrics evaluate_fleet(const Config& cfg,
                                   const std::string& plans_name = "plans.json") {
    FleetMetrics fleet;
    std::string label;
    std::vector<PredictionCase> cases;
    std::vector<double> ades, fdex, fdey;

    for (const auto& id : list_scenarios(cfg)) {
        std::string dir = detail::scenario_dir(cfg, id);
        if (!fs::exists(dir + "/" + plans_name)) continue;
        nlohmann::json plans = detail::read_json(dir + "/" + plans_name);
        VisitSequence visits = read_visits(dir + "/visits.csv");
        GtTrack gt = read_gt_track(dir + "/gt_traj.csv");
        for (const auto& pj : plans) {
            if (label.empty()) label = pj.value("reasoner", "unknown");
            auto metrics = evaluate_plan(pj, visits, gt);
            if (!metrics) continue;
            cases.push_back(metrics->prediction);
            if (metrics->ade_m) {
                ades.push_back(*metrics->ade_m);
                fdex.push_back(*metrics->fde_x);
                fdey.push_back(*metrics->fde_y);
            }
            fleet.cases.push_back(std::move(*metrics));
        }
    }

    TopkCounts counts = topk_accuracy(cases, cfg.eval.top_k);
    auto mean = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    fleet.row.label = label.empty() ? "unknown" : label;
    fleet.row.fde_x = mean(fdex);
    fleet.row.fde_y = mean(fdey);
    fleet.row.ade = mean(ades);
    fleet.row.top1 = counts.top1;
    fleet.row.topk = counts.topk;
    fleet.row.n_cases = counts.n;
    return fleet;
}

inline void run_eval(const Config& cfg) {
    FleetMetrics fleet = evaluate_fleet(cfg);
    Report report = render_report({fleet.row});
    detail::write_text(cfg.output_dir + "/report.md", report.text);

    nlohmann::json results;
    results["rows"] = report.json;
    results["top_k"] = cfg.eval.top_k;
    detail::write_text(cfg.output_dir + "/results.json", results.dump(2) + "\n");

    CsvWriter per_step(cfg.output_dir + "/per_step.csv");
    per_step.row({"scenario_id", "case", "step", "distance"});
    int case_idx = 0;
    for (const auto& c : fleet.cases) {
        for (const auto& [step, dist] : c.per_step) {
            per_step.row({c.prediction.scenario_id, std::to_string(case_idx),
                          std::to_string(step), strfmt("%.6f", dist)});
        }
        ++case_idx;
    }
    per_step.close();
}

// ---------------------------------------------------------------------------
// query

inline std::string run_query(const Config& cfg, const std::string& question,
                             std::optional<Vec2> position) {
    MapBundle bundle = load_map_bundle(cfg.output_dir);

    // Route question: two camera ids mentioned -> shortest route answer.
    std::regex cam_re("CCTV_[0-9]+");
    std::vector<std::string> mentioned;
    for (auto it = std::sregex_iterator(question.begin(), question.end(), cam_re);
         it != std::sregex_iterator(); ++it) {
        std::string id = it->str();
        if (std::find(mentioned.begin(), mentioned.end(), id) == mentioned.end()) {
            mentioned.push_back(id);
        }
    }
    if (mentioned.size() >= 2) {
        auto route = shortest_route(bundle.graph, bundle.gates, mentioned[0], mentioned[1]);
        std::string answer = "Shortest route from " + mentioned[0] + " to " + mentioned[1] +
                             " (" + std::to_string(route.size()) + " waypoints):\n";
        for (std::size_t i = 0; i < route.size(); ++i) {
            answer += strfmt("%zu. (%s, %s) - wp_%03lld\n", i + 1,
                             format_1dp(route[i].position.x).c_str(),
                             format_1dp(route[i].position.y).c_str(),
                             static_cast<long long>(route[i].wp_id));
        }
        return answer;
    }

    auto docs = generate_documents(bundle.graph, bundle.gates, bundle.zones, bundle.cams,
                                   bundle.fovs);
    DocStore store(std::move(docs), cfg.retrieval);
    auto candidates = hybrid_retrieve(question, position, store, cfg.retrieval);
    if (candidates.empty()) {
        return "No map documents matched this query" +
               std::string(position ? " near the given position" : "") + ".\n";
    }
    FeatureHashEmbedder embedder;
    auto ranked = rerank(candidates, question, question, store, embedder, cfg.retrieval);
    std::string prompt = synthesize_prompt(question, ranked, store, {},
                                           cfg.retrieval.prompt_budget);

    if (cfg.reasoner.kind == "remote") {
        RemoteReasoner remote(cfg.reasoner.remote);
        auto reply = remote.complete_text(
            "You are a map comprehension assistant. Answer using only the provided context.",
            prompt);
        if (reply) return *reply + "\n";
        // fall through to the retrieval answer on degradation
    }
    std::string answer = prompt + "Ranked documents:\n";
    for (const auto& r : ranked) {
        answer += strfmt("%s s_base=%.4f p_align=%.4f s_final=%.4f\n", r.doc_id.c_str(),
                         r.s_base, r.p_align, r.s_final);
    }
    return answer;
}

inline void run_pipeline(const Config& cfg, int jobs = 1) {
    run_sim(cfg, jobs);
    run_mapdoc(cfg);
    run_track(cfg, jobs);
    run_plan(cfg, jobs);
    run_eval(cfg);
}

} // namespace spot
