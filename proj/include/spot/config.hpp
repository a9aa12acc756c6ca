#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spot/errors.hpp"
#include "spot/perception.hpp"
#include "spot/planner.hpp"
#include "spot/remote_reasoner.hpp"
#include "spot/retrieval.hpp"
#include "spot/simulator.hpp"

namespace spot {

struct ScenarioConfig {
    int count = 60;
    std::uint64_t seed = 123;
    double dt = 0.1;
    double duration_s = 90.0;
};

struct PerceptionConfig {
    BehaviorThresholds thresholds;
    int exit_window = 12;
    double a_max = 4.0;
    int min_track_frames = 15; // segments shorter than this produce no exit event
};

struct ReasonerConfig {
    std::string kind = "heuristic"; // null | heuristic | remote
    RemoteReasonerConfig remote;
};

struct EvalConfig {
    int top_k = 3;
};

struct Config {
    TownSpec town;
    CameraPlacement cameras;
    ScenarioConfig scenarios;
    PerceptionConfig perception;
    RetrievalConfig retrieval;
    BeamConfig beam;
    ReasonerConfig reasoner;
    EvalConfig eval;
    std::string output_dir = "out";
};

namespace detail {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace detail

inline Config config_from_json(const nlohmann::json& j) {
    using detail::read_field;
    Config c;
    if (j.contains("town")) {
        const auto& t = j.at("town");
        read_field(t, "blocks_x", c.town.blocks_x);
        read_field(t, "blocks_y", c.town.blocks_y);
        read_field(t, "block_size", c.town.block_size);
        read_field(t, "seed", c.town.seed);
    }
    if (j.contains("cameras")) {
        const auto& t = j.at("cameras");
        read_field(t, "count", c.cameras.count);
        read_field(t, "height", c.cameras.height);
        read_field(t, "pitch_deg", c.cameras.pitch_deg);
        read_field(t, "fov_deg", c.cameras.fov_deg);
        read_field(t, "max_range", c.cameras.max_range);
        read_field(t, "image_width", c.cameras.image_width);
        read_field(t, "image_height", c.cameras.image_height);
    }
    if (j.contains("scenarios")) {
        const auto& t = j.at("scenarios");
        read_field(t, "count", c.scenarios.count);
        read_field(t, "seed", c.scenarios.seed);
        read_field(t, "dt", c.scenarios.dt);
        read_field(t, "duration_s", c.scenarios.duration_s);
    }
    if (j.contains("perception")) {
        const auto& t = j.at("perception");
        read_field(t, "eps_v", c.perception.thresholds.eps_v);
        read_field(t, "eps_a", c.perception.thresholds.eps_a);
        read_field(t, "eps_theta", c.perception.thresholds.eps_theta);
        read_field(t, "delta_theta_turn", c.perception.thresholds.delta_theta_turn);
        read_field(t, "exit_window", c.perception.exit_window);
        read_field(t, "a_max", c.perception.a_max);
        read_field(t, "min_track_frames", c.perception.min_track_frames);
    }
    if (j.contains("retrieval")) {
        const auto& t = j.at("retrieval");
        read_field(t, "radius", c.retrieval.radius);
        read_field(t, "tau_sim", c.retrieval.tau_sim);
        read_field(t, "L", c.retrieval.L);
        read_field(t, "shingle_k", c.retrieval.shingle_k);
        read_field(t, "seed", c.retrieval.seed);
        read_field(t, "beta_base", c.retrieval.beta_base);
        read_field(t, "n_optimal", c.retrieval.n_optimal);
        read_field(t, "top_k", c.retrieval.top_k);
        read_field(t, "embed_dims", c.retrieval.embed_dims);
        read_field(t, "memory_capacity", c.retrieval.memory_capacity);
        read_field(t, "prompt_budget", c.retrieval.prompt_budget);
    }
    if (j.contains("beam")) {
        const auto& t = j.at("beam");
        read_field(t, "width", c.beam.width);
        read_field(t, "depth", c.beam.depth);
        read_field(t, "step_dt", c.beam.step_dt);
        read_field(t, "eta", c.beam.eta);
        read_field(t, "w_d", c.beam.w_d);
        read_field(t, "w_s", c.beam.w_s);
        read_field(t, "kappa_curv", c.beam.kappa_curv);
        read_field(t, "gamma", c.beam.gamma);
        read_field(t, "v_ref", c.beam.v_ref);
        read_field(t, "sigma_spd", c.beam.sigma_spd);
        read_field(t, "delta_fusion", c.beam.delta_fusion);
        read_field(t, "p_floor", c.beam.p_floor);
        read_field(t, "min_dwell_s", c.beam.min_dwell_s);
        read_field(t, "min_fov_steps", c.beam.min_fov_steps);
        read_field(t, "snap_radius", c.beam.snap_radius);
    }
    if (j.contains("reasoner")) {
        const auto& t = j.at("reasoner");
        read_field(t, "kind", c.reasoner.kind);
        read_field(t, "endpoint", c.reasoner.remote.endpoint);
        read_field(t, "model", c.reasoner.remote.model);
        read_field(t, "credential_env", c.reasoner.remote.credential_env);
        read_field(t, "timeout_ms", c.reasoner.remote.timeout_ms);
        read_field(t, "retries", c.reasoner.remote.retries);
        read_field(t, "backoff_s", c.reasoner.remote.backoff_s);
        read_field(t, "max_in_flight", c.reasoner.remote.max_in_flight);
        read_field(t, "transcript_path", c.reasoner.remote.transcript_path);
        read_field(t, "replay_path", c.reasoner.remote.replay_path);
        read_field(t, "replay_only", c.reasoner.remote.replay_only);
    }
    if (j.contains("eval")) {
        read_field(j.at("eval"), "top_k", c.eval.top_k);
    }
    read_field(j, "output_dir", c.output_dir);

    // fail fast on any invalid sub-config
    validate(c.town);
    validate(c.perception.thresholds);
    validate(c.retrieval);
    validate(c.beam);
    require(c.scenarios.count >= 1 && c.scenarios.dt > 0.0 && c.scenarios.duration_s > 0.0,
            Errc::bad_input, "scenario config values must be positive");
    require(c.perception.exit_window >= 3, Errc::bad_input, "exit_window must be >= 3");
    require(c.perception.a_max > 0.0, Errc::bad_input, "a_max must be positive");
    require(c.eval.top_k >= 1, Errc::bad_input, "eval top_k must be >= 1");
    require(c.reasoner.kind == "null" || c.reasoner.kind == "heuristic" ||
                c.reasoner.kind == "remote",
            Errc::bad_input, "reasoner kind must be null, heuristic, or remote");
    require(!c.output_dir.empty(), Errc::bad_input, "output_dir must be set");
    return c;
}

/// Apply a `--set key.path=value` override onto raw JSON before parsing.
inline void apply_override(nlohmann::json& j, const std::string& assignment) {
    auto eq = assignment.find('=');
    require(eq != std::string::npos && eq > 0, Errc::bad_input,
            "--set expects key.path=value, got '" + assignment + "'");
    std::string path = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(value);
    } catch (...) {
        parsed = value; // plain string
    }
    nlohmann::json* cursor = &j;
    auto keys = split(path, '.');
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) cursor = &((*cursor)[keys[i]]);
    (*cursor)[keys.back()] = parsed;
}

inline Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Errc::io_error, "cannot open config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        raise(Errc::bad_input, path + ": " + e.what());
    }
    try {
        for (const auto& o : overrides) apply_override(j, o);
        return config_from_json(j);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        raise(Errc::bad_input, path + ": " + e.what());
    }
}

inline std::unique_ptr<Reasoner> make_reasoner(const ReasonerConfig& cfg) {
    if (cfg.kind == "null") return std::make_unique<NullReasoner>();
    if (cfg.kind == "heuristic") return std::make_unique<HeuristicReasoner>();
    return std::make_unique<RemoteReasoner>(cfg.remote);
}

} // namespace spot
