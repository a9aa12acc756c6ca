#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "spot/camera.hpp"
#include "spot/errors.hpp"
#include "spot/geometry.hpp"

namespace spot {

struct PixelObservation {
    int frame = 0;
    double t = 0.0;
    std::string cctv_id;
    int track_id = 0;
    double u = 0.0;
    double v = 0.0;
};

struct WorldSample {
    double t = 0.0;
    Vec2 position;
    bool valid = false;
};

enum class Dir8 { F, FL, L, BL, B, BR, R, FR };

inline const char* to_string(Dir8 d) {
    static constexpr std::array<const char*, 8> names{"F", "FL", "L", "BL", "B", "BR", "R", "FR"};
    return names[static_cast<std::size_t>(d)];
}

inline std::optional<Dir8> dir8_from_string(const std::string& s) {
    static constexpr std::array<const char*, 8> names{"F", "FL", "L", "BL", "B", "BR", "R", "FR"};
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (s == names[i]) return static_cast<Dir8>(i);
    }
    return std::nullopt;
}

enum class TurnKind { left, right, straight };

inline const char* to_string(TurnKind t) {
    switch (t) {
        case TurnKind::left: return "Left";
        case TurnKind::right: return "Right";
        default: return "Straight";
    }
}

enum class Behavior { stop, accel, decel, sharp_turn, cruise };

inline const char* to_string(Behavior b) {
    switch (b) {
        case Behavior::stop: return "Stop";
        case Behavior::accel: return "Accel";
        case Behavior::decel: return "Decel";
        case Behavior::sharp_turn: return "SharpTurn";
        default: return "Cruise";
    }
}

struct KinematicState {
    double t = 0.0;
    Vec2 position;
    double d = 0.0;         // step displacement, m
    double v = 0.0;         // speed, m/s
    double a = 0.0;         // acceleration, m/s^2
    double theta_abs = 0.0; // world heading, rad
    double theta_rel = 0.0; // heading relative to the camera axis, (-pi, pi]
    Dir8 dir8 = Dir8::F;
    TurnKind turn = TurnKind::straight;
    bool in_fov = true;
};

struct BehaviorThresholds {
    double eps_v = 0.5;            // m/s
    double eps_a = 2.0;            // m/s^2
    double eps_theta = 0.8;        // rad
    double delta_theta_turn = 0.05; // rad, per-step turn event threshold
};

inline void validate(const BehaviorThresholds& th) {
    require(th.eps_v > 0 && th.eps_a > 0 && th.eps_theta > 0 && th.delta_theta_turn > 0,
            Errc::bad_input, "behavior thresholds must be strictly positive");
}

/// Median-robust summary of the last in-view frames; the planner's start state.
struct ExitState {
    std::string cctv_id;
    Vec2 exit_position;
    double exit_time = 0.0;
    double v_med = 0.0;        // median speed over the window
    double a_eff = 0.0;        // median acceleration, clipped to +-a_max
    double heading = 0.0;      // accumulated movement direction, rad
    bool heading_valid = true;
    int window_len = 0;
    std::vector<Dir8> dir8_recent; // consecutive-deduplicated, most recent last
};

/// 45-degree sectors centered on F (0), FL (+45), ... ; boundaries belong to the
/// counterclockwise sector. Positive theta_rel is a leftward heading.
inline Dir8 classify_dir8(double theta_rel) {
    double idx = std::floor((theta_rel + kPi / 8.0) / (kPi / 4.0));
    int k = static_cast<int>(idx) % 8;
    if (k < 0) k += 8;
    return static_cast<Dir8>(k);
}

inline Behavior classify_behavior(const KinematicState& s, const BehaviorThresholds& th) {
    if (s.v < th.eps_v) return Behavior::stop;
    if (std::abs(s.theta_rel) > th.eps_theta) return Behavior::sharp_turn;
    if (s.a > th.eps_a) return Behavior::accel;
    if (s.a < -th.eps_a) return Behavior::decel;
    return Behavior::cruise;
}

inline TurnKind detect_turn(double delta_theta_rel, double delta_theta_turn) {
    if (delta_theta_rel > delta_theta_turn) return TurnKind::left;
    if (delta_theta_rel < -delta_theta_turn) return TurnKind::right;
    return TurnKind::straight;
}

/// Cast every pixel of a track onto the ground plane. Rays that miss the ground
/// produce invalid samples rather than failing the sequence.
inline std::vector<WorldSample> pixel_track_to_world(const std::vector<PixelObservation>& track,
                                                     const CameraModel& model,
                                                     double ground_z = 0.0) {
    std::vector<WorldSample> out;
    out.reserve(track.size());
    for (const auto& obs : track) {
        Vec3 d_world = pixel_to_world_direction(model, obs.u, obs.v);
        GroundHit hit = ray_ground_intersect(model.center, d_world, ground_z);
        WorldSample s;
        s.t = obs.t;
        if (hit.point) {
            s.position = *hit.point;
            s.valid = true;
        }
        out.push_back(s);
    }
    return out;
}

/// Finite-difference kinematics over consecutive valid samples. One state per
/// valid sample starting from the second; chains break across gaps longer than
/// 3x the median sample interval, and the first state of each chain has a = 0.
inline std::vector<KinematicState> estimate_kinematics(const std::vector<WorldSample>& samples,
                                                       double theta_cam,
                                                       const BehaviorThresholds& th) {
    validate(th);
    std::vector<const WorldSample*> valid;
    for (const auto& s : samples) {
        if (s.valid) valid.push_back(&s);
    }
    require(valid.size() >= 2, Errc::too_few_samples,
            "kinematics needs at least 2 valid samples");
    for (std::size_t i = 1; i < valid.size(); ++i) {
        require(valid[i]->t > valid[i - 1]->t, Errc::bad_input,
                "timestamps must be strictly increasing");
    }

    std::vector<double> dts;
    for (std::size_t i = 1; i < valid.size(); ++i) dts.push_back(valid[i]->t - valid[i - 1]->t);
    std::vector<double> sorted_dts = dts;
    std::sort(sorted_dts.begin(), sorted_dts.end());
    double median_dt = sorted_dts[sorted_dts.size() / 2];
    double max_gap = 3.0 * median_dt;

    std::vector<KinematicState> states;
    double last_heading = 0.0;
    bool have_heading = false;
    bool chain_has_prev_v = false;
    double prev_v = 0.0;

    for (std::size_t i = 1; i < valid.size(); ++i) {
        double dt = dts[i - 1];
        if (dt > max_gap) {
            chain_has_prev_v = false; // occlusion gap: restart differencing
            continue;
        }
        const WorldSample& prev = *valid[i - 1];
        const WorldSample& cur = *valid[i];
        KinematicState st;
        st.t = cur.t;
        st.position = cur.position;
        st.d = distance(cur.position, prev.position);
        st.v = st.d / dt;
        if (chain_has_prev_v) {
            st.a = (st.v - prev_v) / dt;
        }
        if (st.d > 1e-12) {
            st.theta_abs = bearing(prev.position, cur.position);
            last_heading = st.theta_abs;
            have_heading = true;
        } else {
            // stationary: carry the last valid heading
            st.theta_abs = have_heading ? last_heading : 0.0;
        }
        st.theta_rel = wrap_pi(st.theta_abs - theta_cam);
        st.dir8 = classify_dir8(st.theta_rel);
        if (!states.empty()) {
            st.turn = detect_turn(wrap_pi(st.theta_rel - states.back().theta_rel),
                                  th.delta_theta_turn);
        }
        states.push_back(st);
        prev_v = st.v;
        chain_has_prev_v = true;
    }
    require(states.size() >= 1, Errc::too_few_samples, "no differencable sample pairs");
    return states;
}

/// Median of a copy; linear interpolation between the two central order statistics.
inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline ExitState summarize_exit_state(const std::vector<KinematicState>& states,
                                      const std::string& cctv_id, int window, double a_max,
                                      const BehaviorThresholds& th) {
    require(window >= 3, Errc::bad_input, "exit window must be >= 3");
    require(!states.empty(), Errc::too_few_samples, "no states to summarize");

    std::vector<const KinematicState*> in_fov;
    for (const auto& s : states) {
        if (s.in_fov) in_fov.push_back(&s);
    }
    require(!in_fov.empty(), Errc::too_few_samples, "no in-fov states to summarize");
    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(window), in_fov.size());
    std::size_t begin = in_fov.size() - n;

    ExitState exit;
    exit.cctv_id = cctv_id;
    exit.window_len = static_cast<int>(n);
    exit.exit_position = in_fov.back()->position;
    exit.exit_time = in_fov.back()->t;

    std::vector<double> speeds, accels;
    Vec2 unit_sum;
    double dt_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t i = begin; i < in_fov.size(); ++i) {
        speeds.push_back(in_fov[i]->v);
        accels.push_back(in_fov[i]->a);
        if (i > begin) {
            Vec2 step = in_fov[i]->position - in_fov[i - 1]->position;
            if (step.norm() > 1e-12) unit_sum = unit_sum + step.normalized();
            dt_sum += in_fov[i]->t - in_fov[i - 1]->t;
            ++steps;
        }
    }
    exit.v_med = median(speeds);
    exit.a_eff = std::clamp(median(accels), -a_max, a_max);

    double mean_dt = steps > 0 ? dt_sum / static_cast<double>(steps) : 0.0;
    double net = distance(in_fov.back()->position, in_fov[begin]->position);
    if (net < th.eps_v * static_cast<double>(n) * mean_dt || unit_sum.norm() < 1e-12) {
        exit.heading_valid = false;
        // fall back to the most recent heading backed by real displacement
        bool found = false;
        for (auto it = states.rbegin(); it != states.rend(); ++it) {
            if (it->d > th.eps_v * mean_dt) {
                exit.heading = it->theta_abs;
                found = true;
                break;
            }
        }
        if (!found) exit.heading = states.back().theta_abs;
    } else {
        exit.heading = std::atan2(unit_sum.y, unit_sum.x);
        exit.heading_valid = true;
    }
    exit.heading = wrap_pi(exit.heading);

    for (std::size_t i = begin; i < in_fov.size(); ++i) {
        Dir8 d = in_fov[i]->dir8;
        if (exit.dir8_recent.empty() || exit.dir8_recent.back() != d) {
            exit.dir8_recent.push_back(d);
        }
    }
    if (exit.dir8_recent.size() > 5) {
        exit.dir8_recent.erase(exit.dir8_recent.begin(),
                               exit.dir8_recent.end() - 5);
    }
    return exit;
}

} // namespace spot
