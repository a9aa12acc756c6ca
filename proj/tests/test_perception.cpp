#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "spot/perception.hpp"
#include "spot/simulator.hpp"

using namespace spot;

namespace {

std::vector<WorldSample> track_from_points(const std::vector<Vec2>& pts, double dt = 1.0) {
    std::vector<WorldSample> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out.push_back({static_cast<double>(i) * dt, pts[i], true});
    }
    return out;
}

} // namespace

TEST_CASE("kinematics basics") {
    BehaviorThresholds th;
    auto states = estimate_kinematics(track_from_points({{0, 0}, {3, 4}}), 0.0, th);
    REQUIRE(states.size() == 1);
    CHECK(states[0].d == Catch::Approx(5.0));
    CHECK(states[0].v == Catch::Approx(5.0));
    CHECK(states[0].theta_abs == Catch::Approx(0.9272952180016122));
    CHECK(states[0].a == 0.0); // first state

    auto accel = estimate_kinematics(track_from_points({{0, 0}, {5, 0}, {12, 0}}), 0.0, th);
    REQUIRE(accel.size() == 2);
    CHECK(accel[0].v == Catch::Approx(5.0));
    CHECK(accel[1].v == Catch::Approx(7.0));
    CHECK(accel[1].a == Catch::Approx(2.0));
}

TEST_CASE("kinematics: constant velocity is exact") {
    BehaviorThresholds th;
    std::vector<Vec2> pts;
    for (int i = 0; i < 50; ++i) pts.push_back({3.0 * 0.1 * i, 4.0 * 0.1 * i});
    auto states = estimate_kinematics(track_from_points(pts, 0.1), 0.0, th);
    for (std::size_t i = 0; i < states.size(); ++i) {
        CHECK(std::abs(states[i].v - 5.0) < 1e-9);
        if (i >= 1) CHECK(std::abs(states[i].a) < 1e-9);
    }
}

TEST_CASE("kinematics: constant acceleration recovered") {
    BehaviorThresholds th;
    const double a = 1.7, v0 = 3.0, dt = 0.1;
    std::vector<Vec2> pts;
    for (int i = 0; i < 60; ++i) {
        double t = i * dt;
        pts.push_back({v0 * t + 0.5 * a * t * t, 0.0});
    }
    auto states = estimate_kinematics(track_from_points(pts, dt), 0.0, th);
    for (std::size_t i = 1; i < states.size(); ++i) {
        CHECK(std::abs(states[i].a - a) < 1e-6);
    }
}

TEST_CASE("kinematics: stationary track carries heading") {
    BehaviorThresholds th;
    std::vector<Vec2> pts{{0, 0}, {1, 1}, {1, 1}, {1, 1}};
    auto states = estimate_kinematics(track_from_points(pts), 0.0, th);
    REQUIRE(states.size() == 3);
    CHECK(states[1].v == 0.0);
    CHECK(states[1].theta_abs == Catch::Approx(states[0].theta_abs)); // carried
    CHECK(states[2].theta_abs == Catch::Approx(kPi / 4.0));
}

TEST_CASE("kinematics: gaps break differencing") {
    BehaviorThresholds th;
    std::vector<WorldSample> samples;
    for (int i = 0; i < 5; ++i) samples.push_back({i * 0.1, {i * 1.0, 0}, true});
    // 10x median gap, then new chain far away (would imply a teleport velocity)
    for (int i = 0; i < 5; ++i) samples.push_back({1.5 + i * 0.1, {100.0 + i, 0}, true});
    auto states = estimate_kinematics(samples, 0.0, th);
    for (const auto& s : states) CHECK(s.v < 50.0); // no teleport speed emitted
    CHECK(states.size() == 8);                      // 4 + 4, the gap pair skipped
}

TEST_CASE("kinematics requires two valid samples") {
    BehaviorThresholds th;
    std::vector<WorldSample> one{{0.0, {0, 0}, true}, {1.0, {1, 1}, false}};
    CHECK_THROWS_MATCHES(estimate_kinematics(one, 0.0, th), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::too_few_samples;
                         }));
}

TEST_CASE("classify_dir8 sectors and boundaries") {
    CHECK(classify_dir8(0.0) == Dir8::F);
    CHECK(classify_dir8(kPi / 2.0) == Dir8::L);
    CHECK(classify_dir8(kPi) == Dir8::B);
    CHECK(classify_dir8(-kPi / 2.0) == Dir8::R);
    CHECK(classify_dir8(kPi / 4.0) == Dir8::FL);
    CHECK(classify_dir8(-kPi / 4.0) == Dir8::FR);
    CHECK(classify_dir8(3.0 * kPi / 4.0) == Dir8::BL);
    CHECK(classify_dir8(-3.0 * kPi / 4.0) == Dir8::BR);
    // boundaries belong to the counterclockwise sector
    CHECK(classify_dir8(kPi / 8.0) == Dir8::FL);
    CHECK(classify_dir8(-kPi / 8.0) == Dir8::F);
    CHECK(classify_dir8(3.0 * kPi / 8.0) == Dir8::L);
}

TEST_CASE("dir8 partition: every angle maps to exactly one sector") {
    for (int i = -2000; i <= 2000; ++i) {
        double theta = wrap_pi(i * 0.0017);
        Dir8 d = classify_dir8(theta);
        // recompute sector bounds from the label and check membership
        auto k = static_cast<int>(d);
        double center = k * kPi / 4.0;
        double lo = center - kPi / 8.0;
        double hi = center + kPi / 8.0;
        double rel = wrap_pi(theta - center);
        CHECK(rel >= -kPi / 8.0 - 1e-12);
        CHECK(rel < kPi / 8.0 + 1e-12);
        (void)lo;
        (void)hi;
    }
}

TEST_CASE("classify_behavior priorities") {
    BehaviorThresholds th;
    th.eps_v = 0.5;
    th.eps_a = 2.0;
    th.eps_theta = 0.8;

    KinematicState s;
    s.v = 0.1;
    CHECK(classify_behavior(s, th) == Behavior::stop);

    s.v = 10;
    s.a = 3;
    s.theta_rel = 0.1;
    CHECK(classify_behavior(s, th) == Behavior::accel);

    s.a = 0;
    s.theta_rel = 1.2;
    CHECK(classify_behavior(s, th) == Behavior::sharp_turn);

    s.a = 3.0; // sharp turn outranks accel
    CHECK(classify_behavior(s, th) == Behavior::sharp_turn);

    s.theta_rel = 0.1;
    s.a = -3.0;
    CHECK(classify_behavior(s, th) == Behavior::decel);

    s.a = 0.0;
    CHECK(classify_behavior(s, th) == Behavior::cruise);

    s.v = 0.2; // stop outranks everything
    s.theta_rel = 1.5;
    CHECK(classify_behavior(s, th) == Behavior::stop);
}

TEST_CASE("detect_turn") {
    CHECK(detect_turn(0.5, 0.3) == TurnKind::left);
    CHECK(detect_turn(-0.5, 0.3) == TurnKind::right);
    CHECK(detect_turn(0.0, 0.3) == TurnKind::straight);
    CHECK(detect_turn(0.3, 0.3) == TurnKind::straight); // boundary is not a turn
}

TEST_CASE("summarize_exit_state") {
    BehaviorThresholds th;

    SECTION("constant speed window") {
        std::vector<Vec2> pts;
        for (int i = 0; i < 20; ++i) pts.push_back({5.0 * 0.5 * i, 0.0});
        auto states = estimate_kinematics(track_from_points(pts, 0.5), 0.0, th);
        auto exit = summarize_exit_state(states, "CCTV_00", 8, 4.0, th);
        CHECK(exit.v_med == Catch::Approx(5.0));
        CHECK(exit.a_eff == Catch::Approx(0.0).margin(1e-12));
        CHECK(exit.heading_valid);
        CHECK(exit.heading == Catch::Approx(0.0).margin(1e-12));
        CHECK(exit.window_len == 8);
        CHECK(exit.cctv_id == "CCTV_00");
    }

    SECTION("median rejects a noise spike") {
        std::vector<KinematicState> states;
        for (double v : {5.0, 5.0, 50.0}) {
            KinematicState s;
            s.v = v;
            s.d = v;
            s.t = states.size() * 1.0;
            s.position = {s.t * 5.0, 0.0};
            states.push_back(s);
        }
        auto exit = summarize_exit_state(states, "CCTV_00", 3, 4.0, th);
        CHECK(exit.v_med == Catch::Approx(5.0));
    }

    SECTION("zero displacement falls back to the last valid heading") {
        std::vector<KinematicState> states;
        KinematicState moving;
        moving.t = 0.0;
        moving.position = {0, 0};
        moving.d = 2.0;
        moving.v = 2.0;
        moving.theta_abs = 0.9;
        states.push_back(moving);
        for (int i = 1; i <= 4; ++i) {
            KinematicState s;
            s.t = i * 1.0;
            s.position = {1, 1};
            s.d = 0.0;
            s.v = 0.0;
            s.theta_abs = 0.9;
            states.push_back(s);
        }
        auto exit = summarize_exit_state(states, "CCTV_00", 3, 4.0, th);
        CHECK_FALSE(exit.heading_valid);
        CHECK(exit.heading == Catch::Approx(0.9));
    }

    SECTION("a_eff clipped to a_max") {
        std::vector<KinematicState> states;
        for (int i = 0; i < 5; ++i) {
            KinematicState s;
            s.t = i;
            s.position = {static_cast<double>(i), 0};
            s.v = 1.0;
            s.d = 1.0;
            s.a = 9.0;
            states.push_back(s);
        }
        auto exit = summarize_exit_state(states, "CCTV_00", 5, 4.0, th);
        CHECK(exit.a_eff == Catch::Approx(4.0));
    }
}

TEST_CASE("median robustness: one outlier moves the median at most one gap") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v;
        for (int i = 0; i < 7; ++i) v.push_back(test::urand(rng, 0.0, 20.0));
        double base = median(v);
        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        double max_gap = 0.0;
        for (std::size_t i = 1; i < sorted.size(); ++i) {
            max_gap = std::max(max_gap, sorted[i] - sorted[i - 1]);
        }
        auto mutated = v;
        mutated[rng() % mutated.size()] = test::urand(rng, -1000.0, 1000.0);
        CHECK(std::abs(median(mutated) - base) <= max_gap + 1e-12);
    }
}

TEST_CASE("pixel_track_to_world round trip against forward projection") {
    CameraSpec cam;
    cam.cctv_id = "CCTV_00";
    cam.position = {25.0, 50.0, 6.0};
    cam.yaw_deg = 10.0;
    cam.pitch_deg = -20.0;
    cam.fov_deg = 60.0;
    cam.max_range = 30.0;
    auto fov = build_fov_polygon(cam);
    auto model = camera_model_from_spec(cam);

    // ground-truth straight pass through the footprint
    std::vector<GroundTruthRecord> gt;
    Vec2 dir{std::cos(deg2rad(10.0)), std::sin(deg2rad(10.0))};
    for (int i = 0; i < 200; ++i) {
        GroundTruthRecord r;
        r.frame = i;
        r.t = i * 0.1;
        Vec2 p = Vec2{cam.position.x, cam.position.y} + dir * (4.0 + 0.15 * i);
        r.position = {p.x, p.y, 0.0};
        gt.push_back(r);
    }
    auto obs = project_observations(gt, {cam}, {fov});
    REQUIRE(obs.size() > 50);
    auto samples = pixel_track_to_world(obs, model);
    REQUIRE(samples.size() == obs.size());
    double max_err = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        REQUIRE(samples[i].valid);
        Vec2 truth{gt[static_cast<std::size_t>(obs[i].frame)].position.x,
                   gt[static_cast<std::size_t>(obs[i].frame)].position.y};
        max_err = std::max(max_err, distance(samples[i].position, truth));
    }
    CHECK(max_err < 1e-6);
}

TEST_CASE("pixel whose ray misses the ground yields an invalid sample") {
    CameraSpec cam;
    cam.cctv_id = "CCTV_00";
    cam.position = {0.0, 0.0, 6.0};
    cam.pitch_deg = -5.0; // shallow: top image rows point above the horizon
    cam.fov_deg = 60.0;
    cam.max_range = 100.0;
    auto model = camera_model_from_spec(cam);

    std::vector<PixelObservation> obs;
    PixelObservation top;
    top.frame = 0;
    top.t = 0.0;
    top.cctv_id = cam.cctv_id;
    top.u = 400.0;
    top.v = 0.0; // top border looks upward at -5 deg pitch with 60 deg fov
    obs.push_back(top);
    auto samples = pixel_track_to_world(obs, model);
    REQUIRE(samples.size() == 1);
    CHECK_FALSE(samples[0].valid);
}
