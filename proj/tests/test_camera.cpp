#include <catch2/catch_amalgamated.hpp>

#include "spot/camera.hpp"

using namespace spot;

TEST_CASE("intrinsics_from_fov") {
    auto k = intrinsics_from_fov(800, 600, 90.0);
    CHECK(k.fx == Catch::Approx(400.0));
    CHECK(k.fy == Catch::Approx(400.0));
    CHECK(k.cx == Catch::Approx(400.0));
    CHECK(k.cy == Catch::Approx(300.0));

    // independent route: fov 60 -> fx = 400 / tan(30 deg) = 400 * sqrt(3)
    auto k60 = intrinsics_from_fov(800, 600, 60.0);
    CHECK(k60.fx == Catch::Approx(400.0 * std::sqrt(3.0)).epsilon(1e-12));
    CHECK(k60.fx == Catch::Approx(692.8203230275509).margin(1e-6));

    CHECK_THROWS_MATCHES(intrinsics_from_fov(800, 600, 180.0), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::invalid_fov;
                         }));
    CHECK_THROWS_AS(intrinsics_from_fov(800, 600, 0.0), Error);
}

TEST_CASE("pixel_to_ray") {
    CameraSpec spec;
    spec.cctv_id = "CCTV_00";
    spec.position = {0, 0, 6};
    spec.fov_deg = 90.0;
    spec.image_width = 800;
    spec.image_height = 800;
    auto m = camera_model_from_spec(spec);

    Vec3 center = pixel_to_ray(m, m.k.cx, m.k.cy);
    CHECK(center.x == Catch::Approx(0.0).margin(1e-12));
    CHECK(center.y == Catch::Approx(0.0).margin(1e-12));
    CHECK(center.z == Catch::Approx(1.0));

    Vec3 right = pixel_to_ray(m, m.k.cx + m.k.fx, m.k.cy);
    CHECK(right.x == Catch::Approx(1.0));
    CHECK(right.y == Catch::Approx(0.0).margin(1e-12));

    Vec3 corner = pixel_to_ray(m, 0, 0);
    CHECK(corner.x == Catch::Approx(-1.0));
    CHECK(corner.y == Catch::Approx(-1.0));
    CHECK(corner.z == Catch::Approx(1.0));
}

TEST_CASE("ray_ground_intersect") {
    Vec3 cam{0, 0, 6};

    auto hit = ray_ground_intersect(cam, {1, 0, -0.5}, 0.0);
    REQUIRE(hit.point.has_value());
    CHECK(hit.point->x == Catch::Approx(12.0)); // lambda = 12
    CHECK(hit.point->y == Catch::Approx(0.0).margin(1e-12));

    auto sky = ray_ground_intersect(cam, {1, 0, 0.1}, 0.0);
    CHECK_FALSE(sky.point.has_value());
    CHECK(sky.fail == RayFail::skyward);

    auto down = ray_ground_intersect(cam, {0, 0, -1}, 0.0);
    REQUIRE(down.point.has_value());
    CHECK(down.point->x == Catch::Approx(0.0).margin(1e-12));
    CHECK(down.point->y == Catch::Approx(0.0).margin(1e-12));

    // camera below the plane: the hit would be behind the ray start
    auto behind = ray_ground_intersect({0, 0, -2}, {0, 0, -1}, 0.0);
    CHECK(behind.fail == RayFail::behind_camera);
}

TEST_CASE("fov polygon: straight-down symmetry") {
    CameraSpec cam;
    cam.cctv_id = "CCTV_01";
    cam.position = {3.0, -2.0, 6.0};
    cam.yaw_deg = 0.0;
    cam.pitch_deg = -90.0;
    cam.fov_deg = 60.0;
    cam.max_range = 30.0;
    auto fov = build_fov_polygon(cam);
    Vec2 foot{cam.position.x, cam.position.y};

    auto closest_in_set = [&](const Vec2& p) {
        double best = 1e18;
        for (const auto& v : fov.vertices) best = std::min(best, distance(v, p));
        return best;
    };
    for (const auto& v : fov.vertices) {
        Vec2 rel = v - foot;
        CHECK(closest_in_set(foot + Vec2{rel.x, -rel.y}) < 1e-6);
        CHECK(closest_in_set(foot + Vec2{-rel.x, rel.y}) < 1e-6);
    }
}

TEST_CASE("fov polygon: lateral symmetry at -20 deg pitch") {
    CameraSpec cam;
    cam.cctv_id = "CCTV_02";
    cam.position = {0.0, 0.0, 6.0};
    cam.yaw_deg = 0.0;
    cam.pitch_deg = -20.0;
    cam.fov_deg = 60.0;
    cam.max_range = 22.0;
    auto fov = build_fov_polygon(cam);
    auto closest_in_set = [&](const Vec2& p) {
        double best = 1e18;
        for (const auto& v : fov.vertices) best = std::min(best, distance(v, p));
        return best;
    };
    for (const auto& v : fov.vertices) {
        CHECK(closest_in_set({v.x, -v.y}) < 1e-6); // mirror across the +x axis
    }
    CHECK(signed_area(fov.vertices) > 0.0);
}

TEST_CASE("fov polygon: skyward camera degenerates") {
    CameraSpec cam;
    cam.cctv_id = "CCTV_03";
    cam.position = {0.0, 0.0, 6.0};
    cam.pitch_deg = 10.0;
    cam.fov_deg = 20.0;
    cam.max_range = 30.0;
    CHECK_THROWS_MATCHES(build_fov_polygon(cam), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::degenerate_fov;
                         }));
}

TEST_CASE("fov footprint soundness: vertices reproject to the border or max_range") {
    CameraSpec cam;
    cam.cctv_id = "CCTV_04";
    cam.position = {5.0, 7.0, 6.0};
    cam.yaw_deg = 123.0;
    cam.pitch_deg = -20.0;
    cam.fov_deg = 60.0;
    cam.max_range = 25.0;
    auto fov = build_fov_polygon(cam);
    auto model = camera_model_from_spec(cam);
    Vec2 foot{cam.position.x, cam.position.y};

    for (const auto& v : fov.vertices) {
        bool at_range = std::abs(distance(v, foot) - cam.max_range) < 1e-6;
        bool on_border = false;
        if (auto px = project_world_point(model, {v.x, v.y, 0.0})) {
            double du = std::min(std::abs(px->x), std::abs(px->x - cam.image_width));
            double dv = std::min(std::abs(px->y), std::abs(px->y - cam.image_height));
            bool in_u = px->x >= -0.5 && px->x <= cam.image_width + 0.5;
            bool in_v = px->y >= -0.5 && px->y <= cam.image_height + 0.5;
            on_border = (du < 0.5 && in_v) || (dv < 0.5 && in_u);
        }
        CHECK((at_range || on_border));
    }
}

TEST_CASE("point_in_fov basics") {
    CameraSpec cam;
    cam.cctv_id = "CCTV_05";
    cam.position = {0.0, 0.0, 6.0};
    cam.pitch_deg = -20.0;
    cam.fov_deg = 60.0;
    cam.max_range = 22.0;
    auto fov = build_fov_polygon(cam);

    Vec2 centroid{0, 0};
    for (const auto& v : fov.vertices) centroid = centroid + v;
    centroid = centroid / static_cast<double>(fov.vertices.size());
    CHECK(point_in_fov(fov, centroid));
    CHECK(point_in_fov(fov, fov.vertices.front())); // boundary counts as inside
    CHECK_FALSE(point_in_fov(fov, {2.0 * cam.max_range, 0.0}));
}
