#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spot/errors.hpp"
#include "spot/geometry.hpp"

namespace spot {

/// Installed camera description: pose in the world plus lens parameters.
struct CameraSpec {
    std::string cctv_id;      // "CCTV_NN"
    Vec3 position;            // meters, world frame; z is mounting height
    double yaw_deg = 0.0;     // 0 = +x, counterclockwise positive
    double pitch_deg = 0.0;   // negative looks down
    double roll_deg = 0.0;
    double fov_deg = 60.0;    // horizontal field of view, (0, 180)
    double max_range = 30.0;  // meters
    int image_width = 800;
    int image_height = 600;
};

inline void validate(const CameraSpec& c) {
    require(c.position.z > 0.0, Errc::bad_input, c.cctv_id + ": camera height must be > 0");
    require(c.fov_deg > 0.0 && c.fov_deg < 180.0, Errc::bad_input, c.cctv_id + ": fov out of range");
    require(c.max_range > 0.0, Errc::bad_input, c.cctv_id + ": max_range must be > 0");
    require(c.image_width > 0 && c.image_height > 0, Errc::bad_input, c.cctv_id + ": bad image size");
}

struct Intrinsics {
    double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;
};

inline Intrinsics intrinsics_from_fov(int width, int height, double fov_deg) {
    require(fov_deg > 0.0 && fov_deg < 180.0, Errc::invalid_fov,
            "fov must lie strictly between 0 and 180 degrees");
    double f = width / (2.0 * std::tan(deg2rad(fov_deg) / 2.0));
    return {f, f, width / 2.0, height / 2.0};
}

/// Axis permutation between the optical (OpenCV-style: x right, y down, z forward)
/// frame and the camera body frame (x forward, y left, z up).
enum class Handedness {
    opencv_right, // apply the permutation below
    body_identity // pixels are already expressed in the body frame
};

inline Mat3 coord_permutation(Handedness h) {
    if (h == Handedness::body_identity) return Mat3::identity();
    Mat3 t;
    // columns are the body-frame images of the optical axes
    t.m[0][0] = 0;  t.m[0][1] = 0;  t.m[0][2] = 1;
    t.m[1][0] = -1; t.m[1][1] = 0;  t.m[1][2] = 0;
    t.m[2][0] = 0;  t.m[2][1] = -1; t.m[2][2] = 0;
    return t;
}

/// Calibrated camera: intrinsics plus world->body rotation and center.
struct CameraModel {
    std::string cctv_id;
    Intrinsics k;
    Mat3 rotation;  // world -> camera body
    Vec3 center;    // camera center in world coordinates
    Handedness handedness = Handedness::opencv_right;
    int image_width = 0;
    int image_height = 0;

    [[nodiscard]] Mat3 t_coord() const { return coord_permutation(handedness); }
};

/// Body->world rotation for a yaw/pitch/roll pose (degrees; negative pitch looks down).
inline Mat3 pose_rotation_body_to_world(double yaw_deg, double pitch_deg, double roll_deg) {
    return Mat3::rot_z(deg2rad(yaw_deg)) * Mat3::rot_y(-deg2rad(pitch_deg)) *
           Mat3::rot_x(deg2rad(roll_deg));
}

inline CameraModel camera_model_from_spec(const CameraSpec& spec,
                                          Handedness handedness = Handedness::opencv_right) {
    validate(spec);
    CameraModel m;
    m.cctv_id = spec.cctv_id;
    m.k = intrinsics_from_fov(spec.image_width, spec.image_height, spec.fov_deg);
    m.rotation = pose_rotation_body_to_world(spec.yaw_deg, spec.pitch_deg, spec.roll_deg).transposed();
    m.center = spec.position;
    m.handedness = handedness;
    m.image_width = spec.image_width;
    m.image_height = spec.image_height;
    return m;
}

/// Back-project a pixel into an optical-frame direction, K^-1 [u v 1]^T.
inline Vec3 pixel_to_ray(const CameraModel& m, double u, double v) {
    return {(u - m.k.cx) / m.k.fx, (v - m.k.cy) / m.k.fy, 1.0};
}

/// World-frame direction of the viewing ray through pixel (u, v).
inline Vec3 pixel_to_world_direction(const CameraModel& m, double u, double v) {
    Vec3 d_cam = pixel_to_ray(m, u, v);
    return m.rotation.transposed() * (m.t_coord() * d_cam);
}

enum class RayFail { none, skyward, behind_camera };

struct GroundHit {
    std::optional<Vec2> point;
    RayFail fail = RayFail::none;
};

/// Intersect the ray C + lambda*d with the plane z = ground_z.
inline GroundHit ray_ground_intersect(const Vec3& camera_center, const Vec3& d_world,
                                      double ground_z = 0.0) {
    if (d_world.z >= 0.0) return {std::nullopt, RayFail::skyward};
    double lambda = (ground_z - camera_center.z) / d_world.z;
    if (lambda <= 0.0) return {std::nullopt, RayFail::behind_camera};
    Vec3 p = camera_center + d_world * lambda;
    return {Vec2{p.x, p.y}, RayFail::none};
}

/// Forward pinhole projection; empty when the point lies behind the image plane.
inline std::optional<Vec2> project_world_point(const CameraModel& m, const Vec3& p_world) {
    Vec3 p_body = m.rotation * (p_world - m.center);
    Vec3 p_cam = m.t_coord().transposed() * p_body;
    if (p_cam.z <= 1e-9) return std::nullopt;
    return Vec2{m.k.fx * p_cam.x / p_cam.z + m.k.cx, m.k.fy * p_cam.y / p_cam.z + m.k.cy};
}

/// Ground-plane footprint of a camera's view frustum.
struct FovPolygon {
    std::string cctv_id;
    PolygonPoints vertices; // counterclockwise
};

inline void validate(const FovPolygon& fov, const CameraSpec& cam) {
    require(fov.vertices.size() >= 3 && signed_area(fov.vertices) > 0.0, Errc::bad_input,
            fov.cctv_id + ": fov polygon must be a positive-area ccw polygon");
    Vec2 foot{cam.position.x, cam.position.y};
    for (const auto& v : fov.vertices) {
        require(distance(v, foot) <= cam.max_range + 1.0, Errc::bad_input,
                fov.cctv_id + ": fov vertex beyond max_range");
    }
}

/// Footprint by casting rays through the sampled image border onto z = ground_z,
/// clipping each ray's ground trace at max_range from the camera foot point.
inline FovPolygon build_fov_polygon(const CameraSpec& cam, double ground_z = 0.0,
                                    int samples_per_edge = 16,
                                    Handedness handedness = Handedness::opencv_right) {
    validate(cam);
    require(samples_per_edge >= 2, Errc::bad_input, "need at least 2 samples per image edge");
    CameraModel model = camera_model_from_spec(cam, handedness);

    const double w = cam.image_width;
    const double h = cam.image_height;
    std::vector<Vec2> border;
    border.reserve(static_cast<std::size_t>(4) * samples_per_edge);
    for (int i = 0; i < samples_per_edge; ++i)
        border.push_back({w * i / samples_per_edge, 0.0});
    for (int i = 0; i < samples_per_edge; ++i)
        border.push_back({w, h * i / samples_per_edge});
    for (int i = 0; i < samples_per_edge; ++i)
        border.push_back({w - w * i / samples_per_edge, h});
    for (int i = 0; i < samples_per_edge; ++i)
        border.push_back({0.0, h - h * i / samples_per_edge});

    Vec2 foot{cam.position.x, cam.position.y};
    PolygonPoints verts;
    bool any_ground = false;
    for (const auto& px : border) {
        Vec3 d = pixel_to_world_direction(model, px.x, px.y);
        Vec2 vertex;
        if (d.z < -1e-12) {
            double lambda = (ground_z - cam.position.z) / d.z;
            Vec3 hit = cam.position + d * lambda;
            Vec2 g{hit.x, hit.y};
            double dist = distance(g, foot);
            if (dist <= cam.max_range) {
                any_ground = true;
                vertex = g;
            } else {
                vertex = foot + (g - foot) * (cam.max_range / dist);
            }
        } else {
            Vec2 horiz{d.x, d.y};
            double n = horiz.norm();
            if (n < 1e-12) continue; // straight up; no ground trace
            vertex = foot + horiz * (cam.max_range / n);
        }
        if (!verts.empty() && distance(verts.back(), vertex) < 1e-9) continue;
        verts.push_back(vertex);
    }
    while (verts.size() > 1 && distance(verts.front(), verts.back()) < 1e-9) verts.pop_back();

    require(any_ground, Errc::degenerate_fov,
            cam.cctv_id + ": no border ray reaches the ground within max_range");
    require(verts.size() >= 3 && std::abs(signed_area(verts)) > 1e-9, Errc::degenerate_fov,
            cam.cctv_id + ": degenerate footprint");
    ensure_ccw(verts);
    return FovPolygon{cam.cctv_id, std::move(verts)};
}

inline bool point_in_fov(const FovPolygon& fov, const Vec2& p) {
    return point_in_polygon(fov.vertices, p);
}

} // namespace spot
