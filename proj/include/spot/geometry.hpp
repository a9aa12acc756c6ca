#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "spot/errors.hpp"

namespace spot {

inline constexpr double kPi = std::numbers::pi;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Wrap an angle to (-pi, pi].
inline double wrap_pi(double a) {
    double r = std::remainder(a, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

/// Signed smallest rotation taking `from` to `to`, in (-pi, pi].
inline double angle_diff(double to, double from) { return wrap_pi(to - from); }

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    [[nodiscard]] double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    [[nodiscard]] double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    [[nodiscard]] double norm() const { return std::hypot(x, y); }
    [[nodiscard]] Vec2 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{};
    }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Bearing of the direction a -> b, radians in (-pi, pi].
inline double bearing(const Vec2& a, const Vec2& b) { return std::atan2(b.y - a.y, b.x - a.x); }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

    [[nodiscard]] double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    [[nodiscard]] double norm() const { return std::sqrt(x * x + y * y + z * z); }
    [[nodiscard]] Vec2 xy() const { return {x, y}; }
};

/// Row-major 3x3 matrix; enough linear algebra for camera poses.
struct Mat3 {
    double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    static Mat3 identity() { return {}; }

    static Mat3 rot_x(double a) {
        Mat3 r;
        double c = std::cos(a), s = std::sin(a);
        r.m[1][1] = c; r.m[1][2] = -s;
        r.m[2][1] = s; r.m[2][2] = c;
        return r;
    }
    static Mat3 rot_y(double a) {
        Mat3 r;
        double c = std::cos(a), s = std::sin(a);
        r.m[0][0] = c; r.m[0][2] = s;
        r.m[2][0] = -s; r.m[2][2] = c;
        return r;
    }
    static Mat3 rot_z(double a) {
        Mat3 r;
        double c = std::cos(a), s = std::sin(a);
        r.m[0][0] = c; r.m[0][1] = -s;
        r.m[1][0] = s; r.m[1][1] = c;
        return r;
    }

    Vec3 operator*(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                r.m[i][j] = 0.0;
                for (int k = 0; k < 3; ++k) r.m[i][j] += m[i][k] * o.m[k][j];
            }
        return r;
    }

    [[nodiscard]] Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }

    [[nodiscard]] bool is_orthonormal(double tol = 1e-9) const {
        Mat3 p = transposed() * (*this);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double want = i == j ? 1.0 : 0.0;
                if (std::abs(p.m[i][j] - want) > tol) return false;
            }
        return true;
    }
};

struct Aabb {
    Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    Vec2 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};

    [[nodiscard]] bool valid() const { return lo.x <= hi.x && lo.y <= hi.y; }

    void expand(const Vec2& p) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
    }
    void expand(const Aabb& b) {
        expand(b.lo);
        expand(b.hi);
    }

    static Aabb of(std::span<const Vec2> pts) {
        Aabb b;
        for (const auto& p : pts) b.expand(p);
        return b;
    }

    [[nodiscard]] bool contains(const Vec2& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
    [[nodiscard]] bool intersects(const Aabb& o) const {
        return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y;
    }
    /// True when the box meets the closed disk (center, r).
    [[nodiscard]] bool intersects_disk(const Vec2& c, double r) const {
        double dx = std::max({lo.x - c.x, 0.0, c.x - hi.x});
        double dy = std::max({lo.y - c.y, 0.0, c.y - hi.y});
        return dx * dx + dy * dy <= r * r;
    }
    [[nodiscard]] Vec2 center() const { return {(lo.x + hi.x) * 0.5, (lo.y + hi.y) * 0.5}; }
};

using PolygonPoints = std::vector<Vec2>;

inline double signed_area(const PolygonPoints& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        a += p.cross(q);
    }
    return 0.5 * a;
}

inline void ensure_ccw(PolygonPoints& poly) {
    if (signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
}

inline bool point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b, double eps = 1e-9) {
    Vec2 ab = b - a;
    Vec2 ap = p - a;
    double len = ab.norm();
    if (len < eps) return distance(p, a) <= eps;
    if (std::abs(ab.cross(ap)) / len > eps) return false;
    double t = ap.dot(ab) / (len * len);
    return t >= -eps && t <= 1.0 + eps;
}

/// Even-odd point-in-polygon test; boundary points count as inside.
inline bool point_in_polygon(const PolygonPoints& poly, const Vec2& p) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        if (point_on_segment(p, poly[i], poly[(i + 1) % n])) return true;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double xi = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xi) inside = !inside;
        }
    }
    return inside;
}

/// Intersection of segments a->b and c->d. Returns parameters (t on ab, u on cd)
/// for non-parallel segments whose intersection lies within both (inclusive).
struct SegmentHit {
    double t = 0.0;
    double u = 0.0;
};

inline std::optional<SegmentHit> segment_intersection(const Vec2& a, const Vec2& b,
                                                      const Vec2& c, const Vec2& d) {
    Vec2 r = b - a;
    Vec2 s = d - c;
    double denom = r.cross(s);
    if (std::abs(denom) < 1e-15) return std::nullopt;
    Vec2 ca = c - a;
    double t = ca.cross(s) / denom;
    double u = ca.cross(r) / denom;
    const double eps = 1e-12;
    if (t < -eps || t > 1.0 + eps || u < -eps || u > 1.0 + eps) return std::nullopt;
    return SegmentHit{std::clamp(t, 0.0, 1.0), std::clamp(u, 0.0, 1.0)};
}

inline double polyline_length(std::span<const Vec2> pts) {
    double len = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
    return len;
}

/// Point at arclength s along the polyline, clamped to its ends.
inline Vec2 point_at_arclength(std::span<const Vec2> pts, double s) {
    if (pts.empty()) return {};
    if (s <= 0.0) return pts.front();
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double seg = distance(pts[i - 1], pts[i]);
        if (s <= seg) {
            if (seg <= 0.0) return pts[i];
            return pts[i - 1] + (pts[i] - pts[i - 1]) * (s / seg);
        }
        s -= seg;
    }
    return pts.back();
}

/// A maximal stretch of a polyline lying inside a polygon, in arclength coordinates.
struct PolyRun {
    double s_begin = 0.0;
    double s_end = 0.0;
    bool begins_at_path_start = false;
    int entry_edge = -1;   // polygon edge index crossed at entry, -1 if none
    int entry_segment = -1; // polyline segment index at entry
    Vec2 entry_point;
};

inline std::vector<PolyRun> polyline_polygon_runs(std::span<const Vec2> pts,
                                                  const PolygonPoints& poly) {
    std::vector<PolyRun> runs;
    if (pts.size() < 2 || poly.size() < 3) return runs;

    double s_base = 0.0;
    bool in_run = false;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const Vec2& p = pts[i - 1];
        const Vec2& q = pts[i];
        double seg_len = distance(p, q);
        if (seg_len <= 0.0) continue;

        // Crossing parameters along this segment, with the polygon edge involved.
        std::vector<std::pair<double, int>> cuts{{0.0, -1}, {1.0, -1}};
        for (std::size_t e = 0; e < poly.size(); ++e) {
            const Vec2& c = poly[e];
            const Vec2& d = poly[(e + 1) % poly.size()];
            if (auto hit = segment_intersection(p, q, c, d)) {
                cuts.emplace_back(hit->t, static_cast<int>(e));
            }
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(),
                               [](const auto& a, const auto& b) {
                                   return std::abs(a.first - b.first) < 1e-12;
                               }),
                   cuts.end());

        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            double t0 = cuts[k].first;
            double t1 = cuts[k + 1].first;
            if (t1 - t0 < 1e-12) continue;
            Vec2 mid = p + (q - p) * ((t0 + t1) * 0.5);
            bool inside = point_in_polygon(poly, mid);
            if (inside) {
                if (in_run) {
                    runs.back().s_end = s_base + t1 * seg_len;
                } else {
                    PolyRun run;
                    run.s_begin = s_base + t0 * seg_len;
                    run.s_end = s_base + t1 * seg_len;
                    run.entry_edge = cuts[k].second;
                    run.entry_segment = static_cast<int>(i - 1);
                    run.entry_point = p + (q - p) * t0;
                    run.begins_at_path_start = (i == 1 && t0 <= 1e-12);
                    runs.push_back(run);
                    in_run = true;
                }
            } else {
                in_run = false;
            }
        }
        s_base += seg_len;
    }
    return runs;
}

/// Total polyline length inside the polygon.
inline double polyline_overlap_length(std::span<const Vec2> pts, const PolygonPoints& poly) {
    double total = 0.0;
    for (const auto& run : polyline_polygon_runs(pts, poly)) total += run.s_end - run.s_begin;
    return total;
}

/// True when the polygons' interiors are disjoint (touching boundaries allowed).
inline bool polygons_interiors_disjoint(const PolygonPoints& a, const PolygonPoints& b) {
    const double eps = 1e-12;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Vec2& p = a[i];
        const Vec2& q = a[(i + 1) % a.size()];
        for (std::size_t j = 0; j < b.size(); ++j) {
            const Vec2& c = b[j];
            const Vec2& d = b[(j + 1) % b.size()];
            if (auto hit = segment_intersection(p, q, c, d)) {
                if (hit->t > eps && hit->t < 1.0 - eps && hit->u > eps && hit->u < 1.0 - eps) {
                    return false;
                }
            }
        }
    }
    auto strictly_inside = [](const PolygonPoints& poly, const Vec2& p) {
        if (!point_in_polygon(poly, p)) return false;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            if (point_on_segment(p, poly[i], poly[(i + 1) % poly.size()])) return false;
        }
        return true;
    };
    for (const auto& p : a)
        if (strictly_inside(b, p)) return false;
    for (const auto& p : b)
        if (strictly_inside(a, p)) return false;
    return true;
}

} // namespace spot
