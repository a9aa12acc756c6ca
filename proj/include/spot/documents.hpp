#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spot/gates.hpp"
#include "spot/strutil.hpp"

namespace spot {

// Textual map knowledge units. Values that the text renders to one decimal are
// stored as integer tenths so render -> parse -> render is lossless.

struct RoadDocLine {
    RoadId road_id = 0;
    int n_waypoints = 0;
    std::vector<std::pair<std::string, long long>> coverage; // (cctv_id, percent tenths)
    std::vector<RoadId> neighbors;                           // ascending
    bool operator==(const RoadDocLine&) const = default;
};

struct CameraDocLine {
    std::string cctv_id;
    long long x_t = 0, y_t = 0, z_t = 0; // position, tenths of a meter
    long long yaw_t = 0, pitch_t = 0, fov_t = 0; // degrees, tenths
    bool operator==(const CameraDocLine&) const = default;
};

struct ZoneDocLine {
    std::string zone_id;
    std::vector<std::string> cctvs;  // ascending
    std::vector<RoadId> roads;       // ascending
    std::vector<RoadId> neighbors;   // ascending
    bool operator==(const ZoneDocLine&) const = default;
};

using DocLine = std::variant<RoadDocLine, CameraDocLine, ZoneDocLine>;

inline std::string render(const RoadDocLine& d) {
    std::string s = "Road " + std::to_string(d.road_id) +
                    ": Waypoints = " + std::to_string(d.n_waypoints) + ", Coverage = ";
    if (d.coverage.empty()) {
        s += "none";
    } else {
        s += join_map(d.coverage.begin(), d.coverage.end(), ", ", [](const auto& c) {
            return c.first + " (" + tenths_to_string(c.second) + "%)";
        });
    }
    s += ", Neighbors = [" +
         join_map(d.neighbors.begin(), d.neighbors.end(), ", ",
                  [](RoadId r) { return std::to_string(r); }) +
         "]";
    return s;
}

inline std::string render(const CameraDocLine& d) {
    return d.cctv_id + ": Pos = (" + tenths_to_string(d.x_t) + ", " + tenths_to_string(d.y_t) +
           ", " + tenths_to_string(d.z_t) + "), Yaw = " + tenths_to_string(d.yaw_t) +
           ", Pitch = " + tenths_to_string(d.pitch_t) + ", FOV = " + tenths_to_string(d.fov_t);
}

inline std::string render(const ZoneDocLine& d) {
    auto ids = [](const std::vector<RoadId>& v) {
        return join_map(v.begin(), v.end(), ", ", [](RoadId r) { return std::to_string(r); });
    };
    return "Zone " + d.zone_id + ": CCTVs = [" + join(d.cctvs, ", ") + "], Roads = [" +
           ids(d.roads) + "], Neighbors = [" + ids(d.neighbors) + "]";
}

inline std::string render(const DocLine& d) {
    return std::visit([](const auto& v) { return render(v); }, d);
}

namespace detail {

inline long long parse_tenths(const std::string& s) {
    std::string t = trim(s);
    require(!t.empty(), Errc::bad_input, "empty number");
    bool neg = t[0] == '-';
    std::size_t i = neg ? 1 : 0;
    long long whole = 0, frac = 0;
    bool seen_dot = false, seen_digit = false;
    int frac_digits = 0;
    for (; i < t.size(); ++i) {
        if (t[i] == '.') {
            require(!seen_dot, Errc::bad_input, "malformed number: " + s);
            seen_dot = true;
        } else if (t[i] >= '0' && t[i] <= '9') {
            seen_digit = true;
            if (seen_dot) {
                if (frac_digits == 0) frac = t[i] - '0';
                ++frac_digits;
            } else {
                whole = whole * 10 + (t[i] - '0');
            }
        } else {
            raise(Errc::bad_input, "malformed number: " + s);
        }
    }
    require(seen_digit && frac_digits <= 1, Errc::bad_input, "expected one decimal: " + s);
    long long v = whole * 10 + frac;
    return neg ? -v : v;
}

inline std::vector<std::string> parse_bracket_list(const std::string& s) {
    std::string t = trim(s);
    require(t.size() >= 2 && t.front() == '[' && t.back() == ']', Errc::bad_input,
            "expected bracketed list: " + s);
    std::string inner = trim(t.substr(1, t.size() - 2));
    std::vector<std::string> out;
    if (inner.empty()) return out;
    for (auto& part : split(inner, ',')) out.push_back(trim(part));
    return out;
}

inline std::vector<RoadId> parse_road_list(const std::string& s) {
    std::vector<RoadId> out;
    for (const auto& p : parse_bracket_list(s)) out.push_back(std::stoi(p));
    return out;
}

// Split on top-level commas only (commas inside (...) or [...] are kept).
inline std::vector<std::string> split_top_level(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string expect_prefix(const std::string& s, const std::string& prefix) {
    require(s.rfind(prefix, 0) == 0, Errc::bad_input,
            "expected '" + prefix + "' in: " + s);
    return trim(s.substr(prefix.size()));
}

} // namespace detail

inline DocLine parse_doc_line(const std::string& line) {
    using namespace detail;
    std::string s = trim(line);
    if (s.rfind("Road ", 0) == 0) {
        auto colon = s.find(':');
        require(colon != std::string::npos, Errc::bad_input, "road line missing ':': " + line);
        RoadDocLine d;
        d.road_id = std::stoi(trim(s.substr(5, colon - 5)));
        auto fields = split_top_level(s.substr(colon + 1));
        require(fields.size() >= 3, Errc::bad_input, "road line needs 3 fields: " + line);
        d.n_waypoints = std::stoi(expect_prefix(trim(fields[0]), "Waypoints ="));
        std::string cov = expect_prefix(trim(fields[1]), "Coverage =");
        std::size_t idx = 2;
        if (cov != "none") {
            // coverage entries were split on top-level commas too
            std::vector<std::string> entries{cov};
            while (idx < fields.size() && trim(fields[idx]).rfind("Neighbors =", 0) != 0) {
                entries.push_back(trim(fields[idx]));
                ++idx;
            }
            for (const auto& e : entries) {
                auto open = e.find('(');
                auto close = e.find("%)");
                require(open != std::string::npos && close != std::string::npos, Errc::bad_input,
                        "malformed coverage entry: " + e);
                d.coverage.emplace_back(trim(e.substr(0, open)),
                                        parse_tenths(e.substr(open + 1, close - open - 1)));
            }
        }
        require(idx < fields.size(), Errc::bad_input, "road line missing neighbors: " + line);
        d.neighbors = parse_road_list(expect_prefix(trim(fields[idx]), "Neighbors ="));
        return d;
    }
    if (s.rfind("Zone ", 0) == 0) {
        auto colon = s.find(':');
        require(colon != std::string::npos, Errc::bad_input, "zone line missing ':': " + line);
        ZoneDocLine d;
        d.zone_id = trim(s.substr(5, colon - 5));
        auto fields = split_top_level(s.substr(colon + 1));
        require(fields.size() == 3, Errc::bad_input, "zone line needs 3 fields: " + line);
        d.cctvs = parse_bracket_list(expect_prefix(trim(fields[0]), "CCTVs ="));
        d.roads = parse_road_list(expect_prefix(trim(fields[1]), "Roads ="));
        d.neighbors = parse_road_list(expect_prefix(trim(fields[2]), "Neighbors ="));
        return d;
    }
    // camera line: "CCTV_05: Pos = (x, y, z), Yaw = a, Pitch = b, FOV = c"
    auto colon = s.find(':');
    require(colon != std::string::npos, Errc::bad_input, "unrecognized document line: " + line);
    CameraDocLine d;
    d.cctv_id = trim(s.substr(0, colon));
    auto fields = detail::split_top_level(s.substr(colon + 1));
    require(fields.size() == 4, Errc::bad_input, "camera line needs 4 fields: " + line);
    std::string pos = expect_prefix(trim(fields[0]), "Pos =");
    require(pos.size() >= 2 && pos.front() == '(' && pos.back() == ')', Errc::bad_input,
            "malformed camera position: " + line);
    auto xyz = split(pos.substr(1, pos.size() - 2), ',');
    require(xyz.size() == 3, Errc::bad_input, "camera position needs 3 values: " + line);
    d.x_t = parse_tenths(xyz[0]);
    d.y_t = parse_tenths(xyz[1]);
    d.z_t = parse_tenths(xyz[2]);
    d.yaw_t = parse_tenths(expect_prefix(trim(fields[1]), "Yaw ="));
    d.pitch_t = parse_tenths(expect_prefix(trim(fields[2]), "Pitch ="));
    d.fov_t = parse_tenths(expect_prefix(trim(fields[3]), "FOV ="));
    return d;
}

/// A document plus the spatial/semantic handles retrieval needs.
struct MapDocument {
    std::string doc_id;
    std::string text;
    std::vector<std::string> subject_ids;
    Aabb bbox;
};

inline std::vector<MapDocument> generate_documents(const RoadGraph& g,
                                                   const std::vector<RoadCctvGate>& gates,
                                                   const std::vector<Zone>& zones,
                                                   const std::vector<CameraSpec>& cams,
                                                   const std::vector<FovPolygon>& fovs) {
    std::vector<MapDocument> docs;

    for (const auto& [rid, seg] : g.roads) {
        RoadDocLine line;
        line.road_id = rid;
        line.n_waypoints = static_cast<int>(seg.waypoints.size());
        std::vector<std::pair<double, const RoadCctvGate*>> covs;
        for (const auto& gate : gates) {
            if (gate.road_id == rid) covs.emplace_back(gate.coverage_ratio, &gate);
        }
        std::sort(covs.begin(), covs.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second->cctv_id < b.second->cctv_id;
        });
        for (const auto& [ratio, gate] : covs) {
            line.coverage.emplace_back(gate->cctv_id, to_tenths(ratio * 100.0));
        }
        line.neighbors.assign(seg.neighbors.begin(), seg.neighbors.end());

        MapDocument doc;
        doc.doc_id = "road_" + std::to_string(rid);
        doc.text = render(line);
        doc.subject_ids = {std::to_string(rid)};
        for (WaypointId id : seg.waypoints) doc.bbox.expand(g.wp(id).position);
        docs.push_back(std::move(doc));
    }

    for (const auto& z : zones) {
        ZoneDocLine line;
        line.zone_id = z.zone_id;
        line.cctvs.assign(z.cctvs.begin(), z.cctvs.end());
        line.roads.assign(z.covered_roads.begin(), z.covered_roads.end());
        line.neighbors.assign(z.neighbor_roads.begin(), z.neighbor_roads.end());

        MapDocument doc;
        doc.doc_id = "zone_" + z.zone_id;
        doc.text = render(line);
        doc.subject_ids.assign(z.cctvs.begin(), z.cctvs.end());
        for (RoadId rid : z.covered_roads) {
            for (WaypointId id : g.roads.at(rid).waypoints) doc.bbox.expand(g.wp(id).position);
        }
        for (const auto& cam : cams) {
            if (z.cctvs.count(cam.cctv_id)) doc.bbox.expand(Vec2{cam.position.x, cam.position.y});
        }
        docs.push_back(std::move(doc));
    }

    for (const auto& cam : cams) {
        CameraDocLine line;
        line.cctv_id = cam.cctv_id;
        line.x_t = to_tenths(cam.position.x);
        line.y_t = to_tenths(cam.position.y);
        line.z_t = to_tenths(cam.position.z);
        line.yaw_t = to_tenths(cam.yaw_deg);
        line.pitch_t = to_tenths(cam.pitch_deg);
        line.fov_t = to_tenths(cam.fov_deg);

        MapDocument doc;
        doc.doc_id = "cam_" + cam.cctv_id;
        doc.text = render(line);
        doc.subject_ids = {cam.cctv_id};
        auto fov = std::find_if(fovs.begin(), fovs.end(),
                                [&](const FovPolygon& f) { return f.cctv_id == cam.cctv_id; });
        if (fov != fovs.end()) {
            for (const auto& v : fov->vertices) doc.bbox.expand(v);
        }
        doc.bbox.expand(Vec2{cam.position.x, cam.position.y});
        docs.push_back(std::move(doc));
    }
    return docs;
}

} // namespace spot
