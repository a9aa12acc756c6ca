#pragma once

#include <string>
#include <vector>

#include "spot/perception.hpp"
#include "spot/strutil.hpp"

namespace spot {

// Templated text renderings of states, routes, and documents. The exact layouts
// are part of the retrieval contract; coordinates render to one decimal place.

struct SceneToken {
    std::string text;
    std::string cam_id;
};

struct RouteToken {
    std::string text;
    std::string next_id;
};

struct DocToken {
    std::string text;
    std::string obj_id;
};

inline SceneToken tokenize_scene(const Vec2& pos, const std::string& cam_id,
                                 const std::vector<std::string>& dir_history) {
    require(!dir_history.empty(), Errc::bad_input, "scene token needs >= 1 direction label");
    std::string mv = join(dir_history, ">");
    SceneToken tok;
    tok.cam_id = cam_id;
    tok.text = "[SCENE] cam=" + cam_id + " mv=" + mv + " pos=(" + format_1dp(pos.x) + ", " +
               format_1dp(pos.y) + ")";
    return tok;
}

inline SceneToken tokenize_scene(const KinematicState& state, const std::string& cam_id,
                                 const std::vector<Dir8>& dir_history) {
    std::vector<std::string> labels;
    labels.reserve(dir_history.size());
    for (Dir8 d : dir_history) labels.emplace_back(to_string(d));
    return tokenize_scene(state.position, cam_id, labels);
}

inline RouteToken tokenize_route(const std::string& next_cam, const std::string& turn_type,
                                 const std::vector<std::string>& tags) {
    RouteToken tok;
    tok.next_id = next_cam;
    tok.text = "[ROUTE] to=" + next_cam + " turn=" + turn_type +
               " sem=" + (tags.empty() ? "none" : join(tags, ","));
    return tok;
}

inline DocToken tokenize_doc(const std::string& obj_type, const std::string& id,
                             const std::vector<std::string>& attrs) {
    DocToken tok;
    tok.obj_id = id;
    tok.text = "[DOC] type=" + obj_type + " id=" + id +
               " sem=" + (attrs.empty() ? "none" : join(attrs, ","));
    return tok;
}

} // namespace spot
