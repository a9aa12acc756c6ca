#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "spot/errors.hpp"
#include "spot/geometry.hpp"
#include "spot/strutil.hpp"

namespace spot {

/// Predicted and ground-truth point sequences plus the index alignment pairing
/// each predicted point with a truth point (nearest timestamp by construction).
struct TrajectoryPair {
    std::vector<Vec2> predicted;
    std::vector<Vec2> truth;
    std::vector<int> alignment; // truth index per predicted point, monotone
};

/// Pair timestamped predictions with the nearest-in-time truth samples.
inline TrajectoryPair align_by_time(const std::vector<Vec2>& predicted,
                                    const std::vector<double>& pred_times,
                                    const std::vector<Vec2>& truth,
                                    const std::vector<double>& truth_times) {
    require(predicted.size() == pred_times.size() && truth.size() == truth_times.size(),
            Errc::bad_input, "points and timestamps must pair up");
    TrajectoryPair pair;
    pair.predicted = predicted;
    pair.truth = truth;
    if (truth.empty()) return pair;
    std::size_t cursor = 0;
    for (double t : pred_times) {
        while (cursor + 1 < truth_times.size() &&
               std::abs(truth_times[cursor + 1] - t) <= std::abs(truth_times[cursor] - t)) {
            ++cursor;
        }
        pair.alignment.push_back(static_cast<int>(cursor));
    }
    return pair;
}

inline void validate(const TrajectoryPair& p) {
    require(!p.predicted.empty(), Errc::bad_input, "empty predicted trajectory");
    require(p.alignment.size() == p.predicted.size(), Errc::bad_input,
            "alignment must cover all predicted points");
    int prev = -1;
    for (int idx : p.alignment) {
        require(idx >= 0 && idx < static_cast<int>(p.truth.size()), Errc::bad_input,
                "alignment index out of range");
        require(idx >= prev, Errc::bad_input, "alignment must be monotone");
        prev = idx;
    }
}

inline double ade(const TrajectoryPair& p) {
    require(!p.predicted.empty() && !p.truth.empty(), Errc::bad_input,
            "ade of empty trajectory");
    validate(p);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.predicted.size(); ++i) {
        sum += distance(p.predicted[i], p.truth[static_cast<std::size_t>(p.alignment[i])]);
    }
    return sum / static_cast<double>(p.predicted.size());
}

inline double fde(const TrajectoryPair& p) {
    require(!p.predicted.empty() && !p.truth.empty(), Errc::bad_input,
            "fde of empty trajectory");
    validate(p);
    return distance(p.predicted.back(), p.truth[static_cast<std::size_t>(p.alignment.back())]);
}

/// Per-axis absolute endpoint errors (|dx|, |dy|) in the world frame.
inline std::pair<double, double> fde_axis(const TrajectoryPair& p) {
    require(!p.predicted.empty() && !p.truth.empty(), Errc::bad_input,
            "fde of empty trajectory");
    validate(p);
    Vec2 d = p.predicted.back() - p.truth[static_cast<std::size_t>(p.alignment.back())];
    return {std::abs(d.x), std::abs(d.y)};
}

struct PredictionCase {
    std::string scenario_id;
    std::string gt_next_cam;
    std::vector<std::string> predicted_topk; // ranked, unique
};

struct TopkCounts {
    int top1 = 0;
    int topk = 0;
    int n = 0;
};

inline TopkCounts topk_accuracy(const std::vector<PredictionCase>& cases, int k) {
    require(k >= 1, Errc::bad_input, "k must be >= 1");
    TopkCounts c;
    c.n = static_cast<int>(cases.size());
    for (const auto& pc : cases) {
        if (!pc.predicted_topk.empty() && pc.predicted_topk.front() == pc.gt_next_cam) ++c.top1;
        auto limit = std::min<std::size_t>(pc.predicted_topk.size(), static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < limit; ++i) {
            if (pc.predicted_topk[i] == pc.gt_next_cam) {
                ++c.topk;
                break;
            }
        }
    }
    return c;
}

/// One (step, distance) row per aligned index.
inline std::vector<std::pair<int, double>> per_step_errors(const TrajectoryPair& p) {
    validate(p);
    std::vector<std::pair<int, double>> rows;
    for (std::size_t i = 0; i < p.predicted.size(); ++i) {
        rows.emplace_back(static_cast<int>(i),
                          distance(p.predicted[i],
                                   p.truth[static_cast<std::size_t>(p.alignment[i])]));
    }
    return rows;
}

struct ReportRow {
    std::string label;
    double fde_x = 0.0;
    double fde_y = 0.0;
    double ade = 0.0;
    int top1 = 0;
    int topk = 0;
    int n_cases = 0;
};

inline void validate(const ReportRow& r) {
    require(r.top1 <= r.topk && r.topk <= r.n_cases, Errc::bad_input,
            "report row must satisfy top1 <= topk <= n");
}

struct Report {
    std::string text;
    nlohmann::json json;
};

inline Report render_report(const std::vector<ReportRow>& rows) {
    for (const auto& r : rows) validate(r);
    std::string text =
        "Model Configuration | FDE(X) [m] | FDE(Y) [m] | ADE [m] | CCTV Top-1 (GT(T1)) | "
        "CCTV Top-K (GT(TK))\n";
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
        text += strfmt("%s | %.2f | %.2f | %.2f | %d | %d\n", r.label.c_str(), r.fde_x, r.fde_y,
                       r.ade, r.top1, r.topk);
        j.push_back({{"model", r.label},
                     {"fde_x", r.fde_x},
                     {"fde_y", r.fde_y},
                     {"ade", r.ade},
                     {"top1", r.top1},
                     {"topk", r.topk},
                     {"n_cases", r.n_cases}});
    }
    return {text, j};
}

inline std::vector<ReportRow> report_rows_from_json(const nlohmann::json& j) {
    std::vector<ReportRow> rows;
    for (const auto& rj : j) {
        ReportRow r;
        r.label = rj.at("model").get<std::string>();
        r.fde_x = rj.at("fde_x").get<double>();
        r.fde_y = rj.at("fde_y").get<double>();
        r.ade = rj.at("ade").get<double>();
        r.top1 = rj.at("top1").get<int>();
        r.topk = rj.at("topk").get<int>();
        r.n_cases = rj.at("n_cases").get<int>();
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace spot
