#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "spot/errors.hpp"
#include "spot/geometry.hpp"

namespace spot {

// Request/response schemas for the pluggable reasoning boundary. Implementations
// must answer every queried id exactly once with a score in [0, 1].

struct BranchInfo {
    std::int64_t id = 0;
    double turn_angle_deg = 0.0; // positive = left
    std::vector<std::string> semantic_tags;
    bool feasible = true;
};

struct BranchQuery {
    double aggr = 0.5;
    std::string turn_intent_label = "STRAIGHT"; // PREP_LEFT | PREP_RIGHT | STRAIGHT
    double turn_intent_prob = 1.0 / 3.0;
    double speed_m_s = 0.0;
    Vec2 location;
    std::vector<BranchInfo> branches;
};

struct BranchScore {
    std::int64_t id = 0;
    double score = 0.5;
    std::string reason;
};

struct BranchJudgment {
    std::vector<BranchScore> branches;
};

struct HandoffCandidateInput {
    std::string id;
    double eta_s = 0.0;
    double dwell_s = 0.0;
    double angle_deg = 0.0;
    double speed_m_s = 0.0;
};

struct HandoffQuery {
    std::vector<HandoffCandidateInput> candidates;
};

struct HandoffScore {
    std::string id;
    double score = 0.5;
    std::string reason;
};

struct HandoffJudgment {
    std::vector<HandoffScore> scores;
    /// When false the judgment expresses no camera preference and the planner
    /// keeps its built-in handoff scoring.
    bool authoritative = false;
};

inline void validate(const BranchQuery& q) {
    require(!q.branches.empty(), Errc::invalid_query, "branch query needs >= 1 branch");
    std::set<std::int64_t> ids;
    for (const auto& b : q.branches) {
        require(ids.insert(b.id).second, Errc::invalid_query, "duplicate branch id");
    }
}

inline void validate(const HandoffQuery& q) {
    require(!q.candidates.empty(), Errc::invalid_query, "handoff query needs >= 1 candidate");
    std::set<std::string> ids;
    for (const auto& c : q.candidates) {
        require(ids.insert(c.id).second, Errc::invalid_query, "duplicate candidate id");
    }
}

/// Checks totality: every queried id answered exactly once, scores within [0, 1].
inline void validate_judgment(const BranchQuery& q, const BranchJudgment& j) {
    require(j.branches.size() == q.branches.size(), Errc::invalid_query,
            "judgment must answer every branch exactly once");
    std::set<std::int64_t> answered;
    for (const auto& b : j.branches) {
        require(answered.insert(b.id).second, Errc::invalid_query, "duplicate judgment id");
        require(b.score >= 0.0 && b.score <= 1.0, Errc::invalid_query, "score out of [0,1]");
    }
    for (const auto& b : q.branches) {
        require(answered.count(b.id) > 0, Errc::invalid_query,
                "judgment missing branch " + std::to_string(b.id));
    }
}

class Reasoner {
public:
    virtual ~Reasoner() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    virtual BranchJudgment judge_branches(const BranchQuery& q) = 0;
    virtual HandoffJudgment score_cameras(const HandoffQuery& q) = 0;
};

/// Neutral-point reasoner: every score is 0.5, so fusion terms vanish and the
/// planner relies on its physical/heuristic scores alone.
class NullReasoner final : public Reasoner {
public:
    [[nodiscard]] std::string name() const override { return "null"; }

    BranchJudgment judge_branches(const BranchQuery& q) override {
        validate(q);
        BranchJudgment j;
        for (const auto& b : q.branches) j.branches.push_back({b.id, 0.5, "neutral"});
        return j;
    }

    HandoffJudgment score_cameras(const HandoffQuery& q) override {
        validate(q);
        HandoffJudgment j;
        j.authoritative = false;
        for (const auto& c : q.candidates) j.scores.push_back({c.id, 0.5, "neutral"});
        return j;
    }
};

inline const char* branch_turn_class(double angle_deg) {
    if (angle_deg > 15.0) return "Left";
    if (angle_deg < -15.0) return "Right";
    return "Straight";
}

/// Deterministic rule compilation of the branch-validation and camera-scoring
/// criteria; used as the no-network stand-in for a remote model.
class HeuristicReasoner final : public Reasoner {
public:
    [[nodiscard]] std::string name() const override { return "heuristic"; }

    BranchJudgment judge_branches(const BranchQuery& q) override {
        validate(q);
        BranchJudgment j;
        for (const auto& b : q.branches) {
            double score = 0.5;
            std::vector<std::string> fired;
            std::string turn = branch_turn_class(b.turn_angle_deg);
            if (intent_matches(q.turn_intent_label, turn)) {
                score += 0.25;
                fired.push_back("intent_match");
            }
            if (std::abs(b.turn_angle_deg) > 60.0 && q.speed_m_s > 10.0) {
                score -= 0.2;
                fired.push_back("infeasible_speed");
            }
            if (tags_forbid(b.semantic_tags, turn)) {
                score -= 0.3;
                fired.push_back("semantic_rule");
            }
            score = std::clamp(score, 0.05, 0.95);
            j.branches.push_back({b.id, score, fired.empty() ? "no_rule" : join_names(fired)});
        }
        return j;
    }

    HandoffJudgment score_cameras(const HandoffQuery& q) override {
        validate(q);
        HandoffJudgment j;
        j.authoritative = true;
        for (const auto& c : q.candidates) {
            j.scores.push_back({c.id, handoff_rule_score(c), "dwell/angle/eta rules"});
        }
        return j;
    }

    /// Dwell >= 1 s dominates, 30-60 degree approach preferred, shorter ETA better.
    static double handoff_rule_score(const HandoffCandidateInput& c) {
        double dwell_term = std::min(c.dwell_s / 1.0, 1.0);
        double angle_fit;
        double a = std::clamp(c.angle_deg, 0.0, 90.0);
        if (a < 30.0) {
            angle_fit = a / 30.0;
        } else if (a <= 60.0) {
            angle_fit = 1.0;
        } else {
            angle_fit = (90.0 - a) / 30.0;
        }
        return 0.5 * dwell_term + 0.3 * angle_fit + 0.2 * std::exp(-c.eta_s / 10.0);
    }

private:
    static bool intent_matches(const std::string& intent, const std::string& turn) {
        if (intent == "PREP_LEFT") return turn == "Left";
        if (intent == "PREP_RIGHT") return turn == "Right";
        return turn == "Straight";
    }

    static bool tags_forbid(const std::vector<std::string>& tags, const std::string& turn) {
        for (const auto& t : tags) {
            if (t == "NoLeft" && turn == "Left") return true;
            if (t == "NoRight" && turn == "Right") return true;
            if (t == "LeftOnly" && turn != "Left") return true;
            if (t == "RightOnly" && turn != "Right") return true;
            if (t == "StraightOnly" && turn != "Straight") return true;
        }
        return false;
    }

    static std::string join_names(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) {
            if (!out.empty()) out += "+";
            out += s;
        }
        return out;
    }
};

} // namespace spot
