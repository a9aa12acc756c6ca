#pragma once

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "spot/reasoner.hpp"
#include "spot/strutil.hpp"

namespace spot {

struct RemoteReasonerConfig {
    std::string endpoint;             // e.g. http://host:port/v1/chat/completions
    std::string model;
    std::string credential_env;       // name of the env var holding the API key
    int timeout_ms = 20000;
    int retries = 2;                  // retries after the first attempt
    double backoff_s = 0.5;           // doubles per retry
    int max_in_flight = 4;
    std::string transcript_path;      // append-only JSONL, empty disables
    std::string replay_path;          // JSONL of past transcripts, empty disables
    bool replay_only = false;         // never touch the network when replaying
};

// Prompt rendering is byte-stable (fixed decimals, fixed key order) so remote
// transcripts can be replayed offline.

inline std::string render_branch_prompt_system() {
    return "You are a Strategic Navigation Supervisor. Your role is to validate the "
           "heuristic path suggestion by analyzing the Driver's Profile and Road Context.";
}

inline std::string render_branch_prompt_user(const BranchQuery& q) {
    std::string s;
    s += "Input Context:\n";
    s += "{\n";
    s += strfmt("  \"driver\": {\"aggr\": %.2f, \"turn_intent\": {\"label\": \"%s\", "
                "\"prob\": %.2f}},\n",
                q.aggr, q.turn_intent_label.c_str(), q.turn_intent_prob);
    s += strfmt("  \"state\": {\"speed_m_s\": %.2f, \"location\": [%.1f, %.1f]},\n", q.speed_m_s,
                q.location.x, q.location.y);
    s += "  \"branches\": [\n";
    for (std::size_t i = 0; i < q.branches.size(); ++i) {
        const auto& b = q.branches[i];
        std::string tags = join_map(b.semantic_tags.begin(), b.semantic_tags.end(), ", ",
                                    [](const std::string& t) { return "\"" + t + "\""; });
        s += strfmt("    {\"id\": %lld, \"turn_angle_deg\": %.2f, \"semantic_tags\": [%s], "
                    "\"feasible\": %s}%s\n",
                    static_cast<long long>(b.id), b.turn_angle_deg, tags.c_str(),
                    b.feasible ? "true" : "false", i + 1 < q.branches.size() ? "," : "");
    }
    s += "  ]\n";
    s += "}\n";
    s += "Reasoning Logic:\n";
    s += "1. Consistency: Does the branch match the driver's intent?\n";
    s += "2. Feasibility: Is the turn physically possible at current speed?\n";
    s += "3. Safety: Does it violate semantic lane rules?\n";
    s += "Output Format:\n";
    s += "JSON: {\"branches\": [{\"id\": <id>, \"score\": 0.0~1.0, \"reason\": \"...\"}]}\n";
    return s;
}

inline std::string render_handoff_prompt_system() {
    return "You are an assistant scoring CCTV candidates for optimal vehicle tracking.";
}

inline std::string render_handoff_prompt_user(const HandoffQuery& q) {
    std::string s;
    s += "Scoring Criteria:\n";
    s += "1. Dwell Time: High priority if >= 1.0s.\n";
    s += "2. Approach Angle: Penalize 90-degree (perpendicular) crossings; prefer 30-60 degrees.\n";
    s += "3. ETA: Shorter is better.\n";
    s += "4. Speed: High speed targets require wider FOV coverage.\n";
    s += "Input Data:\n";
    s += "[\n";
    for (std::size_t i = 0; i < q.candidates.size(); ++i) {
        const auto& c = q.candidates[i];
        s += strfmt("  {\"id\": \"%s\", \"eta_s\": %.2f, \"dwell_s\": %.2f, \"angle_deg\": %.2f, "
                    "\"speed_m_s\": %.2f}%s\n",
                    c.id.c_str(), c.eta_s, c.dwell_s, c.angle_deg, c.speed_m_s,
                    i + 1 < q.candidates.size() ? "," : "");
    }
    s += "]\n";
    s += "Output Format:\n";
    s += "JSON: {\"candidates\": [{\"id\": \"...\", \"score\": 0.0~1.0, \"reason\": \"...\"}]}\n";
    return s;
}

/// First balanced-brace JSON object embedded in free-form text.
inline std::optional<std::string> extract_json_object(const std::string& text) {
    auto start = text.find('{');
    while (start != std::string::npos) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
                if (depth == 0) return text.substr(start, i - start + 1);
            }
        }
        start = text.find('{', start + 1);
    }
    return std::nullopt;
}

/// HTTP chat-completions client with bounded concurrency, retry with backoff,
/// transcript recording, and graceful degradation to the neutral point.
class RemoteReasoner final : public Reasoner {
public:
    [[nodiscard]] const RemoteReasonerConfig& config() const { return cfg_; }

    explicit RemoteReasoner(RemoteReasonerConfig cfg) : cfg_(std::move(cfg)) {
        if (!cfg_.replay_path.empty()) load_replay(cfg_.replay_path);
    }

    [[nodiscard]] std::string name() const override { return "remote"; }

    BranchJudgment judge_branches(const BranchQuery& q) override {
        validate(q);
        auto reply = complete(render_branch_prompt_system(), render_branch_prompt_user(q));
        if (reply.ok) {
            if (auto judgment = parse_branch_reply(reply.content, q)) return *judgment;
            reply.error = "unparseable reply";
        }
        BranchJudgment degraded;
        for (const auto& b : q.branches) {
            degraded.branches.push_back({b.id, 0.5, "degraded: " + reply.error});
        }
        return degraded;
    }

    /// Raw completion for free-form prompts (map QA); empty on failure.
    std::optional<std::string> complete_text(const std::string& system, const std::string& user) {
        auto reply = complete(system, user);
        if (reply.ok) return reply.content;
        return std::nullopt;
    }

    HandoffJudgment score_cameras(const HandoffQuery& q) override {
        validate(q);
        auto reply = complete(render_handoff_prompt_system(), render_handoff_prompt_user(q));
        if (reply.ok) {
            if (auto judgment = parse_handoff_reply(reply.content, q)) return *judgment;
            reply.error = "unparseable reply";
        }
        HandoffJudgment degraded;
        degraded.authoritative = false;
        for (const auto& c : q.candidates) {
            degraded.scores.push_back({c.id, 0.5, "degraded: " + reply.error});
        }
        return degraded;
    }

private:
    struct Reply {
        bool ok = false;
        std::string content;
        std::string error;
    };

    RemoteReasonerConfig cfg_;
    std::mutex transcript_mu_;
    std::mutex replay_mu_;
    std::map<std::string, std::string> replay_;
    std::mutex gate_mu_;
    std::condition_variable gate_cv_;
    int in_flight_ = 0;

    struct FlightGuard {
        RemoteReasoner& r;
        explicit FlightGuard(RemoteReasoner& owner) : r(owner) {
            std::unique_lock lock(r.gate_mu_);
            r.gate_cv_.wait(lock, [&] { return r.in_flight_ < r.cfg_.max_in_flight; });
            ++r.in_flight_;
        }
        ~FlightGuard() {
            {
                std::lock_guard lock(r.gate_mu_);
                --r.in_flight_;
            }
            r.gate_cv_.notify_one();
        }
    };

    static std::string hash_hex(const std::string& s) {
        return strfmt("%016llx", static_cast<unsigned long long>(splitmix64(fnv1a64(s))));
    }

    void load_replay(const std::string& path) {
        std::ifstream in(path);
        if (!in.good()) return;
        std::string line;
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            try {
                auto j = nlohmann::json::parse(line);
                replay_[j.at("request_hash").get<std::string>()] =
                    j.at("reply").get<std::string>();
            } catch (...) {
                // skip unreadable transcript lines
            }
        }
    }

    void record_transcript(const std::string& hash, const std::string& prompt,
                           const std::string& reply) {
        if (cfg_.transcript_path.empty()) return;
        nlohmann::json j{{"request_hash", hash},
                         {"prompt", prompt},
                         {"reply", reply},
                         {"timestamp", std::chrono::duration_cast<std::chrono::milliseconds>(
                                           std::chrono::system_clock::now().time_since_epoch())
                                           .count()}};
        std::lock_guard lock(transcript_mu_);
        std::ofstream out(cfg_.transcript_path, std::ios::app | std::ios::binary);
        if (out.good()) out << j.dump() << "\n";
    }

    Reply complete(const std::string& system, const std::string& user) {
        nlohmann::json body{
            {"model", cfg_.model},
            {"messages",
             {{{"role", "system"}, {"content", system}}, {{"role", "user"}, {"content", user}}}},
            {"temperature", 0}};
        std::string body_str = body.dump();
        std::string hash = hash_hex(body_str);

        {
            std::lock_guard lock(replay_mu_);
            auto it = replay_.find(hash);
            if (it != replay_.end()) return {true, it->second, ""};
        }
        if (cfg_.replay_only) return {false, "", "replay miss"};
        if (cfg_.endpoint.empty()) return {false, "", "no endpoint configured"};

        FlightGuard guard(*this);
        std::string error = "unknown";
        for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
            if (attempt > 0) {
                auto backoff = std::chrono::duration<double>(
                    cfg_.backoff_s * std::pow(2.0, attempt - 1));
                std::this_thread::sleep_for(backoff);
            }
            auto result = post_once(body_str);
            if (result.ok) {
                record_transcript(hash, system + "\n" + user, result.content);
                return result;
            }
            error = result.error;
        }
        return {false, "", error};
    }

    Reply post_once(const std::string& body) {
        auto [base, path] = split_url(cfg_.endpoint);
        if (base.empty()) return {false, "", "bad endpoint url"};
        httplib::Client client(base);
        client.set_connection_timeout(0, cfg_.timeout_ms * 1000);
        client.set_read_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);
        client.set_write_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);

        httplib::Headers headers;
        if (!cfg_.credential_env.empty()) {
            if (const char* cred = std::getenv(cfg_.credential_env.c_str())) {
                headers.emplace("Authorization", std::string("Bearer ") + cred);
            }
        }
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) return {false, "", "transport: " + httplib::to_string(res.error())};
        if (res->status != 200) return {false, "", "http status " + std::to_string(res->status)};
        try {
            auto j = nlohmann::json::parse(res->body);
            return {true, j.at("choices").at(0).at("message").at("content").get<std::string>(),
                    ""};
        } catch (const std::exception& e) {
            return {false, "", std::string("bad completion body: ") + e.what()};
        }
    }

    static std::pair<std::string, std::string> split_url(const std::string& url) {
        auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos) return {"", ""};
        auto path_start = url.find('/', scheme_end + 3);
        if (path_start == std::string::npos) return {url, "/"};
        return {url.substr(0, path_start), url.substr(path_start)};
    }

    static std::optional<BranchJudgment> parse_branch_reply(const std::string& content,
                                                            const BranchQuery& q) {
        auto obj = extract_json_object(content);
        if (!obj) return std::nullopt;
        try {
            auto j = nlohmann::json::parse(*obj);
            BranchJudgment out;
            for (const auto& bj : j.at("branches")) {
                BranchScore s;
                s.id = bj.at("id").get<std::int64_t>();
                s.score = std::clamp(bj.at("score").get<double>(), 0.0, 1.0);
                s.reason = bj.value("reason", "");
                out.branches.push_back(std::move(s));
            }
            validate_judgment(q, out);
            return out;
        } catch (...) {
            return std::nullopt;
        }
    }

    static std::optional<HandoffJudgment> parse_handoff_reply(const std::string& content,
                                                              const HandoffQuery& q) {
        auto obj = extract_json_object(content);
        if (!obj) return std::nullopt;
        try {
            auto j = nlohmann::json::parse(*obj);
            HandoffJudgment out;
            out.authoritative = true;
            const auto& arr = j.contains("candidates") ? j.at("candidates") : j.at("scores");
            for (const auto& cj : arr) {
                HandoffScore s;
                s.id = cj.at("id").get<std::string>();
                s.score = std::clamp(cj.at("score").get<double>(), 0.0, 1.0);
                s.reason = cj.value("reason", "");
                out.scores.push_back(std::move(s));
            }
            std::set<std::string> answered;
            for (const auto& s : out.scores) {
                if (!answered.insert(s.id).second) return std::nullopt;
            }
            for (const auto& c : q.candidates) {
                if (!answered.count(c.id)) return std::nullopt;
            }
            if (out.scores.size() != q.candidates.size()) return std::nullopt;
            return out;
        } catch (...) {
            return std::nullopt;
        }
    }
};

} // namespace spot
