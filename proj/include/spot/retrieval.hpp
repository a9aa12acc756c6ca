#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spot/documents.hpp"
#include "spot/embedding.hpp"
#include "spot/minhash.hpp"
#include "spot/rtree.hpp"
#include "spot/tokens.hpp"

namespace spot {

struct RetrievalConfig {
    double radius = 60.0;      // spatial filter, meters
    double tau_sim = 0.2;      // semantic filter threshold
    std::uint32_t L = 128;     // signature length
    std::uint32_t shingle_k = 2;
    std::uint64_t seed = 1;
    double beta_base = 0.5;
    int n_optimal = 5;
    int top_k = 5;
    int embed_dims = 256;
    int memory_capacity = 32;
    int prompt_budget = 8000;  // characters

    [[nodiscard]] MinHashConfig minhash_cfg() const { return {L, seed, shingle_k}; }
};

inline void validate(const RetrievalConfig& c) {
    require(c.radius > 0 && c.L > 0 && c.shingle_k > 0 && c.n_optimal > 0 && c.top_k > 0 &&
                c.embed_dims > 0 && c.memory_capacity > 0 && c.prompt_budget > 0,
            Errc::bad_input, "retrieval config values must be positive");
    require(c.tau_sim >= 0.0 && c.tau_sim <= 1.0, Errc::bad_input, "tau_sim must be in [0,1]");
    require(c.beta_base >= 0.0 && c.beta_base <= 1.0, Errc::bad_input,
            "beta_base must be in [0,1]");
}

/// Indexed corpus: documents plus their signatures, tokens, and spatial index.
class DocStore {
public:
    struct Record {
        MapDocument doc;
        MinHashSignature sig;
        std::string token_text;
    };

    DocStore() = default;

    DocStore(std::vector<MapDocument> docs, const RetrievalConfig& cfg) {
        validate(cfg);
        std::sort(docs.begin(), docs.end(),
                  [](const MapDocument& a, const MapDocument& b) { return a.doc_id < b.doc_id; });
        std::vector<std::pair<Aabb, std::string>> entries;
        for (auto& d : docs) {
            Record r;
            r.sig = minhash(d.text, cfg.minhash_cfg());
            r.token_text = doc_token_text(d);
            entries.emplace_back(d.bbox, d.doc_id);
            r.doc = std::move(d);
            by_id_.emplace(r.doc.doc_id, std::move(r));
        }
        index_.build(std::move(entries));
    }

    [[nodiscard]] const SpatialIndex& index() const { return index_; }
    [[nodiscard]] const std::map<std::string, Record>& records() const { return by_id_; }

    [[nodiscard]] const Record& record(const std::string& doc_id) const {
        auto it = by_id_.find(doc_id);
        require(it != by_id_.end(), Errc::bad_input, "unknown doc id " + doc_id);
        return it->second;
    }

    /// [DOC] token for a document, derived from its id prefix.
    static std::string doc_token_text(const MapDocument& d) {
        if (d.doc_id.rfind("road_", 0) == 0) {
            bool covered = d.text.find("Coverage = none") == std::string::npos;
            return tokenize_doc("Road", d.doc_id.substr(5), {covered ? "Covered" : "Blind"}).text;
        }
        if (d.doc_id.rfind("zone_", 0) == 0) {
            return tokenize_doc("Zone", d.doc_id.substr(5), {"Surveillance"}).text;
        }
        if (d.doc_id.rfind("cam_", 0) == 0) {
            return tokenize_doc("Camera", d.doc_id.substr(4), {"CCTV"}).text;
        }
        return tokenize_doc("Doc", d.doc_id, {}).text;
    }

private:
    std::map<std::string, Record> by_id_;
    SpatialIndex index_;
};

/// Spatial-radius hits intersected with the MinHash-filtered semantic hits,
/// ordered by doc_id. Without a position the spatial filter admits everything.
inline std::vector<std::string> hybrid_retrieve(const std::string& query_text,
                                                std::optional<Vec2> position,
                                                const DocStore& store,
                                                const RetrievalConfig& cfg) {
    MinHashSignature q = minhash(query_text, cfg.minhash_cfg());

    std::vector<std::string> spatial;
    if (position) {
        spatial = store.index().query_radius(*position, cfg.radius);
    } else {
        for (const auto& [id, r] : store.records()) spatial.push_back(id);
    }

    std::vector<std::string> out;
    for (const auto& id : spatial) {
        if (jaccard_estimate(q, store.record(id).sig) >= cfg.tau_sim) out.push_back(id);
    }
    return out; // spatial hits are already ascending by doc_id
}

/// Reranking weight scaled down as retrieval context gets richer.
inline double context_beta(int n_cand, const RetrievalConfig& cfg) {
    require(n_cand >= 0, Errc::bad_input, "candidate count cannot be negative");
    double cr = std::min(1.0, static_cast<double>(n_cand) / static_cast<double>(cfg.n_optimal));
    return cfg.beta_base * (0.3 + 0.7 * (1.0 - cr));
}

struct RankedDoc {
    std::string doc_id;
    double s_base = 0.0;
    double p_align = 0.5;
    double s_final = 0.0;
};

/// Blend the retrieval score with scene-document alignment and keep the top_k.
inline std::vector<RankedDoc> rerank(const std::vector<std::string>& candidates,
                                     const std::string& scene_text,
                                     const std::string& query_text, const DocStore& store,
                                     const Embedder& embedder, const RetrievalConfig& cfg) {
    double beta = context_beta(static_cast<int>(candidates.size()), cfg);
    MinHashSignature q = minhash(query_text, cfg.minhash_cfg());
    EmbeddingVector e_scene = embedder.embed(scene_text, cfg.embed_dims);

    std::vector<RankedDoc> ranked;
    ranked.reserve(candidates.size());
    for (const auto& id : candidates) {
        const auto& rec = store.record(id);
        RankedDoc r;
        r.doc_id = id;
        r.s_base = jaccard_estimate(q, rec.sig);
        r.p_align = align_prob(e_scene, embedder.embed(rec.token_text, cfg.embed_dims));
        r.s_final = (1.0 - beta) * r.s_base + beta * r.p_align;
        ranked.push_back(std::move(r));
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedDoc& a, const RankedDoc& b) {
        if (a.s_final != b.s_final) return a.s_final > b.s_final;
        return a.doc_id < b.doc_id;
    });
    if (ranked.size() > static_cast<std::size_t>(cfg.top_k)) {
        ranked.resize(static_cast<std::size_t>(cfg.top_k));
    }
    return ranked;
}

struct MemoryEntry {
    std::string text;
    EmbeddingVector embedding;
    double timestamp = 0.0;
};

/// Bounded FIFO of past context; selection is cosine top-K with recency ties.
class SessionMemory {
public:
    explicit SessionMemory(int capacity = 32) : capacity_(capacity) {
        require(capacity > 0, Errc::bad_input, "memory capacity must be positive");
    }

    void push(std::string text, EmbeddingVector embedding, double timestamp) {
        entries_.push_back({std::move(text), std::move(embedding), timestamp});
        while (entries_.size() > static_cast<std::size_t>(capacity_)) entries_.pop_front();
    }

    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] const std::deque<MemoryEntry>& entries() const { return entries_; }

    [[nodiscard]] std::vector<MemoryEntry> select(const EmbeddingVector& query, int k) const {
        require(k >= 1, Errc::bad_input, "memory select needs k >= 1");
        std::vector<std::pair<double, std::size_t>> scored;
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            scored.emplace_back(cosine(query, entries_[i].embedding), i);
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second > b.second; // newer first on ties
        });
        std::vector<MemoryEntry> out;
        for (std::size_t i = 0; i < scored.size() && i < static_cast<std::size_t>(k); ++i) {
            out.push_back(entries_[scored[i].second]);
        }
        return out;
    }

private:
    int capacity_;
    std::deque<MemoryEntry> entries_;
};

/// Deterministic prompt assembly: query block, ranked documents, serialized path.
/// Lowest-ranked documents are dropped first to fit the character budget.
inline std::string synthesize_prompt(const std::string& query,
                                     const std::vector<RankedDoc>& ranked, const DocStore& store,
                                     const std::vector<Vec2>& path, int budget) {
    std::string head = "Query:\n" + query + "\n";
    std::string tail;
    if (!path.empty()) {
        tail = "Path:\n";
        tail += join_map(path.begin(), path.end(), " ", [](const Vec2& p) {
            return "(" + format_1dp(p.x) + ", " + format_1dp(p.y) + ")";
        });
        tail += "\n";
    }

    std::vector<std::string> doc_blocks;
    for (const auto& r : ranked) {
        doc_blocks.push_back(r.doc_id + " (s_final=" + strfmt("%.4f", r.s_final) + "): " +
                             store.record(r.doc_id).doc.text + "\n");
    }
    std::size_t keep = doc_blocks.size();
    auto total_len = [&](std::size_t n) {
        std::size_t len = head.size() + tail.size();
        if (n > 0) len += std::string("Context:\n").size();
        for (std::size_t i = 0; i < n; ++i) len += doc_blocks[i].size();
        return len;
    };
    while (keep > 0 && total_len(keep) > static_cast<std::size_t>(budget)) --keep;

    std::string out = head;
    if (keep > 0) {
        out += "Context:\n";
        for (std::size_t i = 0; i < keep; ++i) out += doc_blocks[i];
    }
    out += tail;
    return out;
}

} // namespace spot
