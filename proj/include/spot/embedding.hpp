#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "spot/errors.hpp"
#include "spot/strutil.hpp"

namespace spot {

struct EmbeddingVector {
    std::vector<double> dims;
    bool normalized = false;

    [[nodiscard]] double norm() const {
        double s = 0.0;
        for (double v : dims) s += v * v;
        return std::sqrt(s);
    }
};

inline double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
    require(a.dims.size() == b.dims.size(), Errc::bad_input, "embedding dims mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dims.size(); ++i) s += a.dims[i] * b.dims[i];
    return s;
}

inline double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

/// Text embedding backend. The default below is deterministic feature hashing;
/// a learned model can be slotted in behind the same interface.
class Embedder {
public:
    virtual ~Embedder() = default;
    [[nodiscard]] virtual EmbeddingVector embed(std::string_view text, int dims) const = 0;
};

/// Signed feature hashing of word unigrams and bigrams, L2-normalized.
class FeatureHashEmbedder final : public Embedder {
public:
    explicit FeatureHashEmbedder(std::uint64_t seed = 0x9d2c5680u) : seed_(seed) {}

    [[nodiscard]] EmbeddingVector embed(std::string_view text, int dims) const override {
        require(dims > 0, Errc::bad_input, "embedding dims must be positive");
        auto ws = words(text);
        require(!ws.empty(), Errc::empty_text, "cannot embed empty text");

        EmbeddingVector v;
        v.dims.assign(static_cast<std::size_t>(dims), 0.0);
        auto add = [&](const std::string& feature) {
            std::uint64_t h = splitmix64(fnv1a64(feature) ^ seed_);
            auto bucket = static_cast<std::size_t>(h % static_cast<std::uint64_t>(dims));
            double sign = (h >> 63) ? -1.0 : 1.0;
            v.dims[bucket] += sign;
        };
        for (const auto& w : ws) add(w);
        for (std::size_t i = 1; i < ws.size(); ++i) add(ws[i - 1] + " " + ws[i]);

        double n = v.norm();
        if (n > 0.0) {
            for (double& x : v.dims) x /= n;
            v.normalized = true;
        } else {
            // all features cancelled; fall back to a deterministic unit vector
            v.dims[0] = 1.0;
            v.normalized = true;
        }
        return v;
    }

private:
    std::uint64_t seed_;
};

/// Alignment probability: logistic of the dot product of two unit vectors.
inline double align_prob(const EmbeddingVector& e_scene, const EmbeddingVector& e_key) {
    require(e_scene.normalized && std::abs(e_scene.norm() - 1.0) <= 1e-9, Errc::not_normalized,
            "scene embedding is not L2-normalized");
    require(e_key.normalized && std::abs(e_key.norm() - 1.0) <= 1e-9, Errc::not_normalized,
            "key embedding is not L2-normalized");
    return 1.0 / (1.0 + std::exp(-dot(e_scene, e_key)));
}

} // namespace spot
