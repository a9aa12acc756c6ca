#pragma once

#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "spot/errors.hpp"
#include "spot/strutil.hpp"

namespace spot {

struct MinHashConfig {
    std::uint32_t length = 128;   // signature slots
    std::uint64_t seed = 1;
    std::uint32_t shingle_k = 2;  // word k-grams
};

struct MinHashSignature {
    std::uint32_t length = 0;
    std::uint64_t seed = 0;
    std::uint32_t shingle_k = 0;
    std::vector<std::uint64_t> slots;

    [[nodiscard]] bool compatible(const MinHashSignature& o) const {
        return length == o.length && seed == o.seed && shingle_k == o.shingle_k;
    }
};

/// Overlapping word k-grams of the lowercased, whitespace-collapsed text.
/// Texts shorter than k words contribute their whole word sequence as one shingle.
inline std::set<std::string> shingle_set(std::string_view text, std::uint32_t k) {
    auto ws = words(text);
    std::set<std::string> out;
    if (ws.empty()) return out;
    if (ws.size() < k) {
        out.insert(join(ws, " "));
        return out;
    }
    for (std::size_t i = 0; i + k <= ws.size(); ++i) {
        std::string sh = ws[i];
        for (std::size_t j = 1; j < k; ++j) sh += " " + ws[i + j];
        out.insert(std::move(sh));
    }
    return out;
}

inline MinHashSignature minhash(std::string_view text, const MinHashConfig& cfg) {
    require(cfg.length > 0 && cfg.shingle_k > 0, Errc::bad_input, "bad minhash config");
    auto shingles = shingle_set(text, cfg.shingle_k);
    require(!shingles.empty(), Errc::empty_text, "cannot sign empty text");

    MinHashSignature sig;
    sig.length = cfg.length;
    sig.seed = cfg.seed;
    sig.shingle_k = cfg.shingle_k;
    sig.slots.assign(cfg.length, std::numeric_limits<std::uint64_t>::max());

    for (const auto& sh : shingles) {
        std::uint64_t base = fnv1a64(sh);
        for (std::uint32_t i = 0; i < cfg.length; ++i) {
            std::uint64_t slot_key = splitmix64(cfg.seed + 0x9e3779b97f4a7c15ULL * (i + 1));
            std::uint64_t h = splitmix64(base ^ slot_key);
            if (h < sig.slots[i]) sig.slots[i] = h;
        }
    }
    return sig;
}

/// Fraction of equal slots, the MinHash estimate of Jaccard similarity.
inline double jaccard_estimate(const MinHashSignature& a, const MinHashSignature& b) {
    require(a.compatible(b), Errc::incompatible_signatures,
            "signatures differ in (length, seed, shingle_k)");
    require(a.length > 0, Errc::incompatible_signatures, "empty signatures");
    std::size_t eq = 0;
    for (std::uint32_t i = 0; i < a.length; ++i) {
        if (a.slots[i] == b.slots[i]) ++eq;
    }
    return static_cast<double>(eq) / static_cast<double>(a.length);
}

} // namespace spot
