#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "spot/errors.hpp"
#include "spot/geometry.hpp"

namespace spot {

/// Bulk-loaded R-tree over (bbox, doc_id) entries. Sort-Tile-Recursive packing;
/// query only, no insertion or deletion after build.
class SpatialIndex {
public:
    static constexpr int kFanout = 8;

    SpatialIndex() = default;

    explicit SpatialIndex(std::vector<std::pair<Aabb, std::string>> entries) {
        build(std::move(entries));
    }

    void build(std::vector<std::pair<Aabb, std::string>> entries) {
        nodes_.clear();
        ids_.clear();
        boxes_.clear();
        root_ = -1;
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.second < b.second; });
        for (auto& [box, id] : entries) {
            boxes_.push_back(box);
            ids_.push_back(std::move(id));
        }
        if (boxes_.empty()) return;

        // Leaf level: STR tiling on entry centers.
        std::vector<int> order(boxes_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::vector<int> level = pack_level(order, /*leaf=*/true);
        while (level.size() > 1) {
            level = pack_level(level, /*leaf=*/false);
        }
        root_ = level.front();
    }

    [[nodiscard]] std::size_t size() const { return ids_.size(); }

    /// Doc ids whose bbox intersects the closed disk (center, radius), ascending.
    [[nodiscard]] std::vector<std::string> query_radius(const Vec2& center, double radius) const {
        std::vector<std::string> out;
        if (root_ < 0) return out;
        std::vector<int> stack{root_};
        while (!stack.empty()) {
            const Node& n = nodes_[static_cast<std::size_t>(stack.back())];
            stack.pop_back();
            if (!n.box.intersects_disk(center, radius)) continue;
            if (n.leaf) {
                for (int e : n.children) {
                    if (boxes_[static_cast<std::size_t>(e)].intersects_disk(center, radius)) {
                        out.push_back(ids_[static_cast<std::size_t>(e)]);
                    }
                }
            } else {
                for (int c : n.children) stack.push_back(c);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Doc ids whose bbox intersects the query box, ascending.
    [[nodiscard]] std::vector<std::string> query_box(const Aabb& box) const {
        std::vector<std::string> out;
        if (root_ < 0) return out;
        std::vector<int> stack{root_};
        while (!stack.empty()) {
            const Node& n = nodes_[static_cast<std::size_t>(stack.back())];
            stack.pop_back();
            if (!n.box.intersects(box)) continue;
            if (n.leaf) {
                for (int e : n.children) {
                    if (boxes_[static_cast<std::size_t>(e)].intersects(box)) {
                        out.push_back(ids_[static_cast<std::size_t>(e)]);
                    }
                }
            } else {
                for (int c : n.children) stack.push_back(c);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    struct Node {
        Aabb box;
        bool leaf = false;
        std::vector<int> children; // entry indices for leaves, node indices otherwise
    };

    [[nodiscard]] Aabb item_box(int idx, bool leaf) const {
        return leaf ? boxes_[static_cast<std::size_t>(idx)]
                    : nodes_[static_cast<std::size_t>(idx)].box;
    }

    /// Group `items` into nodes of up to kFanout children using STR tiling;
    /// returns the indices of the created nodes.
    std::vector<int> pack_level(std::vector<int> items, bool leaf) {
        auto center_of = [this, leaf](int idx) { return item_box(idx, leaf).center(); };
        std::size_t n = items.size();
        auto node_count = static_cast<std::size_t>(
            std::ceil(static_cast<double>(n) / static_cast<double>(kFanout)));
        auto slices = static_cast<std::size_t>(
            std::ceil(std::sqrt(static_cast<double>(node_count))));
        std::size_t slice_len =
            static_cast<std::size_t>(std::ceil(static_cast<double>(n) / static_cast<double>(slices)));

        std::sort(items.begin(), items.end(), [&](int a, int b) {
            Vec2 ca = center_of(a), cb = center_of(b);
            if (ca.x != cb.x) return ca.x < cb.x;
            return a < b;
        });

        std::vector<int> created;
        for (std::size_t s = 0; s < n; s += slice_len) {
            std::size_t e = std::min(n, s + slice_len);
            std::sort(items.begin() + static_cast<std::ptrdiff_t>(s),
                      items.begin() + static_cast<std::ptrdiff_t>(e), [&](int a, int b) {
                          Vec2 ca = center_of(a), cb = center_of(b);
                          if (ca.y != cb.y) return ca.y < cb.y;
                          return a < b;
                      });
            for (std::size_t i = s; i < e; i += kFanout) {
                Node node;
                node.leaf = leaf;
                for (std::size_t j = i; j < std::min(e, i + kFanout); ++j) {
                    node.children.push_back(items[j]);
                    node.box.expand(item_box(items[j], leaf));
                }
                nodes_.push_back(std::move(node));
                created.push_back(static_cast<int>(nodes_.size()) - 1);
            }
        }
        return created;
    }

    std::vector<Node> nodes_;
    std::vector<Aabb> boxes_;
    std::vector<std::string> ids_;
    int root_ = -1;
};

} // namespace spot
