#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "truecluster/matrix.hpp"

namespace truecluster {

/// Exact Euclidean nearest-neighbour index (kd-tree). Built once over a
/// point set, then queried concurrently. Among equidistant points the
/// lowest point index wins, so results match a linear scan bit for bit.
class KdTree {
  public:
    static constexpr std::size_t kDefaultLeafSize = 16;
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    struct Hit {
        std::size_t index = npos;
        double squared_distance = std::numeric_limits<double>::infinity();
    };

    explicit KdTree(Matrix<double> points, std::size_t leaf_size = kDefaultLeafSize);

    std::size_t size() const noexcept { return points_.rows(); }
    std::size_t dims() const noexcept { return points_.cols(); }
    const Matrix<double>& points() const noexcept { return points_; }

    Hit nearest(std::span<const double> query) const {
        return nearest(query, [](std::size_t) { return true; });
    }

    /// Nearest point among those with accept(index) == true; index npos if none.
    template <typename Accept>
    Hit nearest(std::span<const double> query, Accept&& accept) const {
        Hit best;
        if (!nodes_.empty()) search(0, query, best, accept);
        return best;
    }

  private:
    struct Node {
        // Leaves hold [begin, end) of order_; inner nodes split on dim at value.
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::uint32_t left = 0;
        std::uint32_t right = 0;
        std::uint32_t dim = 0;
        bool leaf = true;
        double value = 0.0;
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end);

    template <typename Accept>
    void search(std::uint32_t node_id, std::span<const double> query, Hit& best, Accept& accept) const {
        const Node& node = nodes_[node_id];
        if (node.leaf) {
            for (std::uint32_t p = node.begin; p < node.end; ++p) {
                const std::size_t idx = order_[p];
                if (!accept(idx)) continue;
                const double d = squared_distance(points_.row(idx), query);
                if (d < best.squared_distance || (d == best.squared_distance && idx < best.index)) best = {idx, d};
            }
            return;
        }
        const double diff = query[node.dim] - node.value;
        const std::uint32_t near_side = diff <= 0.0 ? node.left : node.right;
        const std::uint32_t far_side = diff <= 0.0 ? node.right : node.left;
        search(near_side, query, best, accept);
        // Equality is explored too: an equidistant point may carry a lower index.
        if (diff * diff <= best.squared_distance) search(far_side, query, best, accept);
    }

    Matrix<double> points_;
    std::size_t leaf_size_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace truecluster
