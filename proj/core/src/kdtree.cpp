#include "truecluster/kdtree.hpp"

#include <algorithm>
#include <numeric>

#include "truecluster/error.hpp"

namespace truecluster {

KdTree::KdTree(Matrix<double> points, std::size_t leaf_size) : points_(std::move(points)), leaf_size_(std::max<std::size_t>(1, leaf_size)) {
    if (points_.rows() >= std::numeric_limits<std::uint32_t>::max())
        throw Error(ErrorCode::InvalidArgument, "kd-tree supports fewer than 2^32 points");
    order_.resize(points_.rows());
    std::iota(order_.begin(), order_.end(), 0U);
    if (!order_.empty()) {
        nodes_.reserve(2 * (points_.rows() / leaf_size_ + 1));
        build(0, static_cast<std::uint32_t>(order_.size()));
    }
}

std::uint32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= leaf_size_) return id;

    // Split on the dimension of largest spread.
    std::uint32_t dim = 0;
    double widest = -1.0;
    for (std::size_t j = 0; j < points_.cols(); ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::uint32_t p = begin; p < end; ++p) {
            const double v = points_(order_[p], j);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > widest) {
            widest = hi - lo;
            dim = static_cast<std::uint32_t>(j);
        }
    }
    if (widest <= 0.0) return id;  // all points coincide

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, [&](std::uint32_t a, std::uint32_t b) {
        const double va = points_(a, dim);
        const double vb = points_(b, dim);
        return va < vb || (va == vb && a < b);
    });
    const double split = points_(order_[mid], dim);

    // Left holds values <= split, right values >= split; the query side test
    // uses the same threshold, so ties on the plane stay reachable.
    nodes_[id].leaf = false;
    nodes_[id].dim = dim;
    nodes_[id].value = split;
    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

}  // namespace truecluster
