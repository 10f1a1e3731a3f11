#include "geonn/chain_tree.hpp"

#include <algorithm>

namespace geonn {

ChainTree::ChainTree(std::vector<Point> points, std::vector<bool> marked)
    : pts_(std::move(points)), marked_(std::move(marked)) {
    int n = vertex_count();
    marked_.resize(n, false);
    prefix_.assign(n, 0.0);
    for (int i = 1; i < n; ++i) prefix_[i] = prefix_[i - 1] + dist(pts_[i - 1], pts_[i]);
    leaf_count_ = 1;
    while (leaf_count_ < std::max(1, n)) leaf_count_ <<= 1;
    flag_.assign(2 * leaf_count_, 0);
    len_.assign(2 * leaf_count_, 0.0);
    for (int i = 0; i < n; ++i) {
        flag_[leaf_count_ + i] = marked_[i] ? 1 : 0;
        len_[leaf_count_ + i] = (i + 1 < n) ? dist(pts_[i], pts_[i + 1]) : 0.0;
    }
    for (int i = leaf_count_ - 1; i >= 1; --i) {
        flag_[i] = flag_[2 * i] | flag_[2 * i + 1];
        len_[i] = len_[2 * i] + len_[2 * i + 1];
    }
}

double ChainTree::total_length() const { return len_.empty() ? 0.0 : len_[1]; }

int ChainTree::search(const std::function<bool(int)>& pred) const {
    int lo = 0, hi = vertex_count();
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (pred(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

int ChainTree::first_marked_in(int node, int lo, int hi) const {
    if (node >= static_cast<int>(flag_.size()) || !flag_[node]) return -1;
    if (hi - lo == 1) return lo < vertex_count() ? lo : -1;
    int mid = (lo + hi) / 2;
    int left = first_marked_in(2 * node, lo, mid);
    if (left >= 0) return left;
    return first_marked_in(2 * node + 1, mid, hi);
}

int ChainTree::last_marked_in(int node, int lo, int hi) const {
    if (node >= static_cast<int>(flag_.size()) || !flag_[node]) return -1;
    if (hi - lo == 1) return lo < vertex_count() ? lo : -1;
    int mid = (lo + hi) / 2;
    int right = last_marked_in(2 * node + 1, mid, hi);
    if (right >= 0) return right;
    return last_marked_in(2 * node, lo, mid);
}

bool ChainTree::any_marked(int lo, int hi) const {
    lo = std::max(lo, 0);
    hi = std::min(hi, vertex_count() - 1);
    if (lo > hi) return false;
    // Iterative segment-tree range OR.
    int l = lo + leaf_count_, r = hi + leaf_count_ + 1;
    bool acc = false;
    while (l < r) {
        if (l & 1) acc = acc || flag_[l++];
        if (r & 1) acc = acc || flag_[--r];
        l >>= 1;
        r >>= 1;
    }
    return acc;
}

}  // namespace geonn
