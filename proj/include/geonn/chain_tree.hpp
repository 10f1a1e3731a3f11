#pragma once

#include <functional>
#include <vector>

#include "geonn/geometry.hpp"

namespace geonn {

/// Balanced binary tree over a polygonal chain. Leaves are the chain edges;
/// every internal node stores the length of its subchain and a boolean that is
/// the OR of its children's marked flags. Built once, queried in O(log n).
class ChainTree {
public:
    ChainTree() = default;

    /// points: chain vertices in order; marked: one flag per vertex.
    ChainTree(std::vector<Point> points, std::vector<bool> marked);

    int vertex_count() const { return static_cast<int>(pts_.size()); }
    const Point& vertex(int i) const { return pts_[i]; }
    const std::vector<Point>& vertices() const { return pts_; }
    bool vertex_marked(int i) const { return marked_[i]; }

    double total_length() const;
    /// Length of the chain prefix ending at vertex i.
    double prefix_length(int i) const { return prefix_[i]; }

    /// Index of the first vertex v in [0, n) with pred(v) true, assuming pred
    /// is monotone false...true along the chain; returns n if none.
    int search(const std::function<bool(int)>& pred) const;

    /// First (smallest index) marked vertex, or -1. O(log n) via node flags.
    int first_marked() const { return first_marked_in(1, 0, leaf_count_); }
    /// Last marked vertex, or -1.
    int last_marked() const { return last_marked_in(1, 0, leaf_count_); }

    /// Subchain queries over vertex index range [lo, hi] (inclusive).
    bool any_marked(int lo, int hi) const;

private:
    int first_marked_in(int node, int lo, int hi) const;
    int last_marked_in(int node, int lo, int hi) const;

    std::vector<Point> pts_;
    std::vector<bool> marked_;
    std::vector<double> prefix_;
    // Segment-tree style storage over vertices.
    int leaf_count_ = 0;
    std::vector<char> flag_;
    std::vector<double> len_;
};

}  // namespace geonn
