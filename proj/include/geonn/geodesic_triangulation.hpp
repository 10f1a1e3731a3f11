#pragma once

#include <array>
#include <vector>

#include "geonn/engine.hpp"

namespace geonn {

/// Geodesic triangle with corners u, v, w (complex vertex ids). Sides are the
/// three pairwise geodesics. The deltoid is the simple region bounded by the
/// three concave chains; tails are the chains shared by two sides near each
/// corner. The deltoid may be empty, e.g. when w lies on pi(u,v).
struct GeodesicTriangle {
    std::array<int, 3> corners;
    std::array<GeodesicPath, 3> sides;  // pi(c0,c1), pi(c1,c2), pi(c2,c0)
    std::vector<Point> deltoid;         // counterclockwise; empty if degenerate
    std::array<std::vector<Point>, 3> tails;
    bool deltoid_empty = false;
};

struct GTNode {
    GeodesicTriangle tri;
    int parent = -1;
    int child_lo = -1;
    int child_hi = -1;
    int depth = 0;
    // Cycle-position arc [lo..hi] (hi may exceed cycle size by wrapping);
    // the node's subpolygon is this boundary arc closed by pi(cycle[hi],
    // cycle[lo]), which is also the separator from the parent.
    int arc_lo = 0;
    int arc_mid = 0;
    int arc_hi = 0;
};

/// Balanced geodesic triangulation: recursively connect the boundary-midpoint
/// vertex of the remaining arc, giving a dual tree of logarithmic height.
class GTDualTree {
public:
    static constexpr double kHeightFactor = 8.0;  // height <= factor * log2(m)

    explicit GTDualTree(const GeodesicEngine* engine);

    const GeodesicEngine& engine() const { return *eng_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    const GTNode& node(int i) const { return nodes_[i]; }
    int root() const { return root_; }
    int height() const { return height_; }

    /// Highest node whose closed geodesic triangle contains q; ties on shared
    /// sides resolve to the higher node.
    int point_locate(const Point& q) const;

    /// True if q lies in the node's closed geodesic triangle.
    bool triangle_contains(int node, const Point& q) const;

    /// Boundary representation of P_x: the cycle arc [lo..hi] plus the
    /// separator geodesic; returned as the separator path (hi -> lo).
    GeodesicPath subpolygon_separator(int node) const;

    /// Arc-length interval of the node's subpolygon boundary arc.
    std::pair<double, double> arc_interval(int node) const;

    /// Lowest common ancestor of two nodes.
    int lca(int a, int b) const;

    /// Nodes from a up to and including b (b must be an ancestor of a).
    std::vector<int> path_to_ancestor(int a, int b) const;

private:
    int build(int lo, int hi, int depth);
    void compute_deltoid(GeodesicTriangle* tri) const;

    const GeodesicEngine* eng_;
    std::vector<GTNode> nodes_;
    int root_ = -1;
    int height_ = 0;
};

}  // namespace geonn
