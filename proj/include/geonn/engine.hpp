#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "geonn/chain_tree.hpp"
#include "geonn/complex.hpp"

namespace geonn {

/// Taut polyline between two points inside the polygon. Interior waypoints are
/// reflex polygon vertices; `vertex_ids` carries the complex vertex id of each
/// waypoint (-1 for free endpoints).
struct GeodesicPath {
    std::vector<Point> waypoints;
    std::vector<int> vertex_ids;
    double length = 0.0;

    const Point& source() const { return waypoints.front(); }
    const Point& target() const { return waypoints.back(); }
    GeodesicPath reversed() const;
};

/// Balanced-tree view of a path: i-th vertex, prefix length, monotone binary
/// search, and marked-vertex queries, each in logarithmic time or better.
class PathHandle {
public:
    PathHandle() = default;
    PathHandle(const GeodesicPath& path, const std::vector<bool>& marked);

    int size() const { return tree_.vertex_count(); }
    const Point& vertex(int i) const { return tree_.vertex(i); }
    int vertex_id(int i) const { return ids_[i]; }
    double total_length() const { return tree_.total_length(); }
    double prefix_length(int i) const { return tree_.prefix_length(i); }
    int search(const std::function<bool(int)>& pred) const { return tree_.search(pred); }
    int first_marked() const { return tree_.first_marked(); }
    int last_marked() const { return tree_.last_marked(); }
    const ChainTree& tree() const { return tree_; }

private:
    ChainTree tree_;
    std::vector<int> ids_;
};

enum class Side { kLeft, kOn, kRight };

struct EvalCounter {
    long long path_evals = 0;
};

/// A point pinned to the boundary cycle.
struct BoundaryAnchor {
    Point p;
    int vertex = -1;
    int cycle_edge = -1;
    double t = 0.0;

    PointRef ref() const {
        PointRef r(p);
        r.vertex = vertex;
        r.cycle_edge = vertex >= 0 ? -1 : cycle_edge;
        return r;
    }
};

/// Two-point geodesic queries over one polygon complex, plus the side-of-path
/// and path-intersection predicates built on them. Pure and reusable; an
/// optional counter records how many paths were evaluated.
class GeodesicEngine {
public:
    explicit GeodesicEngine(const PolyComplex* cx) : cx_(cx) {}

    const PolyComplex& complex() const { return *cx_; }
    void set_counter(EvalCounter* c) { counter_ = c; }

    GeodesicPath shortest_path(const PointRef& a, const PointRef& b) const;
    double distance(const PointRef& a, const PointRef& b) const;

    /// Anchor a point to the boundary; throws if it is not on any cycle edge.
    BoundaryAnchor anchor(const PointRef& r) const;
    double arc_position(const BoundaryAnchor& a) const;

    /// Classify s against the oriented geodesic p -> r (p, r on the boundary).
    Side side_of_path(const BoundaryAnchor& p, const BoundaryAnchor& r, const Point& s) const;
    Side side_of_path(const GeodesicPath& path, const BoundaryAnchor& p, const BoundaryAnchor& r,
                      const Point& s) const;

    /// First and last point of pi(s,t) and pi(p,r), or nullopt when disjoint.
    std::optional<std::pair<Point, Point>> path_intersection(const PointRef& s, const PointRef& t,
                                                             const BoundaryAnchor& p,
                                                             const BoundaryAnchor& r) const;

    RayHit ray_shoot(const PointRef& from, const Point& dir) const {
        return cx_->ray_shoot(from, dir);
    }

private:
    std::vector<Point> left_loop(const GeodesicPath& path, const BoundaryAnchor& p,
                                 const BoundaryAnchor& r, std::vector<Point>* arc_out) const;

    const PolyComplex* cx_ = nullptr;
    mutable EvalCounter* counter_ = nullptr;
};

}  // namespace geonn
