#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "geonn/engine.hpp"

namespace geonn {

/// A bounded nearest-neighbor query region: a geodesic triangle or a geodesic
/// cone with apex on its boundary. The part of the boundary inside a cone is
/// the clockwise traversal from s to t (equivalently, the counterclockwise
/// walk from t to s).
struct BoundedNNQuery {
    enum Kind { kTriangle, kCone };

    PointRef apex;
    BoundaryAnchor s;
    BoundaryAnchor t;
    Kind kind = kCone;
    bool full_polygon = false;  // no marked vertices: R is all of the polygon
};

enum class MarkedPick { kFirst, kLast };

/// Maintains the current polygon under barrier insertions, tracks the marked
/// (new) vertices and edges since the last snapshot, answers shortest-path and
/// ray-shooting queries in the current polygon, and generates the bounded
/// nearest-neighbor queries for a query point.
class DynamicPolygon {
public:
    explicit DynamicPolygon(const SimplePolygon& initial);

    const PolyComplex& complex() const { return *cx_; }
    const GeodesicEngine& engine() const { return *eng_; }

    /// Inserts a slit from boundary point u to interior point v. Both new
    /// vertices (and the duplicated base) become marked.
    BarrierRecord insert_barrier(Point u, Point v);

    /// Freezes marks: clears the marked set and re-bases edge provenance so
    /// that the current polygon acts as the new reference snapshot.
    void clear_marks();

    const std::vector<int>& marked_vertices() const { return marked_list_; }
    const std::vector<bool>& marked_flags() const { return marked_; }
    bool is_marked(int vertex_id) const {
        return vertex_id >= 0 && vertex_id < static_cast<int>(marked_.size()) &&
               marked_[vertex_id];
    }

    GeodesicPath shortest_path(const PointRef& a, const PointRef& b) const {
        return eng_->shortest_path(a, b);
    }
    double distance(const PointRef& a, const PointRef& b) const { return eng_->distance(a, b); }
    RayHit ray_shoot(const PointRef& from, const Point& dir) const {
        return eng_->ray_shoot(from, dir);
    }

    /// First (or last) marked vertex on pi(p,q) oriented p -> q.
    std::optional<std::pair<Point, int>> marked_on_path(const PointRef& p, const PointRef& q,
                                                        MarkedPick which) const;

    /// The O(k) bounded nearest-neighbor queries for q: boundary points are
    /// the marked vertices plus, for each reflex marked vertex, the point
    /// where the extension of the incoming path segment past the vertex hits
    /// the boundary. Consecutive boundary points bound one region each.
    std::vector<BoundedNNQuery> generate_bounded_queries(const Point& q) const;

    /// Closed counterclockwise loop bounding a generated region (test aid).
    std::vector<Point> region_loop(const BoundedNNQuery& query, const Point& q) const;

private:
    std::unique_ptr<PolyComplex> cx_;
    std::unique_ptr<GeodesicEngine> eng_;
    std::vector<bool> marked_;
    std::vector<int> marked_list_;
};

}  // namespace geonn
