#pragma once

#include <array>
#include <optional>
#include <vector>

#include "geonn/polygon.hpp"

namespace geonn {

/// Where a boundary edge of the current cycle came from.
struct EdgeSource {
    enum Kind { kOriginal, kSlitLeft, kSlitRight } kind = kOriginal;
    int orig_edge = -1;   // edge index of the base polygon, for kOriginal
    double t0 = 0.0;      // parameter range on the original edge
    double t1 = 1.0;
    int barrier = -1;     // barrier index, for slit sides
};

struct Face {
    std::array<int, 3> v;    // vertex ids, counterclockwise
    std::array<int, 3> nbr;  // face across edge (v[i], v[(i+1)%3]); -1 on the boundary
};

/// A point with enough context to anchor it in the complex. A bare point is
/// resolved by point location; a vertex id or cycle edge pins the point to one
/// side of a slit where coordinates alone are ambiguous.
struct PointRef {
    Point p;
    int vertex = -1;
    int cycle_edge = -1;  // index into the cycle; the point lies on that edge
    int face = -1;        // optional containing-face hint

    PointRef() = default;
    PointRef(Point pt) : p(pt) {}
    PointRef(double x, double y) : p{x, y} {}
    static PointRef at_vertex(int id) {
        PointRef r;
        r.vertex = id;
        return r;
    }
};

struct RayHit {
    Point point;
    int cycle_edge = -1;  // boundary edge hit
    int vertex = -1;      // set when the hit is exactly a complex vertex
    double t = 0.0;       // ray parameter of the hit
};

struct BarrierRecord {
    Point base;
    Point tip;
    int base_left = -1;   // vertex id keeping the old base (left of base->tip)
    int base_right = -1;  // duplicated vertex id
    int tip_id = -1;
};

/// Triangulated complex over a simple polygon with zero-width slits. The
/// boundary is a combinatorial cycle of vertex ids; slit sides are distinct
/// cycle edges with coincident coordinates. Faces form a topological disk and
/// the dual graph over shared diagonals is a tree.
class PolyComplex {
public:
    PolyComplex() = default;
    explicit PolyComplex(const SimplePolygon& poly);

    /// Inserts a barrier from boundary point u to interior point v. Throws
    /// ValidationError with an intersection witness if the open segment meets
    /// the boundary, or if v is not strictly interior.
    BarrierRecord insert_barrier(Point u, Point v);

    int vertex_count() const { return static_cast<int>(pts_.size()); }
    const Point& point(int id) const { return pts_[id]; }
    const std::vector<int>& cycle() const { return cycle_; }
    int cycle_size() const { return static_cast<int>(cycle_.size()); }
    int cycle_pos(int vertex_id) const { return pos_[vertex_id]; }
    int cycle_vertex(int pos) const { return cycle_[wrap(pos)]; }
    const EdgeSource& edge_source(int pos) const { return esrc_[wrap(pos)]; }

    const std::vector<Face>& faces() const { return faces_; }
    int face_count() const { return static_cast<int>(faces_.size()); }
    int dual_parent(int f) const { return parent_[f]; }
    int dual_depth(int f) const { return depth_[f]; }

    /// Smallest-index face whose closed triangle contains q; -1 if outside.
    int locate(const Point& q) const;
    bool contains(const Point& q) const { return locate(q) >= 0; }

    /// True if q lies on the boundary (any cycle edge), within exact predicates.
    std::optional<int> boundary_edge_of(const Point& q) const;

    /// Resolve a PointRef to a concrete starting face.
    int resolve_face(const PointRef& r) const;

    /// First boundary intersection of the ray from `from` in direction `dir`.
    RayHit ray_shoot(const PointRef& from, const Point& dir) const;

    /// Faces incident to a vertex (unordered).
    const std::vector<int>& incident_faces(int vertex_id) const { return vfaces_[vertex_id]; }

    /// The unique face carrying boundary cycle edge `pos`.
    int face_of_cycle_edge(int pos) const { return edge_face_[wrap(pos)]; }

    /// Arc-length position of a boundary point given by cycle edge + parameter.
    double arc_position(int pos, double t) const;
    double arc_of_vertex(int vertex_id) const { return arc_pos_[pos_[vertex_id]]; }
    double arc_total() const { return arc_total_; }
    /// Point on the boundary at arc position s (wrapped).
    Point boundary_point_at(double s, int* edge_out = nullptr) const;

    bool is_reflex_vertex(int vertex_id) const;

    const std::vector<BarrierRecord>& barriers() const { return barriers_; }

    /// Re-bases boundary provenance: every current cycle edge becomes an
    /// "original" edge of itself. Called when a snapshot is frozen so that
    /// slit-side sources afterwards mean "inserted since the snapshot".
    void reset_edge_provenance();

    /// Structural self-checks; throws on inconsistency. Test use.
    void check_valid() const;

    /// The cycle as a coordinate polygon (slit duplicates included).
    std::vector<Point> cycle_points() const;

    double bbox_diameter() const { return bbox_diam_; }

private:
    int wrap(int pos) const {
        int n = cycle_size();
        return ((pos % n) + n) % n;
    }
    void triangulate_cycle();
    std::vector<std::array<int, 3>> ear_clip(const std::vector<int>& ids) const;
    void rebuild_connectivity();
    void rebuild_arcs();
    void walk_check_segment(const Point& u, const Point& v, int start_face) const;
    int wedge_face_at_vertex(int vid, const Point& dir) const;
    int split_boundary_at(const Point& u, const Point& toward);

    std::vector<Point> pts_;
    std::vector<int> cycle_;
    std::vector<int> pos_;
    std::vector<EdgeSource> esrc_;
    std::vector<Face> faces_;
    std::vector<int> parent_;
    std::vector<int> depth_;
    std::vector<std::vector<int>> vfaces_;
    std::vector<int> edge_face_;
    std::vector<double> arc_pos_;
    double arc_total_ = 0.0;
    std::vector<BarrierRecord> barriers_;
    double bbox_diam_ = 1.0;

    // Uniform grid over the bounding box for point location.
    struct Grid {
        double x0 = 0, y0 = 0, cw = 1, ch = 1;
        int nx = 1, ny = 1;
        std::vector<std::vector<int>> cells;
    };
    Grid grid_;
    void rebuild_grid();
};

}  // namespace geonn
