#include "geonn/dynamic_polygon.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace geonn {

DynamicPolygon::DynamicPolygon(const SimplePolygon& initial) {
    cx_ = std::make_unique<PolyComplex>(initial);
    eng_ = std::make_unique<GeodesicEngine>(cx_.get());
    marked_.assign(cx_->vertex_count(), false);
}

BarrierRecord DynamicPolygon::insert_barrier(Point u, Point v) {
    BarrierRecord rec = cx_->insert_barrier(u, v);
    marked_.resize(cx_->vertex_count(), false);
    for (int id : {rec.base_left, rec.tip_id, rec.base_right}) {
        if (!marked_[id]) {
            marked_[id] = true;
            marked_list_.push_back(id);
        }
    }
    return rec;
}

void DynamicPolygon::clear_marks() {
    marked_.assign(cx_->vertex_count(), false);
    marked_list_.clear();
    cx_->reset_edge_provenance();
}

std::optional<std::pair<Point, int>> DynamicPolygon::marked_on_path(const PointRef& p,
                                                                    const PointRef& q,
                                                                    MarkedPick which) const {
    GeodesicPath path = eng_->shortest_path(p, q);
    PathHandle handle(path, marked_);
    int idx = which == MarkedPick::kFirst ? handle.first_marked() : handle.last_marked();
    if (idx < 0) return std::nullopt;
    return std::make_pair(path.waypoints[idx], path.vertex_ids[idx]);
}

namespace {

struct BoundaryEntry {
    double pos = 0.0;
    Point p;
    int vertex = -1;     // complex vertex id when the entry is a vertex
    int generator = -1;  // marked vertex whose extension created this entry
    BoundaryAnchor anchor;
};

}  // namespace

std::vector<BoundedNNQuery> DynamicPolygon::generate_bounded_queries(const Point& q) const {
    const PolyComplex& cx = *cx_;
    if (cx.locate(q) < 0) throw OutOfDomainError("query point outside polygon");
    std::vector<BoundedNNQuery> out;
    if (marked_list_.empty()) {
        BoundedNNQuery full;
        full.full_polygon = true;
        full.kind = BoundedNNQuery::kCone;
        full.apex = PointRef(q);
        out.push_back(full);
        return out;
    }

    std::map<double, BoundaryEntry> tree;  // keyed by position along the boundary
    double total = cx.arc_total();
    double merge_tol = 1e-9 * std::max(1.0, total);
    auto insert_entry = [&](BoundaryEntry e) {
        auto it = tree.lower_bound(e.pos - merge_tol);
        if (it != tree.end() && std::abs(it->first - e.pos) <= merge_tol) {
            if (it->second.vertex < 0 && e.vertex >= 0) it->second = e;
            return;
        }
        if (e.pos < merge_tol && !tree.empty() &&
            std::abs(tree.rbegin()->first - total) + e.pos <= merge_tol) {
            return;  // wrap-around duplicate near the seam
        }
        tree[e.pos] = e;
    };

    auto vertex_entry = [&](int vid, int generator) {
        BoundaryEntry e;
        e.p = cx.point(vid);
        e.vertex = vid;
        e.generator = generator;
        e.pos = cx.arc_of_vertex(vid);
        e.anchor = eng_->anchor(PointRef::at_vertex(vid));
        insert_entry(e);
    };

    for (int vid : marked_list_) vertex_entry(vid, -1);

    // Window points: continue the incoming path segment past each marked
    // vertex until the extension hits the boundary.
    for (int vid : marked_list_) {
        Point vp = cx.point(vid);
        if (vp == q) continue;
        GeodesicPath path = eng_->shortest_path(PointRef::at_vertex(vid), PointRef(q));
        if (path.waypoints.size() < 2) continue;
        Point w1 = path.waypoints[1];
        Point dir = vp - w1;
        if (dir.x == 0.0 && dir.y == 0.0) continue;
        RayHit hit = cx.ray_shoot(PointRef::at_vertex(vid), dir);
        if (hit.t <= kEpsDist) continue;  // extension points out of the polygon
        if (hit.vertex >= 0) {
            vertex_entry(hit.vertex, vid);
            continue;
        }
        BoundaryEntry e;
        e.p = hit.point;
        e.generator = vid;
        const Point& A = cx.point(cx.cycle_vertex(hit.cycle_edge));
        const Point& B = cx.point(cx.cycle_vertex(hit.cycle_edge + 1));
        double len = dist(A, B);
        double t = len > 0 ? dist(A, hit.point) / len : 0.0;
        e.pos = cx.arc_position(hit.cycle_edge, t);
        e.anchor.p = hit.point;
        e.anchor.cycle_edge = hit.cycle_edge;
        e.anchor.t = t;
        insert_entry(e);
    }

    std::vector<BoundaryEntry> entries;
    entries.reserve(tree.size());
    for (auto& [pos, e] : tree) entries.push_back(e);

    // Path from q to a boundary entry. Window points carry an inexact hit
    // coordinate, so their path is assembled as pi(q, generator) extended by
    // the window segment; this keeps the combinatorics exact.
    auto path_from_q = [&](const BoundaryEntry& e) -> GeodesicPath {
        if (e.generator >= 0 && !(e.vertex >= 0 && is_marked(e.vertex))) {
            GeodesicPath path =
                eng_->shortest_path(PointRef(q), PointRef::at_vertex(e.generator));
            path.length += dist(path.waypoints.back(), e.p);
            path.waypoints.push_back(e.p);
            path.vertex_ids.push_back(e.vertex);
            return path;
        }
        return eng_->shortest_path(PointRef(q), e.anchor.ref());
    };

    // Apex: the last marked vertex on the common prefix of the paths from q
    // to the two region corners, or q itself if there is none.
    auto apex_of = [&](const BoundaryEntry& a, const BoundaryEntry& b) -> PointRef {
        GeodesicPath qa = path_from_q(a);
        GeodesicPath qb = path_from_q(b);
        std::size_t n = std::min(qa.waypoints.size(), qb.waypoints.size());
        int best = -1;
        for (std::size_t i = 0; i < n; ++i) {
            bool same = (qa.vertex_ids[i] >= 0 && qa.vertex_ids[i] == qb.vertex_ids[i]) ||
                        (qa.waypoints[i] == qb.waypoints[i]);
            if (!same) break;
            int id = qa.vertex_ids[i];
            if (id >= 0 && is_marked(id)) best = id;
        }
        if (best >= 0) return PointRef::at_vertex(best);
        return PointRef(q);
    };

    int K = static_cast<int>(entries.size());
    for (int i = 0; i < K; ++i) {
        const BoundaryEntry& a = entries[i];
        const BoundaryEntry& b = entries[(i + 1) % K];
        BoundedNNQuery query;
        query.t = a.anchor;
        query.s = b.anchor;
        query.apex = apex_of(a, b);

        // Kind: inspect the boundary edges covered by the forward arc a -> b.
        bool any_slit = false, any_orig = false;
        auto tally = [&](int edge) {
            if (cx.edge_source(edge).kind == EdgeSource::kOriginal)
                any_orig = true;
            else
                any_slit = true;
        };
        int ea = a.anchor.cycle_edge;
        int eb = b.anchor.cycle_edge;
        double ta = a.anchor.t, tb = b.anchor.t;
        int n = cx.cycle_size();
        int steps = ((eb - ea) % n + n) % n;
        if (steps == 0 && ta <= tb) {
            if (ta < tb) tally(ea);
        } else {
            if (ta < 1.0) tally(ea);
            for (int s = 1; s < steps; ++s) tally(ea + s);
            if (tb > 0.0) tally(eb);
        }
        query.kind =
            any_slit && !any_orig ? BoundedNNQuery::kTriangle : BoundedNNQuery::kCone;
        out.push_back(query);
    }
    return out;
}

std::vector<Point> DynamicPolygon::region_loop(const BoundedNNQuery& query,
                                               const Point& q) const {
    const PolyComplex& cx = *cx_;
    (void)q;
    if (query.full_polygon) return cx.cycle_points();
    std::vector<Point> loop;
    GeodesicPath to_t = eng_->shortest_path(query.apex, query.t.ref());
    GeodesicPath from_s = eng_->shortest_path(query.s.ref(), query.apex);
    for (const Point& p : to_t.waypoints) {
        if (loop.empty() || !(loop.back() == p)) loop.push_back(p);
    }
    // Forward boundary walk from t to s.
    int n = cx.cycle_size();
    int j = (query.t.vertex >= 0 ? cx.cycle_pos(query.t.vertex) : query.t.cycle_edge) + 1;
    int stop = query.s.vertex >= 0 ? cx.cycle_pos(query.s.vertex) : query.s.cycle_edge + 1;
    int guard = n + 2;
    while (((j % n) + n) % n != ((stop % n) + n) % n && guard-- > 0) {
        const Point& v = cx.point(cx.cycle_vertex(j));
        if (loop.empty() || !(loop.back() == v)) loop.push_back(v);
        ++j;
    }
    for (const Point& p : from_s.waypoints) {
        if (loop.empty() || !(loop.back() == p)) loop.push_back(p);
    }
    while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
    return loop;
}

}  // namespace geonn
