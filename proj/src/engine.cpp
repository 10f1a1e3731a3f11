#include "geonn/engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace geonn {

namespace {

struct FunnelPoint {
    Point p;
    int id = -1;
};

bool coords_equal(const Point& a, const Point& b) { return a == b; }

}  // namespace

GeodesicPath GeodesicPath::reversed() const {
    GeodesicPath out;
    out.waypoints.assign(waypoints.rbegin(), waypoints.rend());
    out.vertex_ids.assign(vertex_ids.rbegin(), vertex_ids.rend());
    out.length = length;
    return out;
}

PathHandle::PathHandle(const GeodesicPath& path, const std::vector<bool>& marked) {
    std::vector<bool> flags(path.waypoints.size(), false);
    for (std::size_t i = 0; i < path.vertex_ids.size(); ++i) {
        int id = path.vertex_ids[i];
        if (id >= 0 && id < static_cast<int>(marked.size())) flags[i] = marked[id];
    }
    ids_ = path.vertex_ids;
    tree_ = ChainTree(path.waypoints, flags);
}

GeodesicPath GeodesicEngine::shortest_path(const PointRef& a, const PointRef& b) const {
    if (counter_) ++counter_->path_evals;
    const PolyComplex& cx = *cx_;
    Point pa = a.vertex >= 0 ? cx.point(a.vertex) : a.p;
    Point pb = b.vertex >= 0 ? cx.point(b.vertex) : b.p;
    int fa = cx.resolve_face(a);
    int fb = cx.resolve_face(b);

    // Dual-tree path between the two faces.
    std::vector<int> up_a, up_b;
    {
        int x = fa, y = fb;
        while (cx.dual_depth(x) > cx.dual_depth(y)) {
            up_a.push_back(x);
            x = cx.dual_parent(x);
        }
        while (cx.dual_depth(y) > cx.dual_depth(x)) {
            up_b.push_back(y);
            y = cx.dual_parent(y);
        }
        while (x != y) {
            up_a.push_back(x);
            up_b.push_back(y);
            x = cx.dual_parent(x);
            y = cx.dual_parent(y);
        }
        up_a.push_back(x);
    }
    std::vector<int> sleeve = up_a;
    for (auto it = up_b.rbegin(); it != up_b.rend(); ++it) sleeve.push_back(*it);

    // Portals between consecutive sleeve faces; left = head of the directed
    // edge as it appears in the exited face.
    int k = static_cast<int>(sleeve.size());
    std::vector<FunnelPoint> L(k + 1), R(k + 1);
    L[0] = R[0] = FunnelPoint{pa, a.vertex};
    for (int i = 0; i + 1 < k; ++i) {
        const Face& fc = cx.faces()[sleeve[i]];
        int e = -1;
        for (int j = 0; j < 3; ++j) {
            if (fc.nbr[j] == sleeve[i + 1]) e = j;
        }
        if (e < 0) throw DegeneracyError("sleeve faces are not adjacent");
        int head = fc.v[(e + 1) % 3];
        int tail = fc.v[e];
        L[i + 1] = FunnelPoint{cx.point(head), head};
        R[i + 1] = FunnelPoint{cx.point(tail), tail};
    }
    L[k] = R[k] = FunnelPoint{pb, b.vertex};

    // Funnel walk.
    std::vector<FunnelPoint> out;
    out.push_back(L[0]);
    FunnelPoint apex = L[0], left = L[0], right = L[0];
    int apex_i = 0, left_i = 0, right_i = 0;
    long long guard = 16LL * (k + 2) * (k + 2) + 64;
    for (int i = 1; i <= k; ++i) {
        if (--guard < 0) throw DegeneracyError("funnel did not terminate");
        const FunnelPoint& l = L[i];
        const FunnelPoint& r = R[i];
        // Advance the right side.
        if (orient(apex.p, right.p, r.p) >= 0 || coords_equal(apex.p, right.p)) {
            if (coords_equal(apex.p, right.p) || orient(apex.p, left.p, r.p) <= 0) {
                right = r;
                right_i = i;
            } else {
                out.push_back(left);
                apex = left;
                apex_i = left_i;
                left = apex;
                right = apex;
                left_i = apex_i;
                right_i = apex_i;
                i = apex_i;
                continue;
            }
        }
        // Advance the left side.
        if (orient(apex.p, left.p, l.p) <= 0 || coords_equal(apex.p, left.p)) {
            if (coords_equal(apex.p, left.p) || orient(apex.p, right.p, l.p) >= 0) {
                left = l;
                left_i = i;
            } else {
                out.push_back(right);
                apex = right;
                apex_i = right_i;
                left = apex;
                right = apex;
                left_i = apex_i;
                right_i = apex_i;
                i = apex_i;
                continue;
            }
        }
    }
    out.push_back(L[k]);

    // Canonicalize: drop coincident and exactly collinear interior waypoints,
    // then re-insert reflex vertices lying exactly on a segment. The result is
    // independent of funnel tie handling and symmetric under reversal.
    std::vector<FunnelPoint> clean;
    for (const FunnelPoint& fp : out) {
        if (!clean.empty() && coords_equal(clean.back().p, fp.p)) {
            if (clean.back().id < 0) clean.back().id = fp.id;
            continue;
        }
        clean.push_back(fp);
    }
    bool changed = true;
    while (changed && clean.size() > 2) {
        changed = false;
        for (std::size_t i = 1; i + 1 < clean.size(); ++i) {
            if (orient(clean[i - 1].p, clean[i].p, clean[i + 1].p) == 0 &&
                dot(clean[i].p - clean[i - 1].p, clean[i + 1].p - clean[i].p) >= 0) {
                clean.erase(clean.begin() + i);
                changed = true;
                break;
            }
        }
    }

    std::set<int> corner_ids;
    for (int f : sleeve) {
        for (int j = 0; j < 3; ++j) corner_ids.insert(cx.faces()[f].v[j]);
    }
    std::vector<FunnelPoint> final_pts;
    for (std::size_t i = 0; i + 1 < clean.size(); ++i) {
        final_pts.push_back(clean[i]);
        const Point& A = clean[i].p;
        const Point& B = clean[i + 1].p;
        std::vector<std::pair<double, int>> grazing;
        for (int id : corner_ids) {
            const Point& V = cx.point(id);
            if (coords_equal(V, A) || coords_equal(V, B)) continue;
            if (!on_segment(A, B, V)) continue;
            if (!cx.is_reflex_vertex(id)) continue;
            double t = std::abs(B.x - A.x) >= std::abs(B.y - A.y) ? (V.x - A.x) / (B.x - A.x)
                                                                  : (V.y - A.y) / (B.y - A.y);
            grazing.push_back({t, id});
        }
        std::sort(grazing.begin(), grazing.end());
        for (auto [t, id] : grazing) {
            if (!final_pts.empty() && coords_equal(final_pts.back().p, cx.point(id))) continue;
            final_pts.push_back(FunnelPoint{cx.point(id), id});
        }
    }
    final_pts.push_back(clean.back());

    GeodesicPath path;
    for (const FunnelPoint& fp : final_pts) {
        path.waypoints.push_back(fp.p);
        path.vertex_ids.push_back(fp.id);
    }
    path.length = 0.0;
    for (std::size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
        path.length += dist(path.waypoints[i], path.waypoints[i + 1]);
    }
    return path;
}

double GeodesicEngine::distance(const PointRef& a, const PointRef& b) const {
    return shortest_path(a, b).length;
}

BoundaryAnchor GeodesicEngine::anchor(const PointRef& r) const {
    BoundaryAnchor a;
    a.p = r.vertex >= 0 ? cx_->point(r.vertex) : r.p;
    if (r.vertex >= 0) {
        a.vertex = r.vertex;
        a.cycle_edge = cx_->cycle_pos(r.vertex);
        a.t = 0.0;
        return a;
    }
    if (r.cycle_edge >= 0) {
        a.cycle_edge = r.cycle_edge;
    } else {
        auto e = cx_->boundary_edge_of(a.p);
        if (!e) throw OutOfDomainError("point is not on the polygon boundary");
        a.cycle_edge = *e;
    }
    const Point& A = cx_->point(cx_->cycle_vertex(a.cycle_edge));
    const Point& B = cx_->point(cx_->cycle_vertex(a.cycle_edge + 1));
    double len = dist(A, B);
    a.t = len > 0 ? dist(A, a.p) / len : 0.0;
    if (coords_equal(a.p, A)) {
        a.vertex = cx_->cycle_vertex(a.cycle_edge);
        a.t = 0.0;
    } else if (coords_equal(a.p, B)) {
        a.vertex = cx_->cycle_vertex(a.cycle_edge + 1);
        a.cycle_edge = cx_->cycle_pos(a.vertex);
        a.t = 0.0;
    }
    return a;
}

double GeodesicEngine::arc_position(const BoundaryAnchor& a) const {
    if (a.vertex >= 0) return cx_->arc_of_vertex(a.vertex);
    return cx_->arc_position(a.cycle_edge, a.t);
}

std::vector<Point> GeodesicEngine::left_loop(const GeodesicPath& path, const BoundaryAnchor& p,
                                             const BoundaryAnchor& r,
                                             std::vector<Point>* arc_out) const {
    std::vector<Point> loop = path.waypoints;  // p .. r
    int n = cx_->cycle_size();
    int j = r.vertex >= 0 ? cx_->cycle_pos(r.vertex) + 1 : r.cycle_edge + 1;
    int stop = p.vertex >= 0 ? cx_->cycle_pos(p.vertex) : p.cycle_edge + 1;
    stop = ((stop % n) + n) % n;
    std::vector<Point> arc;
    arc.push_back(r.p);
    int guard = n + 2;
    while (((j % n) + n) % n != stop) {
        const Point& v = cx_->point(cx_->cycle_vertex(j));
        loop.push_back(v);
        arc.push_back(v);
        ++j;
        if (--guard < 0) throw DegeneracyError("boundary arc walk did not terminate");
    }
    arc.push_back(p.p);
    if (arc_out) *arc_out = std::move(arc);
    return loop;
}

Side GeodesicEngine::side_of_path(const BoundaryAnchor& p, const BoundaryAnchor& r,
                                  const Point& s) const {
    GeodesicPath path = shortest_path(p.ref(), r.ref());
    return side_of_path(path, p, r, s);
}

Side GeodesicEngine::side_of_path(const GeodesicPath& path, const BoundaryAnchor& p,
                                  const BoundaryAnchor& r, const Point& s) const {
    if (point_polyline_dist(path.waypoints, s) <= kEpsDist) return Side::kOn;
    std::vector<Point> arc;
    std::vector<Point> loop = left_loop(path, p, r, &arc);
    if (point_polyline_dist(arc, s) <= kEpsDist) return Side::kLeft;
    return winding_number(loop, s) != 0 ? Side::kLeft : Side::kRight;
}

std::optional<std::pair<Point, Point>> GeodesicEngine::path_intersection(
    const PointRef& s, const PointRef& t, const BoundaryAnchor& p,
    const BoundaryAnchor& r) const {
    GeodesicPath pr = shortest_path(p.ref(), r.ref());
    auto side_of = [&](const Point& x) { return side_of_path(pr, p, r, x); };

    GeodesicPath st = shortest_path(s, t);
    const auto& w = st.waypoints;
    int n = static_cast<int>(w.size());
    Side ss = side_of(w.front());
    Side tt = side_of(w.back());

    auto cross_in_segment = [&](int i, bool first) -> Point {
        // Segment (w[i-1], w[i]) crosses the pr polyline; pick the crossing
        // closest to w[i-1] (first) or to w[i] (last).
        const Point& A = w[i - 1];
        const Point& B = w[i];
        double best = first ? 2.0 : -1.0;
        Point hit = B;
        for (std::size_t e = 0; e + 1 < pr.waypoints.size(); ++e) {
            const Point& C = pr.waypoints[e];
            const Point& D = pr.waypoints[e + 1];
            SegX x = segment_intersect(A, B, C, D);
            if (x == SegX::kNone) continue;
            Point pt;
            if (x == SegX::kProper) {
                pt = segment_cross_point(A, B, C, D);
            } else {
                // Touching or overlapping: one endpoint of either segment.
                if (on_segment(A, B, C))
                    pt = C;
                else if (on_segment(A, B, D))
                    pt = D;
                else if (on_segment(C, D, A))
                    pt = A;
                else
                    pt = B;
            }
            double len2 = dot(B - A, B - A);
            double tau = len2 > 0 ? dot(pt - A, B - A) / len2 : 0.0;
            if (first ? tau < best : tau > best) {
                best = first ? tau : tau;
                best = tau;
                hit = pt;
            }
        }
        return hit;
    };

    if (ss == Side::kOn || tt == Side::kOn || ss != tt) {
        Point a, b;
        if (ss == Side::kOn) {
            a = w.front();
        } else {
            int lo = 0, hi = n - 1;  // first index with side != ss
            while (lo < hi) {
                int mid = (lo + hi) / 2;
                if (side_of(w[mid]) != ss)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            a = side_of(w[lo]) == Side::kOn ? w[lo] : cross_in_segment(lo, true);
        }
        if (tt == Side::kOn) {
            b = w.back();
        } else {
            int lo = 0, hi = n - 1;  // last index with side != tt
            while (lo < hi) {
                int mid = (lo + hi + 1) / 2;
                if (side_of(w[mid]) != tt)
                    lo = mid;
                else
                    hi = mid - 1;
            }
            b = side_of(w[lo]) == Side::kOn ? w[lo] : cross_in_segment(lo + 1, false);
        }
        return std::make_pair(a, b);
    }

    // Both endpoints strictly on the same side: the paths may share a subpath.
    GeodesicPath sr = shortest_path(s, PointRef(r.ref()));
    int idx_a = -1;
    {
        int lo = 0, hi = static_cast<int>(sr.waypoints.size()) - 1;
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (side_of(sr.waypoints[mid]) == Side::kOn)
                hi = mid;
            else
                lo = mid + 1;
        }
        idx_a = lo;
    }
    Point a = sr.waypoints[idx_a];
    GeodesicPath tp = shortest_path(t, PointRef(p.ref()));
    int idx_b = -1;
    {
        int lo = 0, hi = static_cast<int>(tp.waypoints.size()) - 1;
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (side_of(tp.waypoints[mid]) == Side::kOn)
                hi = mid;
            else
                lo = mid + 1;
        }
        idx_b = lo;
    }
    Point b = tp.waypoints[idx_b];
    // False-positive check: a and b must actually lie on pi(s,t).
    if (point_polyline_dist(w, a) > kEpsDist || point_polyline_dist(w, b) > kEpsDist) {
        return std::nullopt;
    }
    if (side_of(a) != Side::kOn || side_of(b) != Side::kOn) return std::nullopt;
    return std::make_pair(a, b);
}

}  // namespace geonn
