#include "geonn/geodesic_triangulation.hpp"

#include <algorithm>
#include <cmath>

namespace geonn {

namespace {

// Longest common prefix (by vertex id) of two paths leaving the same vertex.
int common_prefix(const GeodesicPath& a, const GeodesicPath& b) {
    std::size_t n = std::min(a.vertex_ids.size(), b.vertex_ids.size());
    std::size_t i = 0;
    while (i < n && a.vertex_ids[i] == b.vertex_ids[i] && a.vertex_ids[i] >= 0) ++i;
    return static_cast<int>(i) - 1;  // last shared index
}

}  // namespace

GTDualTree::GTDualTree(const GeodesicEngine* engine) : eng_(engine) {
    const PolyComplex& cx = eng_->complex();
    int n = cx.cycle_size();
    nodes_.reserve(std::max(0, n - 2));
    root_ = build(1, n, 0);
    height_ = 0;
    for (const GTNode& nd : nodes_) height_ = std::max(height_, nd.depth);
    double bound = kHeightFactor * std::log2(std::max(4, n));
    if (height_ > bound) throw DegeneracyError("geodesic triangulation is unbalanced");
}

int GTDualTree::build(int lo, int hi, int depth) {
    if (hi - lo < 2) return -1;
    const PolyComplex& cx = eng_->complex();
    int mid = (lo + hi) / 2;
    GTNode nd;
    nd.arc_lo = lo;
    nd.arc_mid = mid;
    nd.arc_hi = hi;
    nd.depth = depth;
    int u = cx.cycle_vertex(lo);
    int v = cx.cycle_vertex(mid);
    int w = cx.cycle_vertex(hi);
    nd.tri.corners = {u, v, w};
    nd.tri.sides[0] = eng_->shortest_path(PointRef::at_vertex(u), PointRef::at_vertex(v));
    nd.tri.sides[1] = eng_->shortest_path(PointRef::at_vertex(v), PointRef::at_vertex(w));
    nd.tri.sides[2] = eng_->shortest_path(PointRef::at_vertex(w), PointRef::at_vertex(u));
    compute_deltoid(&nd.tri);
    int self = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(nd));
    int cl = build(lo, mid, depth + 1);
    int ch = build(mid, hi, depth + 1);
    nodes_[self].child_lo = cl;
    nodes_[self].child_hi = ch;
    if (cl >= 0) nodes_[cl].parent = self;
    if (ch >= 0) nodes_[ch].parent = self;
    return self;
}

void GTDualTree::compute_deltoid(GeodesicTriangle* tri) const {
    const GeodesicPath& s01 = tri->sides[0];  // u -> v
    const GeodesicPath& s12 = tri->sides[1];  // v -> w
    const GeodesicPath& s20 = tri->sides[2];  // w -> u
    GeodesicPath s02 = s20.reversed();        // u -> w
    GeodesicPath s10 = s01.reversed();        // v -> u
    GeodesicPath s21 = s12.reversed();        // w -> v

    int iu = common_prefix(s01, s02);  // divergence on side0 measured from u
    int iv = common_prefix(s12, s10);  // on side1 from v
    int iw = common_prefix(s20, s21);  // on side2 from w
    iu = std::max(iu, 0);
    iv = std::max(iv, 0);
    iw = std::max(iw, 0);

    int n0 = static_cast<int>(s01.waypoints.size());
    int n1 = static_cast<int>(s12.waypoints.size());
    int n2 = static_cast<int>(s20.waypoints.size());
    // Side0 runs u->v: the tail at u covers [0..iu], the tail at v covers
    // [n0-1-iv .. n0-1].
    int a0 = iu, b0 = n0 - 1 - iv;
    int a1 = iv, b1 = n1 - 1 - iw;
    int a2 = iw, b2 = n2 - 1 - iu;

    tri->tails[0].assign(s01.waypoints.begin(), s01.waypoints.begin() + iu + 1);
    tri->tails[1].assign(s12.waypoints.begin(), s12.waypoints.begin() + iv + 1);
    tri->tails[2].assign(s20.waypoints.begin(), s20.waypoints.begin() + iw + 1);

    tri->deltoid.clear();
    if (a0 > b0 || a1 > b1 || a2 > b2) {
        tri->deltoid_empty = true;
        return;
    }
    auto append = [&](const GeodesicPath& p, int from, int to) {
        for (int i = from; i <= to; ++i) {
            const Point& pt = p.waypoints[i];
            if (!tri->deltoid.empty() && tri->deltoid.back() == pt) continue;
            tri->deltoid.push_back(pt);
        }
    };
    append(s01, a0, b0);
    append(s12, a1, b1);
    append(s20, a2, b2);
    while (tri->deltoid.size() > 1 && tri->deltoid.front() == tri->deltoid.back()) {
        tri->deltoid.pop_back();
    }
    if (tri->deltoid.size() < 3 || std::abs(signed_area(tri->deltoid)) < 1e-18) {
        tri->deltoid_empty = true;
        tri->deltoid.clear();
        return;
    }
    tri->deltoid_empty = false;
}

bool GTDualTree::triangle_contains(int node, const Point& q) const {
    const GeodesicTriangle& tri = nodes_[node].tri;
    for (const GeodesicPath& side : tri.sides) {
        if (point_polyline_dist(side.waypoints, q) <= kEpsDist) return true;
    }
    if (tri.deltoid_empty) return false;
    if (point_polyline_dist(tri.deltoid, q) <= kEpsDist) return true;
    return winding_number(tri.deltoid, q) != 0;
}

int GTDualTree::point_locate(const Point& q) const {
    const PolyComplex& cx = eng_->complex();
    if (cx.locate(q) < 0) throw OutOfDomainError("query point outside polygon");
    int cur = root_;
    int guard = node_count() + 4;
    while (guard-- > 0) {
        if (triangle_contains(cur, q)) return cur;
        const GTNode& nd = nodes_[cur];
        int next = -1;
        if (nd.child_lo >= 0) {
            // Child subpolygon [lo..mid]: q belongs iff q is left of the
            // side oriented mid -> lo (the boundary arc closes it on the left).
            BoundaryAnchor am = eng_->anchor(PointRef::at_vertex(nd.tri.corners[1]));
            BoundaryAnchor al = eng_->anchor(PointRef::at_vertex(nd.tri.corners[0]));
            GeodesicPath rev = nd.tri.sides[0].reversed();
            if (eng_->side_of_path(rev, am, al, q) == Side::kLeft) next = nd.child_lo;
        }
        if (next < 0 && nd.child_hi >= 0) {
            BoundaryAnchor ah = eng_->anchor(PointRef::at_vertex(nd.tri.corners[2]));
            BoundaryAnchor am = eng_->anchor(PointRef::at_vertex(nd.tri.corners[1]));
            GeodesicPath rev = nd.tri.sides[1].reversed();
            if (eng_->side_of_path(rev, ah, am, q) == Side::kLeft) next = nd.child_hi;
        }
        if (next < 0) break;
        cur = next;
    }
    // Numerical sliver or boundary case: exhaustive highest-containing scan.
    int best = -1;
    for (int i = 0; i < node_count(); ++i) {
        if (triangle_contains(i, q)) {
            if (best < 0 || nodes_[i].depth < nodes_[best].depth) best = i;
        }
    }
    if (best < 0) throw DegeneracyError("point not contained in any geodesic triangle");
    return best;
}

GeodesicPath GTDualTree::subpolygon_separator(int node) const {
    return nodes_[node].tri.sides[2].reversed();  // oriented cycle[lo] -> cycle[hi]
}

std::pair<double, double> GTDualTree::arc_interval(int node) const {
    const PolyComplex& cx = eng_->complex();
    const GTNode& nd = nodes_[node];
    double lo = cx.arc_position(nd.arc_lo, 0.0);
    double hi = nd.arc_hi >= cx.cycle_size() ? cx.arc_total() : cx.arc_position(nd.arc_hi, 0.0);
    return {lo, hi};
}

int GTDualTree::lca(int a, int b) const {
    while (a != b) {
        if (nodes_[a].depth < nodes_[b].depth)
            b = nodes_[b].parent;
        else
            a = nodes_[a].parent;
        if (a < 0 || b < 0) throw DegeneracyError("lca walk escaped the tree");
    }
    return a;
}

std::vector<int> GTDualTree::path_to_ancestor(int a, int b) const {
    std::vector<int> out;
    int cur = a;
    while (true) {
        out.push_back(cur);
        if (cur == b) break;
        cur = nodes_[cur].parent;
        if (cur < 0) throw DegeneracyError("ancestor path escaped the tree");
    }
    return out;
}

}  // namespace geonn
