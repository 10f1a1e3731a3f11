#include "geonn/complex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

namespace geonn {

namespace {

std::string pt_str(const Point& p) {
    std::ostringstream os;
    os << "(" << p.x << "," << p.y << ")";
    return os.str();
}

// Is direction d strictly inside the wedge from ray e1 to ray e2 (CCW)?
// Handles reflex wedges and the full-circle wedge at a slit tip.
bool dir_in_wedge(const Point& d, const Point& e1, const Point& e2) {
    double c12 = cross(e1, e2);
    double c1d = cross(e1, d);
    double cd2 = cross(d, e2);
    if (c12 > 0.0) return c1d > 0.0 && cd2 > 0.0;
    if (c12 < 0.0) return c1d > 0.0 || cd2 > 0.0;
    // e1, e2 collinear: either a straight angle or a full turn (slit tip).
    if (dot(e1, e2) > 0.0) {
        // Full 2*pi wedge; exclude only the shared ray itself.
        return !(c1d == 0.0 && dot(d, e1) > 0.0);
    }
    return c1d > 0.0;
}

}  // namespace

PolyComplex::PolyComplex(const SimplePolygon& poly) {
    validate(poly);
    if (poly.slit_pairs.empty()) {
        pts_ = poly.vertices;
        cycle_.resize(pts_.size());
        pos_.resize(pts_.size());
        for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
            cycle_[i] = i;
            pos_[i] = i;
        }
        esrc_.resize(cycle_.size());
        for (int i = 0; i < static_cast<int>(cycle_.size()); ++i) {
            esrc_[i] = EdgeSource{EdgeSource::kOriginal, i, 0.0, 1.0, -1};
        }
        triangulate_cycle();
        rebuild_connectivity();
        rebuild_arcs();
        rebuild_grid();
        return;
    }

    // Peel slits in reverse insertion order, then replay them as barriers.
    SimplePolygon base = poly;
    std::vector<std::pair<Point, Point>> replay;
    while (!base.slit_pairs.empty()) {
        bool peeled = false;
        for (std::size_t k = base.slit_pairs.size(); k-- > 0;) {
            auto [i, j] = base.slit_pairs[k];
            std::size_t n = base.size();
            if ((i + 2) % n != j % n) continue;
            Point u = base.vertices[i];
            Point tip = base.vertices[(i + 1) % n];
            replay.emplace_back(u, tip);
            std::vector<Point> vs;
            for (std::size_t t = 0; t < n; ++t) {
                if (t == (i + 1) % n || t == j % n) continue;
                vs.push_back(base.vertices[t]);
            }
            std::vector<std::pair<std::size_t, std::size_t>> pairs;
            auto shift = [&](std::size_t t) {
                std::size_t s = t;
                if (t > (i + 1) % n) --s;
                if (t > j % n) --s;
                return s;
            };
            for (std::size_t q = 0; q < base.slit_pairs.size(); ++q) {
                if (q == k) continue;
                pairs.emplace_back(shift(base.slit_pairs[q].first),
                                   shift(base.slit_pairs[q].second));
            }
            base.vertices = std::move(vs);
            base.slit_pairs = std::move(pairs);
            peeled = true;
            break;
        }
        if (!peeled) throw ValidationError("unreconstructible slit structure in polygon");
    }
    *this = PolyComplex(base);
    for (auto it = replay.rbegin(); it != replay.rend(); ++it) {
        insert_barrier(it->first, it->second);
    }
}

std::vector<std::array<int, 3>> PolyComplex::ear_clip(const std::vector<int>& ids) const {
    int n = static_cast<int>(ids.size());
    if (n < 3) throw DegeneracyError("ear clip needs at least 3 vertices");
    std::vector<int> next(n), prev(n);
    for (int i = 0; i < n; ++i) {
        next[i] = (i + 1) % n;
        prev[i] = (i + n - 1) % n;
    }
    std::vector<std::array<int, 3>> out;
    out.reserve(n - 2);
    int remaining = n;
    int cursor = 0;
    int sweep = 0;
    while (remaining > 3) {
        int a = prev[cursor], b = cursor, c = next[cursor];
        const Point& pa = pts_[ids[a]];
        const Point& pb = pts_[ids[b]];
        const Point& pc = pts_[ids[c]];
        bool ear = orient(pa, pb, pc) > 0;
        if (ear) {
            for (int w = next[c]; w != a; w = next[w]) {
                const Point& pw = pts_[ids[w]];
                bool inside = orient(pa, pb, pw) > 0 && orient(pb, pc, pw) > 0 &&
                              orient(pc, pa, pw) > 0;
                bool on_diag = !(pw == pa) && !(pw == pc) && on_segment(pa, pc, pw);
                if (inside || on_diag) {
                    ear = false;
                    break;
                }
            }
        }
        if (ear) {
            out.push_back({ids[a], ids[b], ids[c]});
            next[a] = c;
            prev[c] = a;
            cursor = c;
            --remaining;
            sweep = 0;
        } else {
            cursor = next[cursor];
            if (++sweep > remaining) {
                throw DegeneracyError("ear clipping failed to find an ear");
            }
        }
    }
    int a = cursor, b = next[cursor], c = next[next[cursor]];
    if (orient(pts_[ids[a]], pts_[ids[b]], pts_[ids[c]]) <= 0) {
        throw DegeneracyError("final ear-clip triangle is degenerate");
    }
    out.push_back({ids[a], ids[b], ids[c]});
    return out;
}

void PolyComplex::triangulate_cycle() {
    std::vector<int> ids = cycle_;
    auto tris = ear_clip(ids);
    faces_.clear();
    for (const auto& t : tris) faces_.push_back(Face{{t[0], t[1], t[2]}, {-1, -1, -1}});
}

void PolyComplex::rebuild_connectivity() {
    int F = face_count();
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edges;  // undirected
    for (int f = 0; f < F; ++f) {
        for (int i = 0; i < 3; ++i) {
            int a = faces_[f].v[i], b = faces_[f].v[(i + 1) % 3];
            edges[{std::min(a, b), std::max(a, b)}].push_back({f, i});
            faces_[f].nbr[i] = -1;
        }
    }
    for (const auto& [key, lst] : edges) {
        if (lst.size() == 2) {
            faces_[lst[0].first].nbr[lst[0].second] = lst[1].first;
            faces_[lst[1].first].nbr[lst[1].second] = lst[0].first;
        } else if (lst.size() != 1) {
            throw DegeneracyError("edge shared by more than two faces");
        }
    }
    // Dual tree rooted at face 0.
    parent_.assign(F, -2);
    depth_.assign(F, 0);
    std::vector<int> stack{0};
    parent_[0] = -1;
    int seen = 0;
    while (!stack.empty()) {
        int f = stack.back();
        stack.pop_back();
        ++seen;
        for (int i = 0; i < 3; ++i) {
            int g = faces_[f].nbr[i];
            if (g >= 0 && parent_[g] == -2) {
                parent_[g] = f;
                depth_[g] = depth_[f] + 1;
                stack.push_back(g);
            }
        }
    }
    if (seen != F) throw DegeneracyError("dual graph is not connected");

    vfaces_.assign(pts_.size(), {});
    for (int f = 0; f < F; ++f) {
        for (int i = 0; i < 3; ++i) vfaces_[faces_[f].v[i]].push_back(f);
    }
    // Map each boundary cycle edge to its unique incident face.
    std::unordered_map<long long, int> dir_edge_face;
    for (int f = 0; f < F; ++f) {
        for (int i = 0; i < 3; ++i) {
            if (faces_[f].nbr[i] < 0) {
                long long key =
                    static_cast<long long>(faces_[f].v[i]) * (1LL << 31) + faces_[f].v[(i + 1) % 3];
                dir_edge_face[key] = f;
            }
        }
    }
    int n = cycle_size();
    edge_face_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        long long key = static_cast<long long>(cycle_[i]) * (1LL << 31) + cycle_[(i + 1) % n];
        auto it = dir_edge_face.find(key);
        if (it == dir_edge_face.end()) {
            throw DegeneracyError("boundary edge missing from triangulation");
        }
        edge_face_[i] = it->second;
    }
}

void PolyComplex::rebuild_arcs() {
    int n = cycle_size();
    arc_pos_.assign(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        arc_pos_[i + 1] = arc_pos_[i] + dist(pts_[cycle_[i]], pts_[cycle_[(i + 1) % n]]);
    }
    arc_total_ = arc_pos_[n];
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Point& p : pts_) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    bbox_diam_ = std::hypot(xmax - xmin, ymax - ymin);
}

void PolyComplex::rebuild_grid() {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Point& p : pts_) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    int n = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(face_count()))));
    n = std::min(n, 128);
    grid_.nx = grid_.ny = n;
    grid_.x0 = xmin;
    grid_.y0 = ymin;
    grid_.cw = std::max((xmax - xmin) / n, 1e-300);
    grid_.ch = std::max((ymax - ymin) / n, 1e-300);
    grid_.cells.assign(static_cast<std::size_t>(n) * n, {});
    for (int f = 0; f < face_count(); ++f) {
        double fx0 = 1e300, fx1 = -1e300, fy0 = 1e300, fy1 = -1e300;
        for (int i = 0; i < 3; ++i) {
            const Point& p = pts_[faces_[f].v[i]];
            fx0 = std::min(fx0, p.x);
            fx1 = std::max(fx1, p.x);
            fy0 = std::min(fy0, p.y);
            fy1 = std::max(fy1, p.y);
        }
        int cx0 = std::clamp(static_cast<int>((fx0 - grid_.x0) / grid_.cw), 0, n - 1);
        int cx1 = std::clamp(static_cast<int>((fx1 - grid_.x0) / grid_.cw), 0, n - 1);
        int cy0 = std::clamp(static_cast<int>((fy0 - grid_.y0) / grid_.ch), 0, n - 1);
        int cy1 = std::clamp(static_cast<int>((fy1 - grid_.y0) / grid_.ch), 0, n - 1);
        for (int cy = cy0; cy <= cy1; ++cy) {
            for (int cx = cx0; cx <= cx1; ++cx) {
                grid_.cells[static_cast<std::size_t>(cy) * n + cx].push_back(f);
            }
        }
    }
}

int PolyComplex::locate(const Point& q) const {
    double pad = 1e-9 * std::max(1.0, bbox_diam_);
    if (q.x < grid_.x0 - pad || q.y < grid_.y0 - pad ||
        q.x > grid_.x0 + grid_.cw * grid_.nx + pad || q.y > grid_.y0 + grid_.ch * grid_.ny + pad) {
        return -1;
    }
    int cx = std::clamp(static_cast<int>((q.x - grid_.x0) / grid_.cw), 0, grid_.nx - 1);
    int cy = std::clamp(static_cast<int>((q.y - grid_.y0) / grid_.ch), 0, grid_.ny - 1);
    const auto& cand = grid_.cells[static_cast<std::size_t>(cy) * grid_.nx + cx];
    for (int f : cand) {
        const Face& fc = faces_[f];
        if (orient(pts_[fc.v[0]], pts_[fc.v[1]], q) >= 0 &&
            orient(pts_[fc.v[1]], pts_[fc.v[2]], q) >= 0 &&
            orient(pts_[fc.v[2]], pts_[fc.v[0]], q) >= 0) {
            return f;
        }
    }
    return -1;
}

std::optional<int> PolyComplex::boundary_edge_of(const Point& q) const {
    int n = cycle_size();
    for (int i = 0; i < n; ++i) {
        if (on_segment(pts_[cycle_[i]], pts_[cycle_[(i + 1) % n]], q)) return i;
    }
    return std::nullopt;
}

int PolyComplex::resolve_face(const PointRef& r) const {
    if (r.face >= 0) return r.face;
    if (r.vertex >= 0) {
        const auto& fs = vfaces_[r.vertex];
        if (fs.empty()) throw OutOfDomainError("vertex has no incident face");
        return *std::min_element(fs.begin(), fs.end());
    }
    if (r.cycle_edge >= 0) return edge_face_[wrap(r.cycle_edge)];
    int f = locate(r.p);
    if (f < 0) throw OutOfDomainError("point " + pt_str(r.p) + " outside polygon");
    return f;
}

int PolyComplex::wedge_face_at_vertex(int vid, const Point& dir) const {
    const Point& v = pts_[vid];
    const auto& fs = vfaces_[vid];
    std::vector<int> sorted(fs.begin(), fs.end());
    std::sort(sorted.begin(), sorted.end());
    for (int f : sorted) {
        const Face& fc = faces_[f];
        int i = 0;
        while (fc.v[i] != vid) ++i;
        Point ea = pts_[fc.v[(i + 1) % 3]] - v;
        Point eb = pts_[fc.v[(i + 2) % 3]] - v;
        double c1 = cross(ea, dir);
        double cd = cross(dir, eb);
        if (c1 >= 0.0 && cd >= 0.0 && (c1 > 0.0 || cd > 0.0)) return f;
        if (c1 == 0.0 && cd == 0.0) return f;  // degenerate sliver
    }
    return -1;
}

RayHit PolyComplex::ray_shoot(const PointRef& from, const Point& rawdir) const {
    if (rawdir.x == 0.0 && rawdir.y == 0.0) throw ValidationError("ray direction must be nonzero");
    Point dir = rawdir * (1.0 / norm(rawdir));
    Point o = from.p;
    int f;
    if (from.vertex >= 0) {
        o = pts_[from.vertex];
        f = wedge_face_at_vertex(from.vertex, dir);
        if (f < 0) {
            // Outward or along-boundary ray from a boundary vertex.
            RayHit hit;
            hit.point = o;
            hit.vertex = from.vertex;
            hit.cycle_edge = pos_[from.vertex];
            hit.t = 0.0;
            return hit;
        }
    } else {
        f = resolve_face(from);
        // The origin may sit on an edge of the located face with the ray
        // pointing across it; shift the start into the correct face.
        for (int hop = 0; hop < 4; ++hop) {
            const Face& fc = faces_[f];
            bool moved = false;
            for (int i = 0; i < 3; ++i) {
                const Point& A = pts_[fc.v[i]];
                const Point& B = pts_[fc.v[(i + 1) % 3]];
                if (!on_segment(A, B, o)) continue;
                if (cross(B - A, dir) < 0) {
                    if (fc.nbr[i] < 0) {
                        RayHit hit;  // outward from a boundary edge
                        hit.point = o;
                        hit.cycle_edge = pos_[fc.v[i]];
                        hit.t = 0.0;
                        return hit;
                    }
                    f = fc.nbr[i];
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
    }
    Point o2 = o + dir;
    double d2 = dot(dir, dir);
    double t_entry = 0.0;
    int entry_edge = -1;  // edge index within current face
    int guard = 4 * face_count() + 16;
    while (guard-- > 0) {
        const Face& fc = faces_[f];
        double best_t = std::numeric_limits<double>::infinity();
        int best_edge = -1;
        int best_vertex = -1;
        // Vertex passes.
        for (int i = 0; i < 3; ++i) {
            int vid = fc.v[i];
            const Point& V = pts_[vid];
            if (from.vertex == vid) continue;
            if (orient(o, o2, V) == 0) {
                double t = dot(V - o, dir) / d2;
                if (t > 1e-15 && t >= t_entry - 1e-12 && t < best_t) {
                    best_t = t;
                    best_vertex = vid;
                    best_edge = -1;
                }
            }
        }
        // Edge crossings.
        for (int i = 0; i < 3; ++i) {
            if (i == entry_edge) continue;
            const Point& A = pts_[fc.v[i]];
            const Point& B = pts_[fc.v[(i + 1) % 3]];
            int sA = orient(o, o2, A);
            int sB = orient(o, o2, B);
            if (sA == 0 || sB == 0 || sA == sB) continue;
            double denom = cross(dir, B - A);
            if (denom == 0.0) continue;
            double t = cross(A - o, B - A) / denom;
            if (t >= t_entry - 1e-12 && t > 1e-12 && t < best_t) {
                best_t = t;
                best_edge = i;
                best_vertex = -1;
            }
        }
        if (best_vertex >= 0) {
            RayHit hit;
            hit.point = pts_[best_vertex];
            hit.vertex = best_vertex;
            hit.cycle_edge = pos_[best_vertex];
            hit.t = best_t;
            return hit;
        }
        if (best_edge < 0) throw DegeneracyError("ray walk found no exit");
        int g = fc.nbr[best_edge];
        if (g < 0) {
            // Boundary hit.
            int a = fc.v[best_edge], b = fc.v[(best_edge + 1) % 3];
            int posn = pos_[a];
            if (cycle_[(posn + 1) % cycle_size()] != b) {
                throw DegeneracyError("boundary edge not aligned with cycle");
            }
            RayHit hit;
            hit.point = {o.x + best_t * dir.x, o.y + best_t * dir.y};
            hit.cycle_edge = posn;
            hit.t = best_t;
            return hit;
        }
        // Cross into the neighbor; find the shared edge index there.
        int a = fc.v[best_edge], b = fc.v[(best_edge + 1) % 3];
        const Face& gc = faces_[g];
        entry_edge = -1;
        for (int i = 0; i < 3; ++i) {
            int u = gc.v[i], w = gc.v[(i + 1) % 3];
            if ((u == a && w == b) || (u == b && w == a)) entry_edge = i;
        }
        t_entry = best_t;
        f = g;
    }
    throw DegeneracyError("ray walk did not terminate");
}

double PolyComplex::arc_position(int pos, double t) const {
    int p = wrap(pos);
    double len = arc_pos_[p + 1] - arc_pos_[p];
    return arc_pos_[p] + t * len;
}

Point PolyComplex::boundary_point_at(double s, int* edge_out) const {
    double total = arc_total_;
    s = std::fmod(s, total);
    if (s < 0) s += total;
    int lo = 0, hi = cycle_size();
    while (lo + 1 < hi) {
        int mid = (lo + hi) / 2;
        if (arc_pos_[mid] <= s)
            lo = mid;
        else
            hi = mid;
    }
    double len = arc_pos_[lo + 1] - arc_pos_[lo];
    double t = len > 0 ? (s - arc_pos_[lo]) / len : 0.0;
    const Point& a = pts_[cycle_[lo]];
    const Point& b = pts_[cycle_[(lo + 1) % cycle_size()]];
    if (edge_out) *edge_out = lo;
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

bool PolyComplex::is_reflex_vertex(int vertex_id) const {
    int p = pos_[vertex_id];
    const Point& prev = pts_[cycle_[wrap(p - 1)]];
    const Point& cur = pts_[vertex_id];
    const Point& next = pts_[cycle_[wrap(p + 1)]];
    if (prev == next) return true;  // slit tip, full turn
    return orient(prev, cur, next) < 0;
}

std::vector<Point> PolyComplex::cycle_points() const {
    std::vector<Point> out;
    out.reserve(cycle_.size());
    for (int id : cycle_) out.push_back(pts_[id]);
    return out;
}

void PolyComplex::walk_check_segment(const Point& u, const Point& v, int start_face) const {
    Point dir = v - u;
    int f = start_face;
    double t_entry = 0.0;
    int entry_edge = -1;
    int guard = 4 * face_count() + 16;
    while (guard-- > 0) {
        const Face& fc = faces_[f];
        // A vertex strictly inside the open segment blocks the barrier.
        for (int i = 0; i < 3; ++i) {
            const Point& V = pts_[fc.v[i]];
            if (V == u || V == v) continue;
            if (on_segment(u, v, V) && !(V == u) && !(V == v)) {
                throw ValidationError("barrier passes through boundary vertex " + pt_str(V));
            }
        }
        double best_t = std::numeric_limits<double>::infinity();
        int best_edge = -1;
        for (int i = 0; i < 3; ++i) {
            if (i == entry_edge) continue;
            const Point& A = pts_[fc.v[i]];
            const Point& B = pts_[fc.v[(i + 1) % 3]];
            int sA = orient(u, v, A);
            int sB = orient(u, v, B);
            if (sA == 0 || sB == 0 || sA == sB) continue;
            double t = cross(A - u, B - A) / cross(dir, B - A);
            // t near 0 is the base point itself sitting on its boundary edge.
            if (t > 1e-12 && t >= t_entry - 1e-12 && t < best_t) {
                best_t = t;
                best_edge = i;
            }
        }
        if (best_edge < 0 || best_t >= 1.0) {
            // Tail of the segment ends in this face: v must be in it.
            if (orient(pts_[fc.v[0]], pts_[fc.v[1]], v) < 0 ||
                orient(pts_[fc.v[1]], pts_[fc.v[2]], v) < 0 ||
                orient(pts_[fc.v[2]], pts_[fc.v[0]], v) < 0) {
                throw DegeneracyError("segment walk lost the target");
            }
            return;
        }
        if (faces_[f].nbr[best_edge] < 0) {
            Point w{u.x + best_t * dir.x, u.y + best_t * dir.y};
            throw ValidationError("barrier crosses the boundary at " + pt_str(w));
        }
        int g = fc.nbr[best_edge];
        int a = fc.v[best_edge], b = fc.v[(best_edge + 1) % 3];
        const Face& gc = faces_[g];
        entry_edge = -1;
        for (int i = 0; i < 3; ++i) {
            int p = gc.v[i], q = gc.v[(i + 1) % 3];
            if ((p == a && q == b) || (p == b && q == a)) entry_edge = i;
        }
        t_entry = best_t;
        f = g;
    }
    throw DegeneracyError("segment walk did not terminate");
}

int PolyComplex::split_boundary_at(const Point& u, const Point& toward) {
    Point d = toward - u;
    int n = cycle_size();
    // Vertex candidates first.
    for (int p = 0; p < n; ++p) {
        int vid = cycle_[p];
        if (!(pts_[vid] == u)) continue;
        const Point& vnext = pts_[cycle_[wrap(p + 1)]];
        const Point& vprev = pts_[cycle_[wrap(p - 1)]];
        if (dir_in_wedge(d, vnext - u, vprev - u)) return vid;
    }
    for (int p = 0; p < n; ++p) {
        const Point& A = pts_[cycle_[p]];
        const Point& B = pts_[cycle_[wrap(p + 1)]];
        if (A == u || B == u) continue;
        if (!on_segment(A, B, u)) continue;
        if (cross(B - A, d) <= 0) continue;  // outward or along
        // Split edge p at u.
        int nu = static_cast<int>(pts_.size());
        pts_.push_back(u);
        int fsplit = edge_face_[p];
        Face fc = faces_[fsplit];
        int i = 0;
        while (!(fc.v[i] == cycle_[p] && fc.v[(i + 1) % 3] == cycle_[wrap(p + 1)])) ++i;
        int a = fc.v[i], b = fc.v[(i + 1) % 3], c = fc.v[(i + 2) % 3];
        faces_[fsplit] = Face{{a, nu, c}, {-1, -1, -1}};
        faces_.push_back(Face{{nu, b, c}, {-1, -1, -1}});
        cycle_.insert(cycle_.begin() + p + 1, nu);
        EdgeSource src = esrc_[p];
        double tm = 0.0;
        double seg = dist(A, B);
        if (seg > 0) tm = dist(A, u) / seg;
        EdgeSource left = src, right = src;
        if (src.kind == EdgeSource::kOriginal) {
            double tall = src.t1 - src.t0;
            left.t1 = src.t0 + tm * tall;
            right.t0 = left.t1;
        }
        esrc_[p] = left;
        esrc_.insert(esrc_.begin() + p + 1, right);
        pos_.assign(pts_.size(), -1);
        for (int k = 0; k < static_cast<int>(cycle_.size()); ++k) pos_[cycle_[k]] = k;
        rebuild_connectivity();
        rebuild_arcs();
        rebuild_grid();
        return nu;
    }
    throw ValidationError("barrier base " + pt_str(u) +
                          " is not on the boundary with an inward direction");
}

BarrierRecord PolyComplex::insert_barrier(Point u, Point v) {
    if (!is_finite(u) || !is_finite(v)) throw ValidationError("barrier endpoints must be finite");
    if (u == v) throw ValidationError("barrier endpoints coincide");

    // Interior endpoint checks, with the coincidence perturbation.
    for (int attempt = 0;; ++attempt) {
        if (attempt > 8) throw DegeneracyError("could not perturb barrier tip clear of vertices");
        bool hit = false;
        for (const Point& p : pts_) {
            if (dist(p, v) <= kEpsDist) {
                hit = true;
                break;
            }
        }
        if (!hit) break;
        Point d = v - u;
        double len = norm(d);
        if (len <= 4e-9) throw ValidationError("barrier too short");
        v = {v.x - d.x / len * 2e-9, v.y - d.y / len * 2e-9};
    }
    if (boundary_edge_of(v)) throw ValidationError("barrier tip lies on the boundary");
    if (locate(v) < 0) throw ValidationError("barrier tip " + pt_str(v) + " outside polygon");

    // Pre-validation walk on the untouched complex.
    {
        Point d = v - u;
        int start = -1;
        int n = cycle_size();
        for (int p = 0; p < n && start < 0; ++p) {
            int vid = cycle_[p];
            if (pts_[vid] == u) {
                const Point& vnext = pts_[cycle_[wrap(p + 1)]];
                const Point& vprev = pts_[cycle_[wrap(p - 1)]];
                if (dir_in_wedge(d, vnext - u, vprev - u)) {
                    start = wedge_face_at_vertex(vid, d);
                }
            }
        }
        for (int p = 0; p < n && start < 0; ++p) {
            const Point& A = pts_[cycle_[p]];
            const Point& B = pts_[cycle_[wrap(p + 1)]];
            if (A == u || B == u) continue;
            if (on_segment(A, B, u) && cross(B - A, d) > 0) start = edge_face_[p];
        }
        if (start < 0) {
            throw ValidationError("barrier base " + pt_str(u) +
                                  " is not on the boundary with an inward direction");
        }
        walk_check_segment(u, v, start);
    }

    int nu = split_boundary_at(u, v);

    // Insert the tip vertex.
    int nv = static_cast<int>(pts_.size());
    {
        int f = locate(v);
        if (f < 0) throw ValidationError("barrier tip outside polygon");
        const Face fc = faces_[f];
        int zero_edge = -1;
        for (int i = 0; i < 3; ++i) {
            if (orient(pts_[fc.v[i]], pts_[fc.v[(i + 1) % 3]], v) == 0) zero_edge = i;
        }
        pts_.push_back(v);
        if (zero_edge < 0) {
            int a = fc.v[0], b = fc.v[1], c = fc.v[2];
            faces_[f] = Face{{a, b, nv}, {-1, -1, -1}};
            faces_.push_back(Face{{b, c, nv}, {-1, -1, -1}});
            faces_.push_back(Face{{c, a, nv}, {-1, -1, -1}});
        } else {
            int a = fc.v[zero_edge], b = fc.v[(zero_edge + 1) % 3], c = fc.v[(zero_edge + 2) % 3];
            int g = fc.nbr[zero_edge];
            if (g < 0) throw ValidationError("barrier tip lies on the boundary");
            const Face gc = faces_[g];
            int j = 0;
            while (!(gc.v[j] == b && gc.v[(j + 1) % 3] == a)) ++j;
            int dvert = gc.v[(j + 2) % 3];
            faces_[f] = Face{{a, nv, c}, {-1, -1, -1}};
            faces_[g] = Face{{nv, a, dvert}, {-1, -1, -1}};
            faces_.push_back(Face{{nv, b, c}, {-1, -1, -1}});
            faces_.push_back(Face{{b, nv, dvert}, {-1, -1, -1}});
        }
        pos_.push_back(-1);
        rebuild_connectivity();
        rebuild_grid();
    }

    // Enforce the edge nu-nv by cavity retriangulation.
    {
        bool already = false;
        for (int f : vfaces_[nu]) {
            for (int i = 0; i < 3; ++i) {
                if (faces_[f].v[i] == nu && (faces_[f].v[(i + 1) % 3] == nv ||
                                             faces_[f].v[(i + 2) % 3] == nv)) {
                    already = true;
                }
            }
        }
        if (!already) {
            Point dir = v - u;
            int f = wedge_face_at_vertex(nu, dir);
            if (f < 0) throw DegeneracyError("no wedge face for barrier segment");
            std::vector<int> sleeve;
            std::vector<std::pair<int, int>> portals;  // (left id, right id)
            double t_entry = 0.0;
            int entry_edge = -1;
            int guard = 4 * face_count() + 16;
            while (guard-- > 0) {
                const Face& fc = faces_[f];
                sleeve.push_back(f);
                bool has_nv = fc.v[0] == nv || fc.v[1] == nv || fc.v[2] == nv;
                double best_t = std::numeric_limits<double>::infinity();
                int best_edge = -1;
                for (int i = 0; i < 3; ++i) {
                    if (i == entry_edge) continue;
                    const Point& A = pts_[fc.v[i]];
                    const Point& B = pts_[fc.v[(i + 1) % 3]];
                    if (fc.v[i] == nu || fc.v[(i + 1) % 3] == nu) continue;
                    if (fc.v[i] == nv || fc.v[(i + 1) % 3] == nv) continue;
                    int sA = orient(u, v, A);
                    int sB = orient(u, v, B);
                    if (sA == 0 || sB == 0 || sA == sB) continue;
                    double t = cross(A - u, B - A) / cross(dir, B - A);
                    if (t >= t_entry - 1e-12 && t <= 1.0 && t < best_t) {
                        best_t = t;
                        best_edge = i;
                    }
                }
                if (best_edge < 0) {
                    if (!has_nv) throw DegeneracyError("barrier sleeve lost its target");
                    break;
                }
                int g = fc.nbr[best_edge];
                if (g < 0) throw ValidationError("barrier crosses the boundary");
                // Portal: left endpoint is the head of the directed edge in f.
                portals.push_back({fc.v[(best_edge + 1) % 3], fc.v[best_edge]});
                int a = fc.v[best_edge], b = fc.v[(best_edge + 1) % 3];
                const Face& gc = faces_[g];
                entry_edge = -1;
                for (int i = 0; i < 3; ++i) {
                    int p = gc.v[i], q = gc.v[(i + 1) % 3];
                    if ((p == a && q == b) || (p == b && q == a)) entry_edge = i;
                }
                t_entry = best_t;
                f = g;
            }
            // Cavity walls.
            std::vector<int> left{nu}, right{nu};
            for (auto [l, r] : portals) {
                if (left.back() != l) left.push_back(l);
                if (right.back() != r) right.push_back(r);
            }
            left.push_back(nv);
            right.push_back(nv);
            // Remove sleeve faces.
            std::vector<bool> dead(faces_.size(), false);
            for (int s : sleeve) dead[s] = true;
            std::vector<Face> kept;
            kept.reserve(faces_.size());
            for (std::size_t i = 0; i < faces_.size(); ++i) {
                if (!dead[i]) kept.push_back(faces_[i]);
            }
            faces_ = std::move(kept);
            auto add_cavity = [&](std::vector<int> chain) {
                if (chain.size() < 3) return;
                std::vector<Point> coords;
                for (int id : chain) coords.push_back(pts_[id]);
                if (signed_area(coords) < 0) std::reverse(chain.begin(), chain.end());
                for (const auto& t : ear_clip(chain)) {
                    faces_.push_back(Face{{t[0], t[1], t[2]}, {-1, -1, -1}});
                }
            };
            add_cavity(left);
            add_cavity(right);
            rebuild_connectivity();
            rebuild_grid();
        }
    }

    // Cut along (nu, nv): duplicate the base and relabel the right fan.
    int nu2 = static_cast<int>(pts_.size());
    pts_.push_back(pts_[nu]);
    pos_.push_back(-1);
    for (Face& fc : faces_) {
        bool has_nu = fc.v[0] == nu || fc.v[1] == nu || fc.v[2] == nu;
        if (!has_nu) continue;
        int side = 0;
        for (int i = 0; i < 3; ++i) {
            if (fc.v[i] == nu) continue;
            if (fc.v[i] == nv) continue;
            int s = orient(u, v, pts_[fc.v[i]]);
            if (s != 0) side = s;
        }
        if (side < 0) {
            for (int i = 0; i < 3; ++i) {
                if (fc.v[i] == nu) fc.v[i] = nu2;
            }
        }
    }
    {
        int p = pos_[nu];
        // pos_ may be stale after connectivity rebuilds; recompute directly.
        p = -1;
        for (int k = 0; k < cycle_size(); ++k) {
            if (cycle_[k] == nu) p = k;
        }
        cycle_.insert(cycle_.begin() + p + 1, nv);
        cycle_.insert(cycle_.begin() + p + 2, nu2);
        int bidx = static_cast<int>(barriers_.size());
        // New edges p (nu->nv) and p+1 (nv->nu2); the old edge leaving nu
        // shifts to position p+2.
        EdgeSource sleft{EdgeSource::kSlitLeft, -1, 0.0, 1.0, bidx};
        EdgeSource sright{EdgeSource::kSlitRight, -1, 0.0, 1.0, bidx};
        esrc_.insert(esrc_.begin() + p, sright);
        esrc_.insert(esrc_.begin() + p, sleft);
        pos_.assign(pts_.size(), -1);
        for (int k = 0; k < cycle_size(); ++k) pos_[cycle_[k]] = k;
    }
    rebuild_connectivity();
    rebuild_arcs();
    rebuild_grid();

    BarrierRecord rec;
    rec.base = u;
    rec.tip = v;
    rec.base_left = nu;
    rec.base_right = nu2;
    rec.tip_id = nv;
    barriers_.push_back(rec);
    return rec;
}

void PolyComplex::reset_edge_provenance() {
    for (int i = 0; i < cycle_size(); ++i) {
        esrc_[i] = EdgeSource{EdgeSource::kOriginal, i, 0.0, 1.0, -1};
    }
}

void PolyComplex::check_valid() const {
    if (face_count() != cycle_size() - 2) {
        throw DegeneracyError("face count != m-2");
    }
    for (const Face& fc : faces_) {
        if (orient(pts_[fc.v[0]], pts_[fc.v[1]], pts_[fc.v[2]]) <= 0) {
            throw DegeneracyError("face is not counterclockwise");
        }
    }
    for (int i = 0; i < cycle_size(); ++i) {
        if (pos_[cycle_[i]] != i) throw DegeneracyError("cycle/pos mismatch");
    }
    int boundary_edges = 0;
    for (const Face& fc : faces_) {
        for (int i = 0; i < 3; ++i) {
            if (fc.nbr[i] < 0) ++boundary_edges;
        }
    }
    if (boundary_edges != cycle_size()) throw DegeneracyError("boundary edge count mismatch");
}

}  // namespace geonn
