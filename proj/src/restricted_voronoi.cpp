#include "geonn/restricted_voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <set>
#include <cstdio>
#include <cstdlib>

#include "json.hpp"

namespace geonn {

namespace {

struct Anchored {
    double d = 0.0;
    Point anchor;
};

Anchored eval_anchored(const GeodesicEngine& eng, const Point& site, const Point& x) {
    GeodesicPath path = eng.shortest_path(PointRef(site), PointRef(x));
    Anchored a;
    a.d = path.length;
    a.anchor = path.waypoints.size() >= 2 ? path.waypoints[path.waypoints.size() - 2] : site;
    return a;
}

Point grad_from(const Anchored& a, const Point& x) {
    Point g = x - a.anchor;
    double n = norm(g);
    if (n == 0.0) return {0, 0};
    return {g.x / n, g.y / n};
}

struct TraceItem {
    int sa, sb;
    int origin;
    Point start;
    Point dir;
};

}  // namespace

RestrictedVoronoi::RestrictedVoronoi(const GeodesicEngine* eng, Splitter splitter, SiteSet sites)
    : eng_(eng), splitter_(std::move(splitter)), sites_(std::move(sites)) {
    if (sites_.points.empty()) throw ValidationError("restricted Voronoi needs at least one site");
    if (sites_.ids.size() != sites_.points.size()) {
        sites_.ids.resize(sites_.points.size());
        std::iota(sites_.ids.begin(), sites_.ids.end(), 0);
    }
    if (splitter_.path.waypoints.empty()) {
        splitter_.path = eng_->shortest_path(splitter_.from.ref(), splitter_.to.ref());
    }
    const auto& w = splitter_.path.waypoints;
    lambda_prefix_.assign(w.size(), 0.0);
    for (std::size_t i = 1; i < w.size(); ++i) {
        lambda_prefix_[i] = lambda_prefix_[i - 1] + dist(w[i - 1], w[i]);
    }
    lambda_len_ = lambda_prefix_.back();
    scale_ = std::max(1.0, eng_->complex().bbox_diameter());
    compute_relevant();
    build_forest();
    build_locator();
}

Point RestrictedVoronoi::lambda_point(double s) const {
    const auto& w = splitter_.path.waypoints;
    s = std::clamp(s, 0.0, lambda_len_);
    std::size_t lo = 0, hi = w.size() - 1;
    while (lo + 1 < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (lambda_prefix_[mid] <= s)
            lo = mid;
        else
            hi = mid;
    }
    double seg = lambda_prefix_[lo + 1] - lambda_prefix_[lo];
    double t = seg > 0 ? (s - lambda_prefix_[lo]) / seg : 0.0;
    return {w[lo].x + t * (w[lo + 1].x - w[lo].x), w[lo].y + t * (w[lo + 1].y - w[lo].y)};
}

double RestrictedVoronoi::site_distance(int i, const Point& x) const {
    return eng_->distance(PointRef(sites_.points[i]), PointRef(x));
}

int RestrictedVoronoi::nearest_site_at(const Point& x) const {
    int n = static_cast<int>(sites_.points.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return dist(sites_.points[a], x) < dist(sites_.points[b], x);
    });
    double best = std::numeric_limits<double>::infinity();
    int best_i = -1;
    for (int i : order) {
        if (dist(sites_.points[i], x) > best + kEpsDist) break;  // geodesic >= euclidean
        double d = site_distance(i, x);
        if (d < best - kEpsDist) {
            best = d;
            best_i = i;
        } else if (d <= best + kEpsDist && best_i >= 0 && sites_.ids[i] < sites_.ids[best_i]) {
            best_i = i;
            best = std::min(best, d);
        }
    }
    return best_i;
}

std::optional<Point> RestrictedVoronoi::bisector_crossing(int a, int b) const {
    auto f = [&](double s) {
        Point x = lambda_point(s);
        return site_distance(a, x) - site_distance(b, x);
    };
    double f0 = f(0.0);
    double f1 = f(lambda_len_);
    if (std::abs(f0) <= kEpsDist) return lambda_point(0.0);
    if (std::abs(f1) <= kEpsDist) return lambda_point(lambda_len_);
    if ((f0 > 0) == (f1 > 0)) return std::nullopt;
    double lo = 0.0, hi = lambda_len_;
    bool lo_neg = f0 < 0;
    for (int it = 0; it < 80 && hi - lo > 1e-12 * std::max(lambda_len_, 1.0); ++it) {
        double mid = 0.5 * (lo + hi);
        if ((f(mid) < 0) == lo_neg)
            lo = mid;
        else
            hi = mid;
    }
    return lambda_point(0.5 * (lo + hi));
}

void RestrictedVoronoi::compute_relevant() {
    forest_.relevant.clear();
    forest_.breakpoints.clear();
    int o0 = nearest_site_at(lambda_point(0.0));
    int o1 = nearest_site_at(lambda_point(lambda_len_));
    std::vector<std::pair<double, int>> breaks;  // (param, owner after)

    std::function<void(double, int, double, int, int)> refine = [&](double s0, int a, double s1,
                                                                    int b, int depth) {
        if (a == b) return;
        if (depth > 64) throw DegeneracyError("relevant-site refinement did not converge");
        auto f = [&](double s) {
            Point x = lambda_point(s);
            return site_distance(a, x) - site_distance(b, x);
        };
        double lo = s0, hi = s1;
        double flo = f(lo), fhi = f(hi);
        if ((flo < 0) == (fhi < 0)) {
            // Near-tie at an endpoint; fall back to splitting the interval.
            double mid = 0.5 * (s0 + s1);
            int om = nearest_site_at(lambda_point(mid));
            if (om == a || om == b) {
                breaks.push_back({mid, b});
                return;
            }
            refine(s0, a, mid, om, depth + 1);
            refine(mid, om, s1, b, depth + 1);
            return;
        }
        bool lo_neg = flo < 0;
        for (int it = 0; it < 80 && hi - lo > 1e-12 * std::max(lambda_len_, 1.0); ++it) {
            double mid = 0.5 * (lo + hi);
            if ((f(mid) < 0) == lo_neg)
                lo = mid;
            else
                hi = mid;
        }
        double w = 0.5 * (lo + hi);
        int ow = nearest_site_at(lambda_point(w));
        if (ow == a || ow == b) {
            breaks.push_back({w, b});
            return;
        }
        refine(s0, a, w, ow, depth + 1);
        refine(w, ow, s1, b, depth + 1);
    };
    refine(0.0, o0, lambda_len_, o1, 0);
    std::sort(breaks.begin(), breaks.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    forest_.relevant.push_back(o0);
    for (auto& [s, owner] : breaks) {
        if (owner == forest_.relevant.back()) continue;
        forest_.relevant.push_back(owner);
        forest_.breakpoints.push_back(lambda_point(s));
    }
}

Point RestrictedVoronoi::project_to_bisector(int sa, int sb, const Point& guess, double window,
                                             double max_window) const {
    Anchored aa = eval_anchored(*eng_, sites_.points[sa], guess);
    Anchored ab = eval_anchored(*eng_, sites_.points[sb], guess);
    Point n = grad_from(aa, guess) - grad_from(ab, guess);
    double nn = norm(n);
    if (nn < 1e-9) throw DegeneracyError("bisector normal vanished (tied corridor)");
    n = {n.x / nn, n.y / nn};
    auto g = [&](double tau) {
        Point x{guess.x + tau * n.x, guess.y + tau * n.y};
        return site_distance(sa, x) - site_distance(sb, x);
    };
    double w = std::max(window, 1e-13 * scale_);
    double lo = -w, hi = w;
    double glo = g(lo), ghi = g(hi);
    while ((glo < 0) == (ghi < 0) && 2.0 * hi <= max_window) {
        lo *= 2.0;
        hi *= 2.0;
        glo = g(lo);
        ghi = g(hi);
    }
    if ((glo < 0) == (ghi < 0)) throw DegeneracyError("bisector projection failed to bracket");
    bool lo_neg = glo < 0;
    for (int it = 0; it < 60 && hi - lo > 1e-14 * scale_; ++it) {
        double mid = 0.5 * (lo + hi);
        if ((g(mid) < 0) == lo_neg)
            lo = mid;
        else
            hi = mid;
    }
    double tau = 0.5 * (lo + hi);
    return {guess.x + tau * n.x, guess.y + tau * n.y};
}

int RestrictedVoronoi::find_or_add_deg3(const Point& p, int s1, int s2, int s3) {
    std::vector<int> key{s1, s2, s3};
    std::sort(key.begin(), key.end());
    for (std::size_t i = 0; i < forest_.vertices.size(); ++i) {
        VoronoiVertex& v = forest_.vertices[i];
        if (v.degree != 3) continue;
        std::vector<int> k2 = v.sites;
        std::sort(k2.begin(), k2.end());
        if (k2 == key && dist(v.p, p) <= 1e-6 * scale_) return static_cast<int>(i);
    }
    VoronoiVertex v;
    v.p = p;
    v.degree = 3;
    v.on_separator = false;
    // Counterclockwise order of the defining sites by anchor direction.
    std::vector<std::pair<double, int>> ang;
    for (int s : key) {
        Anchored a = eval_anchored(*eng_, sites_.points[s], p);
        Point d = a.anchor - p;
        ang.push_back({std::atan2(d.y, d.x), s});
    }
    std::sort(ang.begin(), ang.end());
    for (auto& [a, s] : ang) v.sites.push_back(s);
    forest_.vertices.push_back(v);
    return static_cast<int>(forest_.vertices.size()) - 1;
}

void RestrictedVoronoi::build_forest() {
    forest_.vertices.clear();
    forest_.edges.clear();
    int k = static_cast<int>(forest_.relevant.size());
    if (k <= 1) return;

    std::map<std::pair<int, int>, int> edge_of_pair;
    auto pair_key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    auto attach = [&](int edge_id, int vertex_id) {
        VoronoiEdge& e = forest_.edges[edge_id];
        if (e.va == vertex_id || e.vb == vertex_id) return;
        if (e.va < 0)
            e.va = vertex_id;
        else if (e.vb < 0)
            e.vb = vertex_id;
        else
            throw DegeneracyError("voronoi edge found a third endpoint");
    };

    std::deque<TraceItem> work;
    for (int i = 0; i + 1 < k; ++i) {
        int sa = forest_.relevant[i];
        int sb = forest_.relevant[i + 1];
        Point w = forest_.breakpoints[i];
        VoronoiVertex v;
        v.p = w;
        v.degree = 1;
        v.sites = {sa, sb};
        v.on_separator = true;
        forest_.vertices.push_back(v);
        int vid = static_cast<int>(forest_.vertices.size()) - 1;

        VoronoiEdge e;
        e.sa = sa;
        e.sb = sb;
        e.va = vid;
        forest_.edges.push_back(e);
        edge_of_pair[pair_key(sa, sb)] = static_cast<int>(forest_.edges.size()) - 1;

        // Initial direction: bisector tangent pointing into the query side.
        Anchored aa = eval_anchored(*eng_, sites_.points[sa], w);
        Anchored ab = eval_anchored(*eng_, sites_.points[sb], w);
        Point t = perp(grad_from(aa, w) - grad_from(ab, w));
        double tn = norm(t);
        if (tn < 1e-12) throw DegeneracyError("degenerate breakpoint tangent");
        t = {t.x / tn, t.y / tn};
        double best = std::numeric_limits<double>::infinity();
        Point lam{1, 0};
        const auto& wp = splitter_.path.waypoints;
        for (std::size_t j = 0; j + 1 < wp.size(); ++j) {
            double d = point_segment_dist(wp[j], wp[j + 1], w);
            if (d < best) {
                best = d;
                lam = wp[j + 1] - wp[j];
            }
        }
        double side_sign = splitter_.sites_side == Side::kLeft ? -1.0 : 1.0;
        if (cross(lam, t) * side_sign < 0) t = {-t.x, -t.y};
        work.push_back({sa, sb, vid, w, t});
    }

    int guard = 64 * k * k + 256;
    while (!work.empty()) {
        if (--guard < 0) throw DegeneracyError("voronoi tracing did not terminate");
        TraceItem item = work.front();
        work.pop_front();
        int edge_id = edge_of_pair.at(pair_key(item.sa, item.sb));

        Point x = item.start;
        Point dir = item.dir;
        double tol_event = 1e-11 * scale_;
        double hmin = 1e-12 * scale_;
        double hmax = 0.05 * scale_;
        int steps = 0;
        while (true) {
            if (++steps > 20000) throw DegeneracyError("bisector march did not terminate");
            Anchored aa = eval_anchored(*eng_, sites_.points[item.sa], x);
            Anchored ab = eval_anchored(*eng_, sites_.points[item.sb], x);

            // Third-site clearance with the Euclidean distance as lower bound.
            double phi = std::numeric_limits<double>::infinity();
            int third = -1;
            for (int u : forest_.relevant) {
                if (u == item.sa || u == item.sb) continue;
                if (dist(sites_.points[u], x) - aa.d >= phi) continue;
                double du = site_distance(u, x);
                if (du - aa.d < phi) {
                    phi = du - aa.d;
                    third = u;
                }
            }
            if (third >= 0 && phi <= tol_event) {
                // Degree-3 vertex: polish by alternating projections.
                Point v = x;
                for (int round = 0; round < 6; ++round) {
                    v = project_to_bisector(item.sa, item.sb, v, 64.0 * tol_event,
                                            0.02 * scale_);
                    Anchored pa = eval_anchored(*eng_, sites_.points[item.sa], v);
                    Anchored pu = eval_anchored(*eng_, sites_.points[third], v);
                    Point tau = perp(grad_from(pa, v) - grad_from(pu, v));
                    double tn = norm(tau);
                    if (tn < 1e-12) break;
                    tau = {tau.x / tn, tau.y / tn};
                    auto h = [&](double m) {
                        Point y{v.x + m * tau.x, v.y + m * tau.y};
                        return site_distance(third, y) - site_distance(item.sa, y);
                    };
                    double w = 64.0 * tol_event;
                    double lo = -w, hi = w;
                    double hlo = h(lo), hhi = h(hi);
                    int ex = 0;
                    while ((hlo < 0) == (hhi < 0) && ex < 8) {
                        lo *= 2;
                        hi *= 2;
                        hlo = h(lo);
                        hhi = h(hi);
                        ++ex;
                    }
                    if ((hlo < 0) == (hhi < 0)) break;
                    bool lneg = hlo < 0;
                    for (int it2 = 0; it2 < 50 && hi - lo > 1e-14 * scale_; ++it2) {
                        double mid = 0.5 * (lo + hi);
                        if ((h(mid) < 0) == lneg)
                            lo = mid;
                        else
                            hi = mid;
                    }
                    v = {v.x + 0.5 * (lo + hi) * tau.x, v.y + 0.5 * (lo + hi) * tau.y};
                }
                int vid = find_or_add_deg3(v, item.sa, item.sb, third);
                attach(edge_id, vid);
                for (auto [na, nb] :
                     {std::make_pair(item.sa, third), std::make_pair(third, item.sb)}) {
                    auto key = pair_key(na, nb);
                    auto it = edge_of_pair.find(key);
                    if (it != edge_of_pair.end()) {
                        attach(it->second, vid);
                        continue;
                    }
                    VoronoiEdge e;
                    e.sa = na;
                    e.sb = nb;
                    e.va = vid;
                    forest_.edges.push_back(e);
                    edge_of_pair[key] = static_cast<int>(forest_.edges.size()) - 1;
                    int other = item.sa + item.sb + third - na - nb;
                    Anchored ga = eval_anchored(*eng_, sites_.points[na], v);
                    Anchored gb = eval_anchored(*eng_, sites_.points[nb], v);
                    Anchored go = eval_anchored(*eng_, sites_.points[other], v);
                    Point tdir = perp(grad_from(ga, v) - grad_from(gb, v));
                    double tn2 = norm(tdir);
                    if (tn2 < 1e-12) throw DegeneracyError("degenerate spawn tangent");
                    tdir = {tdir.x / tn2, tdir.y / tn2};
                    if (dot(tdir, grad_from(go, v) - grad_from(ga, v)) < 0) {
                        tdir = {-tdir.x, -tdir.y};
                    }
                    work.push_back({na, nb, vid, v, tdir});
                }
                break;
            }

            // Distance to the boundary caps the step so that every distance
            // evaluation stays inside the polygon.
            const PolyComplex& cx = eng_->complex();
            double bdist = std::numeric_limits<double>::infinity();
            int ncyc = cx.cycle_size();
            for (int e = 0; e < ncyc; ++e) {
                bdist = std::min(bdist, point_segment_dist(cx.point(cx.cycle_vertex(e)),
                                                           cx.point(cx.cycle_vertex(e + 1)), x));
                if (bdist == 0.0) break;
            }
            if (bdist <= 1e-7 * scale_ && steps > 1) {
                // Arrived at the boundary arc: a degree-1 vertex. Land on the
                // edge ahead and refine the tie along it.
                RayHit hit = cx.ray_shoot(PointRef(x), dir);
                int e = hit.cycle_edge;
                const Point& A = cx.point(cx.cycle_vertex(e));
                const Point& B = cx.point(cx.cycle_vertex(e + 1));
                auto g = [&](double t) {
                    Point y{A.x + t * (B.x - A.x), A.y + t * (B.y - A.y)};
                    return site_distance(item.sa, y) - site_distance(item.sb, y);
                };
                double elen = std::max(dist(A, B), 1e-12);
                double t0 = std::clamp(dist(A, hit.point) / elen, 0.0, 1.0);
                Point endpoint = hit.point;
                double win = 1e-4;
                for (int expand = 0; expand < 8; ++expand) {
                    double lo = std::max(0.0, t0 - win), hi = std::min(1.0, t0 + win);
                    double glo = g(lo), ghi = g(hi);
                    if ((glo < 0) != (ghi < 0)) {
                        bool lneg = glo < 0;
                        for (int it2 = 0; it2 < 60 && hi - lo > 1e-13; ++it2) {
                            double mid = 0.5 * (lo + hi);
                            if ((g(mid) < 0) == lneg)
                                lo = mid;
                            else
                                hi = mid;
                        }
                        double tm = 0.5 * (lo + hi);
                        endpoint = {A.x + tm * (B.x - A.x), A.y + tm * (B.y - A.y)};
                        break;
                    }
                    win *= 4.0;
                }
                VoronoiVertex v;
                v.p = endpoint;
                v.degree = 1;
                v.sites = {item.sa, item.sb};
                v.on_separator = false;
                forest_.vertices.push_back(v);
                attach(edge_id, static_cast<int>(forest_.vertices.size()) - 1);
                break;
            }

            double curvature = 0.35 * std::min(dist(x, aa.anchor), dist(x, ab.anchor));
            double safety = third >= 0 ? 0.3 * phi : hmax;
            double wall = std::max(0.4 * bdist, 2.0 * hmin);
            double h = std::min({hmax, std::max(curvature, 4.0 * hmin), safety, wall});
            h = std::max(h, hmin);

            Point x_new;
            bool ok = false;
            while (!ok && h >= hmin) {
                Point guess{x.x + h * dir.x, x.y + h * dir.y};
                try {
                    x_new = project_to_bisector(item.sa, item.sb, guess,
                                                std::min(0.6 * h, 0.3 * bdist), 0.45 * bdist);
                    if (dot(x_new - x, dir) > 0.25 * h) ok = true;
                } catch (const DegeneracyError&) {
                } catch (const OutOfDomainError&) {
                }
                if (!ok) h *= 0.5;
            }
            if (!ok) throw DegeneracyError("bisector march stalled");

            Anchored na2 = eval_anchored(*eng_, sites_.points[item.sa], x_new);
            Anchored nb2 = eval_anchored(*eng_, sites_.points[item.sb], x_new);
            Point tangent = perp(grad_from(na2, x_new) - grad_from(nb2, x_new));
            double tn = norm(tangent);
            if (tn > 1e-12) {
                tangent = {tangent.x / tn, tangent.y / tn};
                if (dot(tangent, x_new - x) < 0) tangent = {-tangent.x, -tangent.y};
                dir = tangent;
            } else {
                Point secant = x_new - x;
                double sn = norm(secant);
                dir = {secant.x / sn, secant.y / sn};
            }
            x = x_new;
        }
    }

    for (const VoronoiEdge& e : forest_.edges) {
        if (e.va < 0 || e.vb < 0) {
            if (std::getenv("GEONN_DEBUG_RV")) {
                std::fprintf(stderr, "forest dump on failure:\n");
                for (std::size_t i = 0; i < forest_.vertices.size(); ++i) {
                    const auto& v = forest_.vertices[i];
                    std::fprintf(stderr, "  v%zu (%.9g,%.9g) deg%d sep%d sites:", i, v.p.x, v.p.y,
                                 v.degree, (int)v.on_separator);
                    for (int s : v.sites) std::fprintf(stderr, " %d", s);
                    std::fprintf(stderr, "\n");
                }
                for (const auto& e2 : forest_.edges) {
                    std::fprintf(stderr, "  edge (%d,%d) va=%d vb=%d\n", e2.sa, e2.sb, e2.va,
                                 e2.vb);
                }
            }
            throw DegeneracyError("voronoi edge missing an endpoint");
        }
    }
}

void RestrictedVoronoi::check_valid() const {
    for (const VoronoiVertex& v : forest_.vertices) {
        for (std::size_t i = 0; i < v.sites.size(); ++i) {
            for (std::size_t j = i + 1; j < v.sites.size(); ++j) {
                double da = site_distance(v.sites[i], v.p);
                double db = site_distance(v.sites[j], v.p);
                if (std::abs(da - db) > kEpsVoronoi) {
                    throw DegeneracyError("voronoi vertex not equidistant");
                }
            }
        }
    }
    int n = static_cast<int>(forest_.vertices.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    std::vector<int> degree(n, 0);
    for (const VoronoiEdge& e : forest_.edges) {
        ++degree[e.va];
        ++degree[e.vb];
        int ra = find(e.va), rb = find(e.vb);
        if (ra == rb) throw DegeneracyError("voronoi diagram contains a cycle");
        parent[ra] = rb;
    }
    for (int i = 0; i < n; ++i) {
        if (degree[i] != forest_.vertices[i].degree) {
            throw DegeneracyError("voronoi vertex degree mismatch");
        }
    }
    std::map<int, std::pair<int, int>> tally;  // root -> (deg1, deg3)
    std::map<int, int> arc_leaves;
    for (int i = 0; i < n; ++i) {
        int r = find(i);
        if (forest_.vertices[i].degree == 1) {
            tally[r].first++;
            if (!forest_.vertices[i].on_separator) arc_leaves[r]++;
        } else {
            tally[r].second++;
        }
    }
    for (auto& [root, counts] : tally) {
        if (counts.first != counts.second + 2) {
            throw DegeneracyError("voronoi tree leaf identity violated");
        }
        if (arc_leaves[root] != 1) {
            throw DegeneracyError("voronoi tree does not have a unique boundary leaf");
        }
    }
    for (std::size_t i = 0; i + 1 < forest_.relevant.size(); ++i) {
        double da = site_distance(forest_.relevant[i], splitter_.from.p);
        double db = site_distance(forest_.relevant[i + 1], splitter_.from.p);
        if (da > db + kEpsVoronoi) {
            throw DegeneracyError("relevant sites are not in Hamiltonian order");
        }
    }
}

void RestrictedVoronoi::build_locator() {
    decomp_.clear();
    decomp_root_ = -1;
    centroid_height_ = 0;
    int n = static_cast<int>(forest_.vertices.size());
    if (n == 0) return;

    tree_edges_.clear();
    for (std::size_t i = 0; i < forest_.edges.size(); ++i) {
        tree_edges_.push_back({forest_.edges[i].va, forest_.edges[i].vb, static_cast<int>(i)});
    }
    // Components, then stitching along the boundary arc of the query side.
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    {
        std::vector<std::vector<int>> adj(n);
        for (const auto& e : tree_edges_) {
            adj[e.va].push_back(e.vb);
            adj[e.vb].push_back(e.va);
        }
        for (int i = 0; i < n; ++i) {
            if (comp[i] >= 0) continue;
            std::deque<int> q{i};
            comp[i] = ncomp;
            while (!q.empty()) {
                int u = q.front();
                q.pop_front();
                for (int w : adj[u]) {
                    if (comp[w] < 0) {
                        comp[w] = ncomp;
                        q.push_back(w);
                    }
                }
            }
            ++ncomp;
        }
    }
    if (ncomp > 1) {
        const PolyComplex& cx = eng_->complex();
        double start_pos = splitter_.sites_side == Side::kLeft
                               ? eng_->arc_position(splitter_.from)
                               : eng_->arc_position(splitter_.to);
        struct Leaf {
            int vertex;
            double key;
        };
        std::vector<Leaf> leaves;
        for (int i = 0; i < n; ++i) {
            const VoronoiVertex& v = forest_.vertices[i];
            if (v.degree != 1 || v.on_separator) continue;
            auto be = cx.boundary_edge_of(v.p);
            double pos = 0.0;
            if (be) {
                const Point& A = cx.point(cx.cycle_vertex(*be));
                const Point& B = cx.point(cx.cycle_vertex(*be + 1));
                double len = dist(A, B);
                pos = cx.arc_position(*be, len > 0 ? dist(A, v.p) / len : 0.0);
            }
            double key = pos - start_pos;
            if (key < 0) key += cx.arc_total();
            leaves.push_back({i, key});
        }
        std::sort(leaves.begin(), leaves.end(),
                  [](const Leaf& a, const Leaf& b) { return a.key < b.key; });
        for (std::size_t i = 0; i + 1 < leaves.size(); ++i) {
            tree_edges_.push_back({leaves[i].vertex, leaves[i + 1].vertex, -1});
        }
    }
    tree_adj_.assign(n, {});
    for (std::size_t i = 0; i < tree_edges_.size(); ++i) {
        tree_adj_[tree_edges_[i].va].push_back(static_cast<int>(i));
        tree_adj_[tree_edges_[i].vb].push_back(static_cast<int>(i));
    }
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    decomp_root_ = build_decomposition(std::move(all));
    // Height of the decomposition.
    std::function<int(int)> height = [&](int id) {
        int h = 1;
        for (int c : decomp_[id].children) h = std::max(h, 1 + height(c));
        return h;
    };
    centroid_height_ = height(decomp_root_);
}

int RestrictedVoronoi::build_decomposition(std::vector<int> vertex_set) {
    DecompNode node;
    std::set<int> in_set(vertex_set.begin(), vertex_set.end());
    auto edge_inside = [&](int ei) {
        return in_set.count(tree_edges_[ei].va) && in_set.count(tree_edges_[ei].vb);
    };
    if (vertex_set.size() <= 3) {
        node.leaf = true;
        node.center = vertex_set.empty() ? -1 : vertex_set.front();
        for (std::size_t i = 0; i < tree_edges_.size(); ++i) {
            if (edge_inside(static_cast<int>(i))) node.edge_ids.push_back(static_cast<int>(i));
        }
        node.edge_ids.erase(
            std::remove_if(node.edge_ids.begin(), node.edge_ids.end(),
                           [&](int ei) { return !edge_inside(ei); }),
            node.edge_ids.end());
        decomp_.push_back(node);
        return static_cast<int>(decomp_.size()) - 1;
    }
    int root = vertex_set.front();
    std::map<int, int> size, parent_of;
    std::vector<int> order;
    {
        std::deque<int> stack{root};
        parent_of[root] = -1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            order.push_back(u);
            for (int ei : tree_adj_[u]) {
                if (!edge_inside(ei)) continue;
                int w = tree_edges_[ei].va == u ? tree_edges_[ei].vb : tree_edges_[ei].va;
                if (parent_of.count(w)) continue;
                parent_of[w] = u;
                stack.push_back(w);
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            size[*it] += 1;
            if (parent_of[*it] >= 0) size[parent_of[*it]] += size[*it];
        }
    }
    int total = static_cast<int>(order.size());
    int centroid = root;
    int best_worst = total + 1;
    for (int u : order) {
        int worst = total - size[u];
        for (int ei : tree_adj_[u]) {
            if (!edge_inside(ei)) continue;
            int w = tree_edges_[ei].va == u ? tree_edges_[ei].vb : tree_edges_[ei].va;
            if (parent_of.count(w) && parent_of[w] == u) worst = std::max(worst, size[w]);
        }
        if (worst < best_worst) {
            best_worst = worst;
            centroid = u;
        }
    }
    node.center = centroid;
    std::set<int> seen{centroid};
    for (int ei : tree_adj_[centroid]) {
        if (!edge_inside(ei)) continue;
        int w = tree_edges_[ei].va == centroid ? tree_edges_[ei].vb : tree_edges_[ei].va;
        if (seen.count(w)) continue;
        std::vector<int> comp_set;
        std::deque<int> q{w};
        seen.insert(w);
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            comp_set.push_back(u);
            for (int ej : tree_adj_[u]) {
                if (!edge_inside(ej)) continue;
                int z = tree_edges_[ej].va == u ? tree_edges_[ej].vb : tree_edges_[ej].va;
                if (z == centroid || seen.count(z)) continue;
                seen.insert(z);
                q.push_back(z);
            }
        }
        int child = build_decomposition(std::move(comp_set));
        node.children.push_back(child);
        node.child_via.push_back(ei);
    }
    decomp_.push_back(node);
    return static_cast<int>(decomp_.size()) - 1;
}

int RestrictedVoronoi::best_of(const std::vector<int>& site_indices, const Point& q) const {
    double best = std::numeric_limits<double>::infinity();
    int best_i = -1;
    std::set<int> seen;
    for (int i : site_indices) {
        if (i < 0 || seen.count(i)) continue;
        seen.insert(i);
        double d = site_distance(i, q);
        if (d < best - kEpsDist) {
            best = d;
            best_i = i;
        } else if (d <= best + kEpsDist && best_i >= 0 && sites_.ids[i] < sites_.ids[best_i]) {
            best_i = i;
            best = std::min(best, d);
        }
    }
    return best_i;
}

SubregionResult RestrictedVoronoi::subregion_test(const Point& c, int sa, int sb,
                                                  const Point& q) const {
    auto extended = [&](int site, BoundaryAnchor* pa, BoundaryAnchor* pb) -> GeodesicPath {
        GeodesicPath path = eng_->shortest_path(PointRef(c), PointRef(sites_.points[site]));
        const auto& w = path.waypoints;
        GeodesicPath full;
        Point dir_c = w.size() >= 2 ? c - w[1] : Point{1, 0};
        RayHit hc = eng_->ray_shoot(PointRef(c), dir_c);
        Point dir_s = w.size() >= 2 ? w.back() - w[w.size() - 2] : Point{1, 0};
        RayHit hs = eng_->ray_shoot(PointRef(sites_.points[site]), dir_s);
        full.waypoints.push_back(hc.point);
        full.vertex_ids.push_back(hc.vertex);
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!(full.waypoints.back() == w[i])) {
                full.waypoints.push_back(w[i]);
                full.vertex_ids.push_back(path.vertex_ids[i]);
            }
        }
        if (!(full.waypoints.back() == hs.point)) {
            full.waypoints.push_back(hs.point);
            full.vertex_ids.push_back(hs.vertex);
        }
        full.length = 0;
        for (std::size_t i = 0; i + 1 < full.waypoints.size(); ++i) {
            full.length += dist(full.waypoints[i], full.waypoints[i + 1]);
        }
        PointRef ra(hc.point);
        ra.vertex = hc.vertex;
        if (hc.vertex < 0) ra.cycle_edge = hc.cycle_edge;
        PointRef rb(hs.point);
        rb.vertex = hs.vertex;
        if (hs.vertex < 0) rb.cycle_edge = hs.cycle_edge;
        *pa = eng_->anchor(ra);
        *pb = eng_->anchor(rb);
        return full;
    };
    BoundaryAnchor a0, a1, b0, b1;
    GeodesicPath pa = extended(sa, &a0, &a1);
    GeodesicPath pb = extended(sb, &b0, &b1);

    // Calibration probe just inside the sector between the two paths.
    Anchored ga = eval_anchored(*eng_, sites_.points[sa], c);
    Anchored gb = eval_anchored(*eng_, sites_.points[sb], c);
    Point tangent = perp(grad_from(ga, c) - grad_from(gb, c));
    double tn = norm(tangent);
    if (tn < 1e-12) throw DegeneracyError("subregion probe tangent vanished");
    tangent = {tangent.x / tn, tangent.y / tn};
    double eps = 1e-5 * scale_;
    Point probe{c.x + eps * tangent.x, c.y + eps * tangent.y};
    if (eng_->complex().locate(probe) < 0 ||
        eng_->side_of_path(splitter_.path, splitter_.from, splitter_.to, probe) ==
            splitter_.sites_side) {
        probe = {c.x - eps * tangent.x, c.y - eps * tangent.y};
    }

    Side pa_probe = eng_->side_of_path(pa, a0, a1, probe);
    Side pb_probe = eng_->side_of_path(pb, b0, b1, probe);
    Side pa_q = eng_->side_of_path(pa, a0, a1, q);
    Side pb_q = eng_->side_of_path(pb, b0, b1, q);
    bool match_a = pa_q == pa_probe || pa_q == Side::kOn;
    bool match_b = pb_q == pb_probe || pb_q == Side::kOn;
    if (match_a && match_b) return SubregionResult::kBetween;
    if (!match_a) return SubregionResult::kBeyondFirst;
    return SubregionResult::kBeyondSecond;
}

int RestrictedVoronoi::locate_rec(int node_id, const Point& q, int depth) const {
    const DecompNode& node = decomp_[node_id];
    if (node.leaf) {
        std::vector<int> cands;
        if (node.center >= 0) {
            for (int s : forest_.vertices[node.center].sites) cands.push_back(s);
        }
        for (int ei : node.edge_ids) {
            const StitchEdge& se = tree_edges_[ei];
            if (se.forest_edge >= 0) {
                cands.push_back(forest_.edges[se.forest_edge].sa);
                cands.push_back(forest_.edges[se.forest_edge].sb);
            }
            for (int v : {se.va, se.vb}) {
                for (int s : forest_.vertices[v].sites) cands.push_back(s);
            }
        }
        return best_of(cands, q);
    }
    const VoronoiVertex& c = forest_.vertices[node.center];
    if (c.degree == 3) {
        for (int i = 0; i < 3; ++i) {
            int sj = c.sites[(i + 1) % 3];
            int sk = c.sites[(i + 2) % 3];
            SubregionResult r = subregion_test(c.p, sj, sk, q);
            if (r != SubregionResult::kBetween) continue;
            // q lies between the paths to sj and sk: the region opposite
            // c.sites[i], incident to the bisector edge (sj, sk).
            for (std::size_t ci = 0; ci < node.children.size(); ++ci) {
                const StitchEdge& se = tree_edges_[node.child_via[ci]];
                if (se.forest_edge < 0) continue;
                const VoronoiEdge& fe = forest_.edges[se.forest_edge];
                if ((fe.sa == sj && fe.sb == sk) || (fe.sa == sk && fe.sb == sj)) {
                    return locate_rec(node.children[ci], q, depth + 1);
                }
            }
            return best_of({c.sites[0], c.sites[1], c.sites[2]}, q);
        }
        return best_of({c.sites[0], c.sites[1], c.sites[2]}, q);
    }
    // Stitching vertex: an arc leaf with two defining sites.
    int s1 = c.sites[0], s2 = c.sites[1];
    SubregionResult r = subregion_test(c.p, s1, s2, q);
    if (r == SubregionResult::kBetween) {
        for (std::size_t ci = 0; ci < node.children.size(); ++ci) {
            const StitchEdge& se = tree_edges_[node.child_via[ci]];
            if (se.forest_edge >= 0) return locate_rec(node.children[ci], q, depth + 1);
        }
        return best_of({s1, s2}, q);
    }
    int target_site = r == SubregionResult::kBeyondFirst ? s1 : s2;
    const PolyComplex& cx = eng_->complex();
    auto be = cx.boundary_edge_of(c.p);
    double pos = 0.0;
    if (be) {
        const Point& A = cx.point(cx.cycle_vertex(*be));
        const Point& B = cx.point(cx.cycle_vertex(*be + 1));
        double len = dist(A, B);
        pos = cx.arc_position(*be, len > 0 ? dist(A, c.p) / len : 0.0);
    }
    double eps = 1e-5 * std::max(1.0, cx.arc_total());
    for (std::size_t ci = 0; ci < node.children.size(); ++ci) {
        const StitchEdge& se = tree_edges_[node.child_via[ci]];
        if (se.forest_edge >= 0) continue;
        int other = se.va == node.center ? se.vb : se.va;
        auto ob = cx.boundary_edge_of(forest_.vertices[other].p);
        if (!ob) continue;
        const Point& A = cx.point(cx.cycle_vertex(*ob));
        const Point& B = cx.point(cx.cycle_vertex(*ob + 1));
        double len = dist(A, B);
        double opos =
            cx.arc_position(*ob, len > 0 ? dist(A, forest_.vertices[other].p) / len : 0.0);
        double fwd = opos - pos;
        if (fwd < 0) fwd += cx.arc_total();
        bool stitch_forward = fwd < cx.arc_total() - fwd;
        Point off = cx.boundary_point_at(stitch_forward ? pos + eps : pos - eps);
        double d1 = site_distance(s1, off);
        double d2 = site_distance(s2, off);
        int off_site = d1 <= d2 ? s1 : s2;
        if (off_site == target_site) return locate_rec(node.children[ci], q, depth + 1);
    }
    return best_of({s1, s2}, q);
}

int RestrictedVoronoi::locate_nearest(const Point& q) const {
    Side qs = eng_->side_of_path(splitter_.path, splitter_.from, splitter_.to, q);
    if (qs == splitter_.sites_side) {
        throw OutOfDomainError("query point is on the site side of the separator");
    }
    if (forest_.relevant.size() <= 1 || decomp_root_ < 0) {
        return forest_.relevant.empty() ? nearest_site_at(q) : forest_.relevant.front();
    }
    return locate_rec(decomp_root_, q, 1);
}

std::string RestrictedVoronoi::dump_json() const {
    nlohmann::json j;
    j["relevant"] = nlohmann::json::array();
    for (int s : forest_.relevant) j["relevant"].push_back(sites_.ids[s]);
    j["vertices"] = nlohmann::json::array();
    for (const auto& v : forest_.vertices) {
        nlohmann::json jv;
        jv["p"] = {v.p.x, v.p.y};
        jv["degree"] = v.degree;
        jv["on_separator"] = v.on_separator;
        jv["sites"] = nlohmann::json::array();
        for (int s : v.sites) jv["sites"].push_back(sites_.ids[s]);
        j["vertices"].push_back(jv);
    }
    j["edges"] = nlohmann::json::array();
    for (const auto& e : forest_.edges) {
        j["edges"].push_back(
            {{"sites", {sites_.ids[e.sa], sites_.ids[e.sb]}}, {"va", e.va}, {"vb", e.vb}});
    }
    return j.dump(2);
}

std::optional<Point> bisector_crossing(const GeodesicEngine& eng, const Point& a, const Point& b,
                                       const Splitter& splitter) {
    Splitter sp = splitter;
    if (sp.path.waypoints.empty()) {
        sp.path = eng.shortest_path(sp.from.ref(), sp.to.ref());
    }
    std::vector<double> prefix(sp.path.waypoints.size(), 0.0);
    for (std::size_t i = 1; i < sp.path.waypoints.size(); ++i) {
        prefix[i] = prefix[i - 1] + dist(sp.path.waypoints[i - 1], sp.path.waypoints[i]);
    }
    double L = prefix.back();
    auto at = [&](double s) {
        s = std::clamp(s, 0.0, L);
        std::size_t lo = 0, hi = sp.path.waypoints.size() - 1;
        while (lo + 1 < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (prefix[mid] <= s)
                lo = mid;
            else
                hi = mid;
        }
        double seg = prefix[lo + 1] - prefix[lo];
        double t = seg > 0 ? (s - prefix[lo]) / seg : 0.0;
        const Point& A = sp.path.waypoints[lo];
        const Point& B = sp.path.waypoints[lo + 1];
        return Point{A.x + t * (B.x - A.x), A.y + t * (B.y - A.y)};
    };
    auto f = [&](double s) {
        Point x = at(s);
        return eng.distance(PointRef(a), PointRef(x)) - eng.distance(PointRef(b), PointRef(x));
    };
    double f0 = f(0.0), f1 = f(L);
    if (std::abs(f0) <= kEpsDist) return at(0.0);
    if (std::abs(f1) <= kEpsDist) return at(L);
    if ((f0 > 0) == (f1 > 0)) return std::nullopt;
    double lo = 0, hi = L;
    bool lo_neg = f0 < 0;
    for (int it = 0; it < 80 && hi - lo > 1e-12 * std::max(L, 1.0); ++it) {
        double mid = 0.5 * (lo + hi);
        if ((f(mid) < 0) == lo_neg)
            lo = mid;
        else
            hi = mid;
    }
    return at(0.5 * (lo + hi));
}

}  // namespace geonn
