#include <cmath>
#include <random>

#include "doctest.h"
#include "geonn/engine.hpp"

using namespace geonn;

namespace {

PolyComplex make_slit_square() {
    PolyComplex sq(make_square());
    sq.insert_barrier({2, 0}, {2, 3});
    return sq;
}

}  // namespace

TEST_CASE("straight and bent shortest paths") {
    PolyComplex sq(make_square());
    GeodesicEngine eng(&sq);
    GeodesicPath p = eng.shortest_path(PointRef(1, 1), PointRef(3, 1));
    REQUIRE(p.waypoints.size() == 2);
    CHECK(p.length == doctest::Approx(2.0));

    PolyComplex ell(make_lshape());
    GeodesicEngine le(&ell);
    GeodesicPath q = le.shortest_path(PointRef(3, 1), PointRef(1, 3));
    REQUIRE(q.waypoints.size() == 3);
    CHECK(q.waypoints[1] == Point{2, 2});
    CHECK(q.length == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("slit forces paths around the tip") {
    PolyComplex sq = make_slit_square();
    GeodesicEngine eng(&sq);
    GeodesicPath p = eng.shortest_path(PointRef(1, 1), PointRef(3, 1));
    REQUIRE(p.waypoints.size() == 3);
    CHECK(p.waypoints[1] == Point{2, 3});
    CHECK(p.length == doctest::Approx(2.0 * std::sqrt(5.0)));

    GeodesicPath q = eng.shortest_path(PointRef(1, 1), PointRef(1, 3));
    CHECK(q.waypoints.size() == 2);
    CHECK(q.length == doctest::Approx(2.0));

    // Ray from the right side toward the tip hits exactly the tip vertex.
    RayHit h = eng.ray_shoot(PointRef(3, 1), {-1, 2});
    CHECK(h.point == Point{2, 3});
    CHECK(h.vertex >= 0);
}

TEST_CASE("path symmetry and metric properties") {
    PolyComplex ell(make_lshape());
    GeodesicEngine eng(&ell);
    std::mt19937_64 rng(7);
    auto sample = [&]() -> Point {
        while (true) {
            Point p{(rng() % 4000) / 1000.0, (rng() % 4000) / 1000.0};
            if (ell.locate(p) >= 0) return p;
        }
    };
    for (int i = 0; i < 200; ++i) {
        Point a = sample(), b = sample(), c = sample();
        GeodesicPath ab = eng.shortest_path(PointRef(a), PointRef(b));
        GeodesicPath ba = eng.shortest_path(PointRef(b), PointRef(a));
        REQUIRE(ab.waypoints.size() == ba.waypoints.size());
        for (std::size_t j = 0; j < ab.waypoints.size(); ++j) {
            CHECK(ab.waypoints[j] == ba.waypoints[ba.waypoints.size() - 1 - j]);
        }
        CHECK(ab.length >= dist(a, b) - 1e-12);
        double dac = eng.distance(PointRef(a), PointRef(c));
        double dcb = eng.distance(PointRef(c), PointRef(b));
        CHECK(ab.length <= dac + dcb + 1e-9);
        // Interior waypoints are reflex polygon vertices.
        for (std::size_t j = 1; j + 1 < ab.waypoints.size(); ++j) {
            REQUIRE(ab.vertex_ids[j] >= 0);
            CHECK(ell.is_reflex_vertex(ab.vertex_ids[j]));
        }
    }
}

TEST_CASE("side_of_path classification") {
    PolyComplex sq(make_square());
    GeodesicEngine eng(&sq);
    BoundaryAnchor p = eng.anchor(PointRef(0, 0));
    BoundaryAnchor r = eng.anchor(PointRef(4, 4));
    CHECK(eng.side_of_path(p, r, {1, 2}) == Side::kLeft);
    CHECK(eng.side_of_path(p, r, {2, 2}) == Side::kOn);
    CHECK(eng.side_of_path(p, r, {2, 1}) == Side::kRight);

    PolyComplex ell(make_lshape());
    GeodesicEngine le(&ell);
    BoundaryAnchor lp = le.anchor(PointRef(4, 0));
    BoundaryAnchor lr = le.anchor(PointRef(0, 4));
    CHECK(le.side_of_path(lp, lr, {3, 3}) == Side::kRight);
    CHECK(le.side_of_path(lp, lr, {1, 1}) == Side::kLeft);
}

TEST_CASE("side_of_path agrees with winding oracle") {
    PolyComplex ell(make_lshape());
    GeodesicEngine eng(&ell);
    std::mt19937_64 rng(13);
    auto cycle_pts = ell.cycle_points();
    for (int trial = 0; trial < 100; ++trial) {
        double sp = (rng() % 100000) / 100000.0 * ell.arc_total();
        double sr = (rng() % 100000) / 100000.0 * ell.arc_total();
        if (std::abs(sp - sr) < 1e-6) continue;
        int ep = 0, er = 0;
        Point pp = ell.boundary_point_at(sp, &ep);
        Point pr = ell.boundary_point_at(sr, &er);
        BoundaryAnchor ap = eng.anchor(PointRef{pp});
        BoundaryAnchor ar = eng.anchor(PointRef{pr});
        Point s;
        while (true) {
            s = {(rng() % 4000) / 1000.0, (rng() % 4000) / 1000.0};
            if (ell.locate(s) >= 0) break;
        }
        Side got = eng.side_of_path(ap, ar, s);
        // Oracle: winding of s against path + boundary arc r->p (ccw).
        GeodesicPath path = eng.shortest_path(ap.ref(), ar.ref());
        if (point_polyline_dist(path.waypoints, s) <= kEpsDist) {
            CHECK(got == Side::kOn);
            continue;
        }
        // Walk boundary vertices from r forward to p to close the left loop.
        std::vector<Point> loop = path.waypoints;
        int n = ell.cycle_size();
        int j = (ar.vertex >= 0 ? ell.cycle_pos(ar.vertex) : ar.cycle_edge) + 1;
        int stop = ap.vertex >= 0 ? ell.cycle_pos(ap.vertex) : ap.cycle_edge + 1;
        int guard = n + 2;
        while (((j % n) + n) % n != ((stop % n) + n) % n && guard-- > 0) {
            loop.push_back(ell.point(ell.cycle_vertex(j)));
            ++j;
        }
        Side oracle = winding_number(loop, s) != 0 ? Side::kLeft : Side::kRight;
        CHECK(got == oracle);
    }
}

TEST_CASE("path_intersection cases") {
    PolyComplex sq(make_square());
    GeodesicEngine eng(&sq);
    BoundaryAnchor p = eng.anchor(PointRef(0, 0));
    BoundaryAnchor r = eng.anchor(PointRef(4, 4));

    auto x1 = eng.path_intersection(PointRef(1, 3), PointRef(3, 1), p, r);
    REQUIRE(x1.has_value());
    CHECK(dist(x1->first, {2, 2}) < 1e-9);
    CHECK(dist(x1->second, {2, 2}) < 1e-9);

    // Both endpoints strictly below the diagonal.
    auto x2 = eng.path_intersection(PointRef(1, 0.5), PointRef(2, 0.5), p, r);
    CHECK(!x2.has_value());

    PolyComplex ell(make_lshape());
    GeodesicEngine le(&ell);
    BoundaryAnchor lp = le.anchor(PointRef(4, 2));
    BoundaryAnchor lr = le.anchor(PointRef(2, 4));
    auto x3 = le.path_intersection(PointRef(4, 0.5), PointRef(0.5, 4), lp, lr);
    REQUIRE(x3.has_value());
    CHECK(dist(x3->first, {2, 2}) < 1e-9);
    CHECK(dist(x3->second, {2, 2}) < 1e-9);
}

TEST_CASE("path_intersection shared subpath") {
    // Force both paths through the slit tip corridor so they overlap.
    PolyComplex sq = make_slit_square();
    GeodesicEngine eng(&sq);
    BoundaryAnchor p = eng.anchor(PointRef(0.5, 0));
    BoundaryAnchor r = eng.anchor(PointRef(3.5, 0));
    GeodesicPath pr = eng.shortest_path(p.ref(), r.ref());
    REQUIRE(pr.waypoints.size() >= 3);  // wraps the tip

    auto x = eng.path_intersection(PointRef(1, 2.8), PointRef(3, 2.8), p, r);
    REQUIRE(x.has_value());
    CHECK(dist(x->first, {2, 3}) < 1e-9);
    CHECK(dist(x->second, {2, 3}) < 1e-9);
}

TEST_CASE("path handle access") {
    PolyComplex ell(make_lshape());
    GeodesicEngine eng(&ell);
    GeodesicPath p = eng.shortest_path(PointRef(3, 1), PointRef(1, 3));
    std::vector<bool> marked(ell.vertex_count(), false);
    PathHandle h(p, marked);
    CHECK(h.size() == 3);
    CHECK(h.total_length() == doctest::Approx(p.length));
    CHECK(h.prefix_length(1) == doctest::Approx(std::sqrt(2.0)));
    CHECK(h.first_marked() == -1);
    int idx = h.search([&](int i) { return h.prefix_length(i) > 1.0; });
    CHECK(idx == 1);
}
