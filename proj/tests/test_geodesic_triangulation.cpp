#include <cmath>
#include <random>

#include "doctest.h"
#include "geonn/geodesic_triangulation.hpp"

using namespace geonn;

namespace {

SimplePolygon regular_ngon(int m, double radius = 10.0) {
    SimplePolygon poly;
    for (int i = 0; i < m; ++i) {
        double a = 2.0 * M_PI * i / m;
        poly.vertices.push_back({radius * std::cos(a), radius * std::sin(a)});
    }
    return poly;
}

double polygon_area(const PolyComplex& cx) {
    double area = 0.0;
    for (const Face& f : cx.faces()) {
        area += 0.5 * cross(cx.point(f.v[1]) - cx.point(f.v[0]), cx.point(f.v[2]) - cx.point(f.v[0]));
    }
    return area;
}

}  // namespace

TEST_CASE("gt on trivial polygons") {
    SimplePolygon tri{{{0, 0}, {1, 0}, {0, 1}}, {}};
    PolyComplex tc(tri);
    GeodesicEngine te(&tc);
    GTDualTree gt(&te);
    CHECK(gt.node_count() == 1);
    CHECK(gt.height() == 0);

    PolyComplex sq(make_square());
    GeodesicEngine se(&sq);
    GTDualTree sgt(&se);
    CHECK(sgt.node_count() == 2);
    for (int i = 0; i < 2; ++i) {
        CHECK(!sgt.node(i).tri.deltoid_empty);
        CHECK(sgt.node(i).tri.tails[0].size() == 1);  // no tails in a convex polygon
    }
}

TEST_CASE("gt balance on a convex 16-gon") {
    SimplePolygon poly = regular_ngon(16);
    PolyComplex cx(poly);
    GeodesicEngine eng(&cx);
    GTDualTree gt(&eng);
    CHECK(gt.node_count() == 14);
    CHECK(gt.height() <= 8 * 4);
    CHECK(gt.height() <= 4);  // midpoint split is near-perfectly balanced
}

TEST_CASE("gt deltoid areas cover the polygon") {
    for (int m : {16, 64}) {
        SimplePolygon poly = regular_ngon(m);
        PolyComplex cx(poly);
        GeodesicEngine eng(&cx);
        GTDualTree gt(&eng);
        double sum = 0.0;
        for (int i = 0; i < gt.node_count(); ++i) {
            if (!gt.node(i).tri.deltoid_empty) sum += signed_area(gt.node(i).tri.deltoid);
        }
        CHECK(sum == doctest::Approx(polygon_area(cx)).epsilon(1e-6));
    }
    // L-shape with a slit: deltoids still tile the polygon.
    PolyComplex cx(make_lshape());
    cx.insert_barrier({1, 0}, {1, 3});
    GeodesicEngine eng(&cx);
    GTDualTree gt(&eng);
    double sum = 0.0;
    for (int i = 0; i < gt.node_count(); ++i) {
        if (!gt.node(i).tri.deltoid_empty) sum += signed_area(gt.node(i).tri.deltoid);
    }
    CHECK(sum == doctest::Approx(polygon_area(cx)).epsilon(1e-6));
}

TEST_CASE("gt sides are geodesics between boundary points") {
    PolyComplex cx(make_lshape());
    cx.insert_barrier({3, 0}, {3, 1.5});
    GeodesicEngine eng(&cx);
    GTDualTree gt(&eng);
    for (int i = 0; i < gt.node_count(); ++i) {
        const GeodesicTriangle& tri = gt.node(i).tri;
        for (int s = 0; s < 3; ++s) {
            GeodesicPath again = eng.shortest_path(PointRef::at_vertex(tri.corners[s]),
                                                   PointRef::at_vertex(tri.corners[(s + 1) % 3]));
            CHECK(again.length == doctest::Approx(tri.sides[s].length));
        }
    }
}

TEST_CASE("gt point location matches brute force") {
    SimplePolygon poly = regular_ngon(16);
    PolyComplex cx(poly);
    GeodesicEngine eng(&cx);
    GTDualTree gt(&eng);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 300; ++t) {
        Point q{(rng() % 20000) / 1000.0 - 10.0, (rng() % 20000) / 1000.0 - 10.0};
        if (cx.locate(q) < 0) continue;
        int got = gt.point_locate(q);
        int best = -1;
        for (int i = 0; i < gt.node_count(); ++i) {
            if (gt.triangle_contains(i, q)) {
                if (best < 0 || gt.node(i).depth < gt.node(best).depth) best = i;
            }
        }
        REQUIRE(best >= 0);
        CHECK(gt.node(got).depth == gt.node(best).depth);
        CHECK(got == best);
    }
    // Point on the shared side goes to the higher node.
    PolyComplex sq(make_square());
    GeodesicEngine se(&sq);
    GTDualTree sgt(&se);
    int on_diag = sgt.point_locate({2, 2});
    CHECK(on_diag == sgt.root());
}

TEST_CASE("gt subpolygon helpers") {
    PolyComplex sq(make_square());
    GeodesicEngine eng(&sq);
    GTDualTree gt(&eng);
    auto [lo, hi] = gt.arc_interval(gt.root());
    CHECK(lo == doctest::Approx(4.0));   // arc position of cycle[1]
    CHECK(hi == doctest::Approx(16.0));  // whole rest of the boundary
    int child = gt.node(gt.root()).child_hi;
    REQUIRE(child >= 0);
    GeodesicPath sep = gt.subpolygon_separator(child);
    CHECK(sep.waypoints.size() == 2);
}

TEST_CASE("chain tree flags and lengths") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 2 + static_cast<int>(rng() % 40);
        std::vector<Point> pts;
        std::vector<bool> marked;
        for (int i = 0; i < n; ++i) {
            pts.push_back({static_cast<double>(i), (rng() % 100) / 25.0});
            marked.push_back(rng() % 4 == 0);
        }
        ChainTree ct(pts, marked);
        double len = 0.0;
        for (int i = 0; i + 1 < n; ++i) len += dist(pts[i], pts[i + 1]);
        CHECK(ct.total_length() == doctest::Approx(len));
        int first = -1, last = -1;
        for (int i = 0; i < n; ++i) {
            if (marked[i]) {
                if (first < 0) first = i;
                last = i;
            }
        }
        CHECK(ct.first_marked() == first);
        CHECK(ct.last_marked() == last);
        for (int rep = 0; rep < 10; ++rep) {
            int a = rng() % n, b = rng() % n;
            if (a > b) std::swap(a, b);
            bool any = false;
            for (int i = a; i <= b; ++i) any = any || marked[i];
            CHECK(ct.any_marked(a, b) == any);
        }
    }
}
