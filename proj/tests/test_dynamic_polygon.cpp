#include <cmath>
#include <random>

#include "doctest.h"
#include "geonn/dynamic_polygon.hpp"

using namespace geonn;

TEST_CASE("barrier insertion marks vertices") {
    DynamicPolygon dp(make_square());
    CHECK(dp.complex().cycle_size() == 4);
    dp.insert_barrier({2, 0}, {2, 3});
    CHECK(dp.complex().cycle_size() == 7);  // m grows by 3
    CHECK(dp.marked_vertices().size() == 3);
    int marked_at_base = 0, marked_at_tip = 0;
    for (int id : dp.marked_vertices()) {
        if (dp.complex().point(id) == Point{2, 0}) ++marked_at_base;
        if (dp.complex().point(id) == Point{2, 3}) ++marked_at_tip;
    }
    CHECK(marked_at_base == 2);
    CHECK(marked_at_tip == 1);

    dp.insert_barrier({0, 2}, {1, 2});
    CHECK(dp.marked_vertices().size() == 6);

    CHECK_THROWS_AS(dp.insert_barrier({2, 0}, {2, 5}), ValidationError);
}

TEST_CASE("marked_on_path") {
    DynamicPolygon dp(make_square());
    dp.insert_barrier({2, 0}, {2, 3});

    auto first = dp.marked_on_path(PointRef(1, 1), PointRef(3, 1), MarkedPick::kFirst);
    REQUIRE(first.has_value());
    CHECK(first->first == Point{2, 3});

    auto none = dp.marked_on_path(PointRef(1, 1), PointRef(1, 3), MarkedPick::kFirst);
    CHECK(!none.has_value());

    dp.insert_barrier({0, 2}, {1, 2});
    auto bend = dp.marked_on_path(PointRef(0.5, 1), PointRef(0.5, 3), MarkedPick::kFirst);
    REQUIRE(bend.has_value());
    CHECK(bend->first == Point{1, 2});
    auto bend2 = dp.marked_on_path(PointRef(0.5, 1), PointRef(0.5, 3), MarkedPick::kLast);
    REQUIRE(bend2.has_value());
    CHECK(bend2->first == Point{1, 2});
}

TEST_CASE("generate_bounded_queries with no marks") {
    DynamicPolygon dp(make_square());
    auto queries = dp.generate_bounded_queries({2, 2});
    REQUIRE(queries.size() == 1);
    CHECK(queries[0].full_polygon);
}

TEST_CASE("generate_bounded_queries on the slit square") {
    DynamicPolygon dp(make_square());
    dp.insert_barrier({2, 0}, {2, 3});
    Point q{3, 1};
    auto queries = dp.generate_bounded_queries(q);
    // Boundary entries: both slit bases, the tip, and the tip's window on the
    // top edge at (1.5, 4); hence four regions, within the 4k+1 budget.
    CHECK(queries.size() <= 5);
    CHECK(queries.size() == 4);

    int triangles = 0, cones = 0;
    for (const auto& query : queries) {
        (query.kind == BoundedNNQuery::kTriangle ? triangles : cones)++;
    }
    CHECK(triangles == 2);  // the two slit-side slivers
    CHECK(cones == 2);

    bool saw_window = false;
    for (const auto& query : queries) {
        for (const BoundaryAnchor* a : {&query.s, &query.t}) {
            if (dist(a->p, {1.5, 4.0}) < 1e-9) saw_window = true;
        }
    }
    CHECK(saw_window);

    // The region containing p=(1,1) has apex at the tip and satisfies the
    // distance identity d_P(p,q) = d_old(p, v) + d_P(v, q).
    PolyComplex old_cx(make_square());
    GeodesicEngine old_eng(&old_cx);
    Point p{1, 1};
    bool found = false;
    for (const auto& query : queries) {
        std::vector<Point> loop = dp.region_loop(query, q);
        if (winding_number(loop, p) == 0) continue;
        found = true;
        Point apex = query.apex.vertex >= 0 ? dp.complex().point(query.apex.vertex)
                                            : query.apex.p;
        CHECK(apex == Point{2, 3});
        double direct = dp.distance(PointRef(p), PointRef(q));
        double via = old_eng.distance(PointRef(p), PointRef(apex)) +
                     dp.distance(query.apex, PointRef(q));
        CHECK(direct == doctest::Approx(2.0 * std::sqrt(5.0)));
        CHECK(via == doctest::Approx(direct).epsilon(1e-8));
    }
    CHECK(found);
}

TEST_CASE("bounded query regions cover the polygon and satisfy the apex identity") {
    std::mt19937_64 rng(99);
    DynamicPolygon dp(make_lshape());
    PolyComplex old_cx(make_lshape());
    GeodesicEngine old_eng(&old_cx);
    dp.insert_barrier({1, 0}, {1, 1.5});
    dp.insert_barrier({2.5, 2}, {2.5, 0.7});

    auto sample = [&]() -> Point {
        while (true) {
            Point p{(rng() % 4000) / 1000.0, (rng() % 4000) / 1000.0};
            if (dp.complex().locate(p) >= 0) return p;
        }
    };
    for (int rep = 0; rep < 8; ++rep) {
        Point q = sample();
        auto queries = dp.generate_bounded_queries(q);
        CHECK(queries.size() <= 4 * 2 + 1);
        for (int probe = 0; probe < 60; ++probe) {
            Point p = sample();
            double direct = dp.distance(PointRef(p), PointRef(q));
            // Membership: some region whose apex satisfies the identity.
            bool ok = false;
            for (const auto& query : queries) {
                PointRef apex = query.apex;
                Point apex_pt = apex.vertex >= 0 ? dp.complex().point(apex.vertex) : apex.p;
                double via = old_eng.distance(PointRef(p), PointRef(apex_pt)) +
                             dp.distance(apex, PointRef(q));
                if (std::abs(via - direct) <= 1e-8 * (1.0 + direct)) {
                    ok = true;
                    break;
                }
            }
            CHECK(ok);
        }
        // Geometric membership: each sampled point falls in >= 1 region loop,
        // and the loop's apex satisfies the identity.
        for (int probe = 0; probe < 30; ++probe) {
            Point p = sample();
            double direct = dp.distance(PointRef(p), PointRef(q));
            int holder = -1;
            for (std::size_t i = 0; i < queries.size(); ++i) {
                std::vector<Point> loop = dp.region_loop(queries[i], q);
                if (point_polyline_dist(loop, p) <= 1e-9 || winding_number(loop, p) != 0) {
                    holder = static_cast<int>(i);
                    Point apex_pt = queries[i].apex.vertex >= 0
                                        ? dp.complex().point(queries[i].apex.vertex)
                                        : queries[i].apex.p;
                    double via = old_eng.distance(PointRef(p), PointRef(apex_pt)) +
                                 dp.distance(queries[i].apex, PointRef(q));
                    if (point_polyline_dist(loop, p) > 1e-9) {
                        CHECK(via == doctest::Approx(direct).epsilon(1e-8));
                    }
                }
            }
            CHECK(holder >= 0);
        }
    }
}

TEST_CASE("region bounding paths avoid marked reflex interiors") {
    DynamicPolygon dp(make_square());
    PolyComplex old_cx(make_square());
    GeodesicEngine old_eng(&old_cx);
    dp.insert_barrier({2, 0}, {2, 3});
    dp.insert_barrier({4, 2}, {2.8, 2.2});
    Point q{1, 3.6};
    auto queries = dp.generate_bounded_queries(q);
    for (const auto& query : queries) {
        if (query.full_polygon) continue;
        for (const BoundaryAnchor* end : {&query.s, &query.t}) {
            GeodesicPath path = dp.shortest_path(query.apex, end->ref());
            for (std::size_t i = 1; i + 1 < path.waypoints.size(); ++i) {
                int id = path.vertex_ids[i];
                bool bends = orient(path.waypoints[i - 1], path.waypoints[i],
                                    path.waypoints[i + 1]) != 0;
                if (id >= 0 && bends && dp.complex().is_reflex_vertex(id)) {
                    CHECK(!dp.is_marked(id));
                }
            }
            // The bounding geodesic is a shortest path in the old polygon too.
            Point a = path.waypoints.front();
            Point b = path.waypoints.back();
            CHECK(old_eng.distance(PointRef(a), PointRef(b)) ==
                  doctest::Approx(path.length).epsilon(1e-9));
        }
    }
}

TEST_CASE("dynamic paths match a from-scratch rebuild") {
    std::mt19937_64 rng(123);
    DynamicPolygon dp(make_square());
    dp.insert_barrier({2, 0}, {2, 3});
    dp.insert_barrier({0, 2}, {1.5, 2.5});

    // Reconstruct the same polygon from its JSON cycle encoding.
    SimplePolygon snap;
    snap.vertices = dp.complex().cycle_points();
    for (const auto& b : dp.complex().barriers()) {
        snap.slit_pairs.emplace_back(dp.complex().cycle_pos(b.base_left),
                                     dp.complex().cycle_pos(b.base_right));
    }
    PolyComplex rebuilt(snap);
    GeodesicEngine fresh(&rebuilt);

    auto sample = [&]() -> Point {
        while (true) {
            Point p{(rng() % 4000) / 1000.0, (rng() % 4000) / 1000.0};
            if (dp.complex().locate(p) >= 0) return p;
        }
    };
    for (int rep = 0; rep < 200; ++rep) {
        Point a = sample(), b = sample();
        GeodesicPath live = dp.shortest_path(PointRef(a), PointRef(b));
        GeodesicPath ref = fresh.shortest_path(PointRef(a), PointRef(b));
        REQUIRE(live.waypoints.size() == ref.waypoints.size());
        for (std::size_t i = 0; i < live.waypoints.size(); ++i) {
            CHECK(live.waypoints[i] == ref.waypoints[i]);
        }
    }
}
