#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "geonn/restricted_voronoi.hpp"

using namespace geonn;

namespace {

Splitter make_splitter(const GeodesicEngine& eng, Point from, Point to, Side sites_side) {
    Splitter sp;
    sp.from = eng.anchor(PointRef(from));
    sp.to = eng.anchor(PointRef(to));
    sp.path = eng.shortest_path(sp.from.ref(), sp.to.ref());
    sp.sites_side = sites_side;
    return sp;
}

SiteSet make_sites(std::vector<Point> pts) {
    SiteSet s;
    s.points = std::move(pts);
    s.ids.resize(s.points.size());
    for (std::size_t i = 0; i < s.ids.size(); ++i) s.ids[i] = static_cast<int>(i);
    return s;
}

}  // namespace

TEST_CASE("bisector crossing on a chord") {
    PolyComplex sq(make_square());
    GeodesicEngine eng(&sq);
    Splitter sp = make_splitter(eng, {0, 2}, {4, 2}, Side::kRight);

    auto w = bisector_crossing(eng, {1, 1}, {3, 1}, sp);
    REQUIRE(w.has_value());
    CHECK(dist(*w, {2, 2}) < 1e-9);

    auto none = bisector_crossing(eng, {1, 1}, {1, 0.5}, sp);
    CHECK(!none.has_value());

    Splitter vertical = make_splitter(eng, {2, 0}, {2, 4}, Side::kLeft);
    auto w2 = bisector_crossing(eng, {1, 1}, {1, 3}, vertical);
    REQUIRE(w2.has_value());
    CHECK(dist(*w2, {2, 2}) < 1e-9);
}

TEST_CASE("relevant sites along the separator") {
    PolyComplex sq(make_square());
    GeodesicEngine eng(&sq);
    Splitter sp = make_splitter(eng, {0, 2}, {4, 2}, Side::kRight);

    RestrictedVoronoi one(&eng, sp, make_sites({{2, 1}}));
    CHECK(one.forest().relevant.size() == 1);
    CHECK(one.forest().breakpoints.empty());

    RestrictedVoronoi two(&eng, sp, make_sites({{1, 1}, {3, 1}}));
    REQUIRE(two.forest().relevant.size() == 2);
    CHECK(two.forest().relevant[0] == 0);
    CHECK(two.forest().relevant[1] == 1);
    REQUIRE(two.forest().breakpoints.size() == 1);
    CHECK(dist(two.forest().breakpoints[0], {2, 2}) < 1e-9);

    // A site that is never nearest on the separator is not relevant.
    RestrictedVoronoi three(&eng, sp, make_sites({{1, 1}, {3, 1}, {2, 0}}));
    REQUIRE(three.forest().relevant.size() == 2);
    CHECK(three.forest().relevant[0] == 0);
    CHECK(three.forest().relevant[1] == 1);
}

TEST_CASE("two-site forest is a single bisector edge") {
    PolyComplex sq(make_square());
    GeodesicEngine eng(&sq);
    Splitter sp = make_splitter(eng, {0, 2}, {4, 2}, Side::kRight);
    RestrictedVoronoi rv(&eng, sp, make_sites({{1, 1}, {3, 1}}));
    rv.check_valid();
    const VoronoiForest& f = rv.forest();
    REQUIRE(f.edges.size() == 1);
    REQUIRE(f.vertices.size() == 2);
    int deg1 = 0;
    for (const auto& v : f.vertices) {
        CHECK(v.degree == 1);
        ++deg1;
    }
    CHECK(deg1 == 2);
    bool has_top = false;
    for (const auto& v : f.vertices) {
        if (!v.on_separator) {
            CHECK(dist(v.p, {2, 4}) < 1e-6);
            has_top = true;
        }
    }
    CHECK(has_top);

    CHECK(rv.locate_nearest({1, 3}) == 0);
    CHECK(rv.locate_nearest({3, 3}) == 1);
}

TEST_CASE("three-site forest has the predicted degree-3 vertex") {
    PolyComplex sq(make_square());
    GeodesicEngine eng(&sq);
    Splitter sp = make_splitter(eng, {0, 2}, {4, 2}, Side::kRight);
    RestrictedVoronoi rv(&eng, sp, make_sites({{1, 1.99}, {3, 1.99}, {2, 1.0}}));
    rv.check_valid();
    const VoronoiForest& f = rv.forest();
    REQUIRE(f.relevant.size() == 3);
    CHECK(f.relevant[0] == 0);
    CHECK(f.relevant[1] == 2);
    CHECK(f.relevant[2] == 1);
    int deg3 = 0;
    for (const auto& v : f.vertices) {
        if (v.degree == 3) {
            ++deg3;
            CHECK(dist(v.p, {2.0, 3.9601 / 1.98}) < 1e-6);
        }
    }
    CHECK(deg3 == 1);
    CHECK(f.edges.size() == 3);

    // Subregion dispatch around the degree-3 vertex.
    Point c{2.0, 3.9601 / 1.98};
    CHECK(rv.subregion_test(c, 0, 1, {2, 3.5}) == SubregionResult::kBetween);

    CHECK(rv.locate_nearest({1.9, 2.5}) == 0);
    CHECK(rv.locate_nearest({2.1, 2.5}) == 1);
    CHECK(rv.locate_nearest({0.5, 2.2}) == 0);
}

TEST_CASE("restricted voronoi matches brute force probes") {
    // Polygon with a reflex notch above the separator so geodesics bend.
    SimplePolygon notched{
        {{0, 0}, {6, 0}, {6, 4}, {4, 4}, {3.5, 2.5}, {3, 4}, {0, 4}}, {}};
    PolyComplex cx(notched);
    GeodesicEngine eng(&cx);
    Splitter sp = make_splitter(eng, {0, 2}, {6, 2}, Side::kRight);

    std::mt19937_64 rng(2024);
    auto below = [&]() -> Point {
        while (true) {
            Point p{(rng() % 6000) / 1000.0, (rng() % 1900) / 1000.0};
            if (cx.locate(p) >= 0) return p;
        }
    };
    auto above = [&]() -> Point {
        while (true) {
            Point p{(rng() % 6000) / 1000.0, 2.0 + (rng() % 2000) / 1000.0};
            if (cx.locate(p) >= 0 &&
                eng.side_of_path(sp.path, sp.from, sp.to, p) == Side::kLeft) {
                return p;
            }
        }
    };
    for (int trial = 0; trial < 6; ++trial) {
        int n = 3 + static_cast<int>(rng() % 10);
        std::vector<Point> pts;
        for (int i = 0; i < n; ++i) pts.push_back(below());
        RestrictedVoronoi rv(&eng, sp, make_sites(pts));
        rv.check_valid();
        CHECK(rv.centroid_height() <=
              2 * std::log2(std::max<std::size_t>(2, rv.forest().vertices.size())) + 2);
        for (int probe = 0; probe < 120; ++probe) {
            Point q = above();
            int got = rv.locate_nearest(q);
            int want = rv.nearest_site_at(q);
            if (got == want) {
                CHECK(got == want);
                continue;
            }
            // Accept ties within tolerance.
            double dg = rv.site_distance(got, q);
            double dw = rv.site_distance(want, q);
            CHECK(std::abs(dg - dw) <= 1e-6);
        }
    }
}

TEST_CASE("each relevant site owns one separator interval") {
    SimplePolygon notched{
        {{0, 0}, {6, 0}, {6, 4}, {4, 4}, {3.5, 2.5}, {3, 4}, {0, 4}}, {}};
    PolyComplex cx(notched);
    GeodesicEngine eng(&cx);
    Splitter sp = make_splitter(eng, {0, 2}, {6, 2}, Side::kRight);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 4; ++trial) {
        int n = 3 + static_cast<int>(rng() % 8);
        std::vector<Point> pts;
        for (int i = 0; i < n; ++i) {
            pts.push_back({(rng() % 6000) / 1000.0, (rng() % 1900) / 1000.0});
            if (cx.locate(pts.back()) < 0) {
                pts.pop_back();
                --i;
            }
        }
        RestrictedVoronoi rv(&eng, sp, make_sites(pts));
        // Sample the separator and track the owner sequence.
        std::vector<int> owners;
        for (int s = 0; s <= 800; ++s) {
            Point x = rv.splitter().path.waypoints.front() * (1.0 - s / 800.0) +
                      rv.splitter().path.waypoints.back() * (s / 800.0);
            int o = rv.nearest_site_at(x);
            if (owners.empty() || owners.back() != o) owners.push_back(o);
        }
        // No owner appears twice (single interval each) and the sequence is S'.
        std::set<int> seen;
        for (int o : owners) {
            CHECK(!seen.count(o));
            seen.insert(o);
        }
        CHECK(owners.size() == rv.forest().relevant.size());
    }
}

TEST_CASE("forest json dump") {
    PolyComplex sq(make_square());
    GeodesicEngine eng(&sq);
    Splitter sp = make_splitter(eng, {0, 2}, {4, 2}, Side::kRight);
    RestrictedVoronoi rv(&eng, sp, make_sites({{1, 1}, {3, 1}}));
    std::string js = rv.dump_json();
    CHECK(js.find("vertices") != std::string::npos);
    CHECK(js.find("edges") != std::string::npos);
}
