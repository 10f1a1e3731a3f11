#include <random>

#include "doctest.h"
#include "geonn/geometry.hpp"

using namespace geonn;

TEST_CASE("orient basics") {
    CHECK(orient({0, 0}, {1, 0}, {0, 1}) == 1);
    CHECK(orient({0, 0}, {1, 0}, {2, 0}) == 0);
    CHECK(orient({0, 0}, {0, 1}, {1, 1}) == -1);
}

TEST_CASE("orient antisymmetry and translation invariance") {
    std::mt19937_64 rng(42);
    auto rnd = [&] { return (rng() % 2000001) * 1e-3 - 1000.0; };
    for (int i = 0; i < 2000; ++i) {
        Point a{rnd(), rnd()}, b{rnd(), rnd()}, c{rnd(), rnd()};
        CHECK(orient(a, b, c) == -orient(a, c, b));
        CHECK(orient(a, b, c) == orient(b, c, a));
        Point d{rnd(), rnd()};
        CHECK(orient(a, b, c) == orient(a + d, b + d, c + d));
    }
}

TEST_CASE("orient exactness near collinear") {
    // Grid of tiny perturbations around a collinear triple; the sign must be
    // consistent with the exact rational determinant.
    Point a{0.5, 0.5}, b{12.0, 12.0};
    for (int i = -8; i <= 8; ++i) {
        for (int j = -8; j <= 8; ++j) {
            Point c{24.0 + i * 1e-17, 24.0 + j * 1e-17};
            long double det = (long double)(a.x - c.x) * (b.y - c.y) -
                              (long double)(a.y - c.y) * (b.x - c.x);
            int expect = det > 0 ? 1 : (det < 0 ? -1 : 0);
            CHECK(orient(a, b, c) == expect);
        }
    }
}

TEST_CASE("segment predicates") {
    CHECK(on_segment({0, 0}, {4, 0}, {2, 0}));
    CHECK(!on_segment({0, 0}, {4, 0}, {5, 0}));
    CHECK(segment_intersect({0, 0}, {4, 4}, {0, 4}, {4, 0}) == SegX::kProper);
    CHECK(segment_intersect({0, 0}, {1, 1}, {2, 2}, {3, 3}) == SegX::kNone);
    CHECK(segment_intersect({0, 0}, {2, 2}, {2, 2}, {3, 0}) == SegX::kTouch);
    CHECK(segment_intersect({0, 0}, {2, 0}, {1, 0}, {3, 0}) == SegX::kOverlap);
}

TEST_CASE("winding cancels across a slit") {
    // Square boundary with a zero-width slit traversed up and back down.
    std::vector<Point> loop{{0, 0}, {2, 0}, {2, 3}, {2, 0}, {4, 0}, {4, 4}, {0, 4}};
    CHECK(winding_number(loop, {1, 1}) != 0);
    CHECK(winding_number(loop, {3, 1}) != 0);
    CHECK(winding_number(loop, {5, 5}) == 0);
    CHECK(signed_area(loop) == doctest::Approx(16.0));
}
