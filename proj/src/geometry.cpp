#include "geonn/geometry.hpp"

#include <algorithm>
#include <limits>

namespace geonn {

namespace {

// Error bound for the orientation filter (Shewchuk). The exact fallback uses
// floating-point expansions built from two_sum/two_product identities.
constexpr double kEps = 1.1102230246251565e-16;  // 2^-53
constexpr double kCcwErrBound = (3.0 + 16.0 * kEps) * kEps;

struct TwoDouble {
    double hi, lo;
};

inline TwoDouble two_sum(double a, double b) {
    double s = a + b;
    double bv = s - a;
    double av = s - bv;
    double err = (a - av) + (b - bv);
    return {s, err};
}

inline TwoDouble two_product(double a, double b) {
    double p = a * b;
    double e = std::fma(a, b, -p);
    return {p, e};
}

// Expansion: array of doubles, increasing magnitude, nonoverlapping.
using Expansion = std::vector<double>;

Expansion grow(const Expansion& e, double b) {
    Expansion h;
    h.reserve(e.size() + 1);
    double q = b;
    for (double ei : e) {
        TwoDouble t = two_sum(q, ei);
        if (t.lo != 0.0) h.push_back(t.lo);
        q = t.hi;
    }
    h.push_back(q);
    return h;
}

Expansion add(const Expansion& e, const TwoDouble& t) {
    Expansion h = grow(e, t.lo);
    return grow(h, t.hi);
}

int sign_of(const Expansion& e) {
    double top = e.empty() ? 0.0 : e.back();
    if (top > 0.0) return 1;
    if (top < 0.0) return -1;
    return 0;
}

int orient_exact(const Point& a, const Point& b, const Point& c) {
    // det = ax*by - ax*cy - ay*bx + ay*cx + bx*cy - by*cx
    Expansion e;
    auto sub = [](TwoDouble t) { return TwoDouble{-t.hi, -t.lo}; };
    e = add(e, two_product(a.x, b.y));
    e = add(e, sub(two_product(a.x, c.y)));
    e = add(e, sub(two_product(a.y, b.x)));
    e = add(e, two_product(a.y, c.x));
    e = add(e, two_product(b.x, c.y));
    e = add(e, sub(two_product(b.y, c.x)));
    return sign_of(e);
}

}  // namespace

int orient(const Point& a, const Point& b, const Point& c) {
    double detleft = (a.x - c.x) * (b.y - c.y);
    double detright = (a.y - c.y) * (b.x - c.x);
    double det = detleft - detright;
    double detsum;
    if (detleft > 0.0) {
        if (detright <= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
        detsum = detleft + detright;
    } else if (detleft < 0.0) {
        if (detright >= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
        detsum = -detleft - detright;
    } else {
        return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    }
    double errbound = kCcwErrBound * detsum;
    if (det > errbound || -det > errbound) return det > 0.0 ? 1 : -1;
    return orient_exact(a, b, c);
}

bool on_segment(const Point& a, const Point& b, const Point& q) {
    if (orient(a, b, q) != 0) return false;
    if (a.x != b.x) {
        return (std::min(a.x, b.x) <= q.x) && (q.x <= std::max(a.x, b.x));
    }
    return (std::min(a.y, b.y) <= q.y) && (q.y <= std::max(a.y, b.y));
}

SegX segment_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
    int o1 = orient(a, b, c);
    int o2 = orient(a, b, d);
    int o3 = orient(c, d, a);
    int o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return SegX::kProper;
    if (o1 == 0 && o2 == 0) {
        // Collinear: overlap test on the dominant axis.
        bool use_x = std::abs(a.x - b.x) >= std::abs(a.y - b.y);
        double a1 = use_x ? std::min(a.x, b.x) : std::min(a.y, b.y);
        double a2 = use_x ? std::max(a.x, b.x) : std::max(a.y, b.y);
        double b1 = use_x ? std::min(c.x, d.x) : std::min(c.y, d.y);
        double b2 = use_x ? std::max(c.x, d.x) : std::max(c.y, d.y);
        if (a2 < b1 || b2 < a1) return SegX::kNone;
        if (a2 == b1 || b2 == a1) return SegX::kTouch;
        return SegX::kOverlap;
    }
    bool touches = (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) ||
                   (o3 == 0 && on_segment(c, d, a)) || (o4 == 0 && on_segment(c, d, b));
    if (touches && o1 != o2 && o3 != o4) return SegX::kTouch;
    if (touches) return SegX::kTouch;
    if (o1 != o2 && o3 != o4) return SegX::kProper;
    return SegX::kNone;
}

Point segment_cross_point(const Point& a, const Point& b, const Point& c, const Point& d) {
    double denom = cross(b - a, d - c);
    if (denom == 0.0) return a;
    double t = cross(c - a, d - c) / denom;
    t = std::clamp(t, 0.0, 1.0);
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

double point_segment_dist(const Point& a, const Point& b, const Point& q) {
    Point ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 == 0.0) return dist(a, q);
    double t = std::clamp(dot(q - a, ab) / len2, 0.0, 1.0);
    Point proj{a.x + t * ab.x, a.y + t * ab.y};
    return dist(proj, q);
}

double point_polyline_dist(const std::vector<Point>& chain, const Point& q) {
    if (chain.empty()) return std::numeric_limits<double>::infinity();
    if (chain.size() == 1) return dist(chain[0], q);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        best = std::min(best, point_segment_dist(chain[i], chain[i + 1], q));
    }
    return best;
}

int winding_number(const std::vector<Point>& loop, const Point& q) {
    int wn = 0;
    std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p1 = loop[i];
        const Point& p2 = loop[(i + 1) % n];
        if (p1.y <= q.y) {
            if (p2.y > q.y && orient(p1, p2, q) > 0) ++wn;
        } else {
            if (p2.y <= q.y && orient(p1, p2, q) < 0) --wn;
        }
    }
    return wn;
}

double signed_area(const std::vector<Point>& poly) {
    double area2 = 0.0;
    std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = poly[i];
        const Point& r = poly[(i + 1) % n];
        area2 += cross(p, r);
    }
    return 0.5 * area2;
}

}  // namespace geonn
