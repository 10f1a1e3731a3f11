#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace geonn {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
    friend Point operator+(const Point& a, const Point& b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(const Point& a, const Point& b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(const Point& a, double s) { return {a.x * s, a.y * s}; }
};

inline double dot(const Point& a, const Point& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point& a, const Point& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point& a) { return std::hypot(a.x, a.y); }
inline double dist(const Point& a, const Point& b) { return norm(b - a); }
inline Point perp(const Point& a) { return {-a.y, a.x}; }

inline bool is_finite(const Point& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Global comparison tolerance for distances. Topology is decided exactly.
inline constexpr double kEpsDist = 1e-9;
// Equidistance tolerance for Voronoi vertices.
inline constexpr double kEpsVoronoi = 1e-7;

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class OutOfDomainError : public std::runtime_error {
public:
    explicit OutOfDomainError(const std::string& what) : std::runtime_error(what) {}
};

class DegeneracyError : public std::runtime_error {
public:
    explicit DegeneracyError(const std::string& what) : std::runtime_error(what) {}
};

/// Exact sign of the orientation determinant: +1 if c is strictly left of the
/// directed line a->b, -1 if strictly right, 0 if collinear. A floating-point
/// filter handles the common case; an exact expansion evaluation decides the
/// rest, so the sign is always correct for representable inputs.
int orient(const Point& a, const Point& b, const Point& c);

/// Does q lie on the closed segment [a,b]? Exact.
bool on_segment(const Point& a, const Point& b, const Point& q);

enum class SegX { kNone, kProper, kTouch, kOverlap };

/// Classify the intersection of closed segments [a,b] and [c,d].
/// kProper: single interior crossing; kTouch: single shared point involving an
/// endpoint; kOverlap: collinear with a shared sub-segment.
SegX segment_intersect(const Point& a, const Point& b, const Point& c, const Point& d);

/// Intersection point of two properly crossing segments (inexact coordinates).
Point segment_cross_point(const Point& a, const Point& b, const Point& c, const Point& d);

/// Distance from q to the closed segment [a,b].
double point_segment_dist(const Point& a, const Point& b, const Point& q);

/// Distance from q to a polyline.
double point_polyline_dist(const std::vector<Point>& chain, const Point& q);

/// Winding number of the closed polygon `loop` around q. q must not lie on the
/// loop. Degenerate loops with coincident opposite edges (slits) cancel out.
int winding_number(const std::vector<Point>& loop, const Point& q);

/// Signed area of a closed polygon (positive = counterclockwise).
double signed_area(const std::vector<Point>& poly);

}  // namespace geonn
