#include "geonn/polygon.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace geonn {

namespace {

bool in_cyclic_interval(std::size_t k, std::size_t i, std::size_t j, std::size_t n) {
    // k in [i, j) walking forward from i.
    std::size_t span = (j + n - i) % n;
    std::size_t off = (k + n - i) % n;
    return off < span;
}

}  // namespace

bool is_slit_edge(const SimplePolygon& poly, std::size_t i) {
    std::size_t n = poly.size();
    for (const auto& [a, b] : poly.slit_pairs) {
        if (in_cyclic_interval(i, a, b, n)) return true;
    }
    return false;
}

void validate(const SimplePolygon& poly) {
    std::size_t n = poly.size();
    if (n < 3) throw ValidationError("polygon needs at least 3 vertices");
    for (const Point& p : poly.vertices) {
        if (!is_finite(p)) throw ValidationError("polygon vertex is not finite");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (poly.vertices[i] == poly.vertices[(i + 1) % n]) {
            throw ValidationError("zero-length polygon edge at index " + std::to_string(i));
        }
    }
    if (signed_area(poly.vertices) <= 0.0) {
        throw ValidationError("polygon must be counterclockwise with positive area");
    }
    for (const auto& [a, b] : poly.slit_pairs) {
        if (a >= n || b >= n) throw ValidationError("slit pair index out of range");
        if (!(poly.vertices[a] == poly.vertices[b])) {
            throw ValidationError("slit pair vertices must coincide");
        }
    }

    // Points that are legitimately shared by several boundary edges.
    auto duplicated = [&](const Point& p) {
        for (const auto& [a, b] : poly.slit_pairs) {
            if (poly.vertices[a] == p) return true;
        }
        return false;
    };

    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = poly.vertices[i];
        const Point& b = poly.vertices[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point& c = poly.vertices[j];
            const Point& d = poly.vertices[(j + 1) % n];
            bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            SegX x = segment_intersect(a, b, c, d);
            if (x == SegX::kNone) continue;
            bool both_slit = is_slit_edge(poly, i) && is_slit_edge(poly, j);
            if (adjacent) {
                if (x == SegX::kOverlap && !both_slit) {
                    throw ValidationError("adjacent edges overlap at index " + std::to_string(i));
                }
                continue;
            }
            if (x == SegX::kProper) {
                throw ValidationError("non-adjacent edges cross near index " + std::to_string(i));
            }
            if (x == SegX::kOverlap) {
                if (!both_slit) {
                    throw ValidationError("non-slit edges overlap near index " + std::to_string(i));
                }
                continue;
            }
            // Touching: only allowed at a slit-duplicated coordinate.
            bool ok = false;
            for (const Point* p : {&a, &b}) {
                if ((*p == c || *p == d) && duplicated(*p)) ok = true;
            }
            if (both_slit) ok = true;
            if (!ok) {
                throw ValidationError("non-adjacent edges touch near index " + std::to_string(i));
            }
        }
    }
}

SimplePolygon polygon_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.contains("polygon")) j = j["polygon"];
    SimplePolygon poly;
    for (const auto& v : j.at("vertices")) {
        poly.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    }
    if (j.contains("slits")) {
        for (const auto& s : j["slits"]) {
            poly.slit_pairs.emplace_back(s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>());
        }
    }
    return poly;
}

std::string polygon_to_json(const SimplePolygon& poly) {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (const Point& p : poly.vertices) j["vertices"].push_back({p.x, p.y});
    j["slits"] = nlohmann::json::array();
    for (const auto& [a, b] : poly.slit_pairs) j["slits"].push_back({a, b});
    return j.dump();
}

SimplePolygon make_square(double side) {
    return SimplePolygon{{{0, 0}, {side, 0}, {side, side}, {0, side}}, {}};
}

SimplePolygon make_lshape() {
    return SimplePolygon{{{0, 0}, {4, 0}, {4, 2}, {2, 2}, {2, 4}, {0, 4}}, {}};
}

}  // namespace geonn
