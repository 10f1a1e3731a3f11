#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "geonn/geometry.hpp"

namespace geonn {

/// A simple polygon given as a counterclockwise vertex cycle. Barriers are
/// stored as zero-width slits: the base vertex is duplicated and the pair of
/// duplicate indices is recorded in `slit_pairs`, so the cycle stays
/// combinatorially simple while the two slit sides coincide geometrically.
struct SimplePolygon {
    std::vector<Point> vertices;
    std::vector<std::pair<std::size_t, std::size_t>> slit_pairs;

    std::size_t size() const { return vertices.size(); }
};

/// Validates invariants: m >= 3, finite coordinates, counterclockwise
/// orientation, simple boundary (slit sides excepted), well-formed slit pairs.
/// Throws ValidationError on failure.
void validate(const SimplePolygon& poly);

/// True if the cycle edge starting at vertex i belongs to a slit side.
bool is_slit_edge(const SimplePolygon& poly, std::size_t i);

SimplePolygon polygon_from_json(const std::string& text);
std::string polygon_to_json(const SimplePolygon& poly);

/// Convenience fixtures used across tests and docs.
SimplePolygon make_square(double side = 4.0);
SimplePolygon make_lshape();

}  // namespace geonn
