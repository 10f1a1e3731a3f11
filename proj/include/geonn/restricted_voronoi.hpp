#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geonn/engine.hpp"

namespace geonn {

/// Geodesic separator splitting the polygon into the site side and the query
/// side. The path runs from `from` to `to`; `sites_side` says which side of
/// that oriented path contains the sites.
struct Splitter {
    BoundaryAnchor from;
    BoundaryAnchor to;
    GeodesicPath path;
    Side sites_side = Side::kLeft;
};

struct VoronoiVertex {
    Point p;
    std::vector<int> sites;  // owning site indices; 2 for degree-1, 3 for degree-3
    int degree = 1;
    bool on_separator = false;  // degree-1 endpoint on lambda vs on the boundary arc
};

struct VoronoiEdge {
    int sa = -1, sb = -1;  // unordered site pair
    int va = -1, vb = -1;  // endpoint vertex indices
};

/// Combinatorial restricted Voronoi diagram: degree-1 and degree-3 vertices
/// plus topology; degree-2 bends are not stored.
struct VoronoiForest {
    std::vector<VoronoiVertex> vertices;
    std::vector<VoronoiEdge> edges;
    std::vector<int> relevant;      // S' as site indices, ordered along lambda
    std::vector<Point> breakpoints;  // crossing of consecutive S' bisectors
};

struct SiteSet {
    std::vector<Point> points;
    std::vector<int> ids;  // global identities used for tie-breaking
};

enum class SubregionResult { kBeyondFirst, kBetween, kBeyondSecond };

/// Voronoi diagram of sites on one side of a geodesic separator, restricted to
/// the other side, with nearest-site point location through a centroid
/// decomposition of the stitched forest.
class RestrictedVoronoi {
public:
    RestrictedVoronoi(const GeodesicEngine* eng, Splitter splitter, SiteSet sites);

    const VoronoiForest& forest() const { return forest_; }
    const Splitter& splitter() const { return splitter_; }
    const SiteSet& sites() const { return sites_; }
    int centroid_height() const { return centroid_height_; }

    /// Nearest site (by global id) for q on the restricted side.
    int locate_nearest(const Point& q) const;

    /// Point on lambda equidistant to sites a and b (indices into the site
    /// set), or nullopt when the bisector misses lambda.
    std::optional<Point> bisector_crossing(int a, int b) const;

    /// Geodesic distance from site index i to a point.
    double site_distance(int i, const Point& x) const;

    /// Nearest site index at x by direct evaluation (Euclidean pruning).
    int nearest_site_at(const Point& x) const;

    /// Which of the three subregions around vertex c (with bounding paths
    /// toward sites sa and sb) contains q. Exposed for tests.
    SubregionResult subregion_test(const Point& c, int sa, int sb, const Point& q) const;

    std::string dump_json() const;

    /// Structural validation: degrees, equidistance, forest/leaf identities.
    void check_valid() const;

private:
    struct DecompNode {
        int center = -1;                 // vertex index in the stitched tree
        std::vector<int> edge_ids;       // base case: remaining edges
        std::vector<int> children;       // decomposition children
        std::vector<int> child_via;      // stitched-tree edge into each child
        bool leaf = false;
    };

    // Stitched tree F*: forest edges plus stitching edges along the arc.
    struct StitchEdge {
        int va, vb;
        int forest_edge = -1;  // -1 for stitching edges
    };

    void compute_relevant();
    void build_forest();
    void build_locator();
    int trace_edge(int sa, int sb, int origin_vertex, Point start, Point dir);
    Point project_to_bisector(int sa, int sb, const Point& guess, double window,
                              double max_window) const;
    Point lambda_point(double s) const;
    int find_or_add_deg3(const Point& p, int s1, int s2, int s3);
    int build_decomposition(std::vector<int> vertex_set);
    int locate_rec(int node, const Point& q, int depth) const;
    int best_of(const std::vector<int>& site_indices, const Point& q) const;

    const GeodesicEngine* eng_;
    Splitter splitter_;
    SiteSet sites_;
    VoronoiForest forest_;
    std::vector<double> lambda_prefix_;
    double lambda_len_ = 0.0;
    double scale_ = 1.0;

    std::vector<StitchEdge> tree_edges_;              // F* edges
    std::vector<std::vector<int>> tree_adj_;          // vertex -> F* edge ids
    std::vector<DecompNode> decomp_;
    int decomp_root_ = -1;
    int centroid_height_ = 0;
};

/// Standalone forms of the module operations (thin wrappers for tests).
std::optional<Point> bisector_crossing(const GeodesicEngine& eng, const Point& a, const Point& b,
                                       const Splitter& splitter);

}  // namespace geonn
