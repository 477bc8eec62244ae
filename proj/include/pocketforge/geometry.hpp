#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace pocketforge {

/// Planar point or vector in millimetres, y up.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
    friend Point operator*(double s, Point a) { return {a.x * s, a.y * s}; }
    friend bool operator==(const Point&, const Point&) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline Point perp(Point a) { return {-a.y, a.x}; }
inline Point normalized(Point a)
{
    const double n = norm(a);
    return n > 0.0 ? Point{a.x / n, a.y / n} : Point{};
}

/// Closed vertex loop; the closing edge from back() to front() is implicit.
using Loop = std::vector<Point>;

struct PolygonWithHoles {
    Loop outer;              // counter-clockwise
    std::vector<Loop> holes; // clockwise, strictly inside outer

    friend bool operator==(const PolygonWithHoles&, const PolygonWithHoles&) = default;
};

/// Set of pairwise disjoint polygons with holes. Empty parts means empty set.
struct Region {
    std::vector<PolygonWithHoles> parts;

    bool empty() const { return parts.empty(); }
    friend bool operator==(const Region&, const Region&) = default;
};

struct BoundingBox {
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
};

struct RegionMetrics {
    double area = 0.0;
    double perimeter = 0.0;
    int component_count = 0;
};

/// Oriented rectangle: corner[0..3] counter-clockwise.
struct OrientedRect {
    std::array<Point, 4> corner{};
    double area = 0.0;
};

struct InscribedDisk {
    Point center;
    double radius = 0.0;
};

/// Vertex snapping distance used for deduplication and boolean robustness.
inline constexpr double kSnapEpsilon = 1e-6;
/// Default chordal tolerance for flattened arcs.
inline constexpr double kDefaultTolerance = 0.01;

// Loop primitives
double signed_area(const Loop& loop);
double loop_length(const Loop& loop);
double area(const PolygonWithHoles& poly);
double area(const Region& region);

/// Winding-number point containment. Points on the boundary count as inside.
bool contains(const Loop& loop, Point p);
bool contains(const PolygonWithHoles& poly, Point p);
bool contains(const Region& region, Point p);

/// Unsigned distance from p to the nearest boundary edge of the region.
double distance_to_boundary(const Region& region, Point p);

BoundingBox bounding_box(const Region& region);
BoundingBox bounding_box(const Loop& loop);

/// Throws ValidationError naming the offending part and loop.
void validate(const Region& region);

/// Removes snapped duplicates and fixes orientation (outer CCW, holes CW).
/// Overlapping parts are merged under the nonzero rule.
Region normalize(const Region& region);

Region make_rectangle(double x0, double y0, double x1, double y1);
/// Regular n-gon with the given circumradius, first vertex on +x.
Loop make_regular_polygon(Point center, double circumradius, int sides, double phase = 0.0);
Region make_region(Loop outer, std::vector<Loop> holes = {});

// Booleans (nonzero fill)
Region region_union(const Region& a, const Region& b);
Region region_union(const std::vector<Region>& regions);
Region region_difference(const Region& a, const Region& b);
Region region_intersection(const Region& a, const Region& b);
/// Area of the symmetric difference.
double symmetric_difference_area(const Region& a, const Region& b);

/// Minkowski offset by a disk of radius |delta| (outward for delta > 0),
/// junction arcs flattened with chordal deviation <= tol.
Region offset_region(const Region& region, double delta, double tol = kDefaultTolerance);

/// Morphological opening by a disk of the given diameter: the set swept by
/// a disk of that diameter that stays inside the region.
Region opening(const Region& region, double diameter, double tol = kDefaultTolerance);

/// Radius of the largest disk contained in the region, absolute error <= tol.
double max_inscribed_radius(const Region& region, double tol = kDefaultTolerance);

/// Centre and radius of (approximately) the largest inscribed disk.
InscribedDisk deepest_point(const Region& region, double tol = kDefaultTolerance);

RegionMetrics region_metrics(const Region& region);

/// Splits a region into one Region per connected part.
std::vector<Region> components(const Region& region);

std::vector<Point> convex_hull(std::vector<Point> points);
OrientedRect min_area_rect(const Region& region);

/// Ramer-Douglas-Peucker simplification of a closed loop.
Loop simplify_loop(const Loop& loop, double tolerance);

} // namespace pocketforge
