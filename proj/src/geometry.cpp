#include "pocketforge/geometry.hpp"

#include "pocketforge/errors.hpp"

#include <clipper.hpp>

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

namespace cl = ClipperLib;

namespace pocketforge {

namespace {

// Integer grid used by the clipping engine: one unit per snap epsilon.
constexpr double kScale = 1.0 / kSnapEpsilon;
// Loops smaller than this (mm^2) are treated as degenerate offset debris.
constexpr double kDebrisArea = 1e-8;

cl::IntPoint to_int(Point p)
{
    return {static_cast<cl::cInt>(std::llround(p.x * kScale)),
            static_cast<cl::cInt>(std::llround(p.y * kScale))};
}

Point to_point(const cl::IntPoint& p)
{
    return {static_cast<double>(p.X) / kScale, static_cast<double>(p.Y) / kScale};
}

cl::Path to_path(const Loop& loop)
{
    cl::Path path;
    path.reserve(loop.size());
    for (const Point& p : loop) {
        cl::IntPoint ip = to_int(p);
        if (path.empty() || path.back() != ip) path.push_back(ip);
    }
    while (path.size() > 1 && path.front() == path.back()) path.pop_back();
    return path;
}

Loop to_loop(const cl::Path& path)
{
    Loop loop;
    loop.reserve(path.size());
    for (const cl::IntPoint& ip : path) loop.push_back(to_point(ip));
    return loop;
}

void orient(Loop& loop, bool ccw)
{
    if ((signed_area(loop) > 0.0) != ccw) std::reverse(loop.begin(), loop.end());
}

cl::Paths to_paths(const Region& region)
{
    cl::Paths paths;
    for (const PolygonWithHoles& part : region.parts) {
        Loop outer = part.outer;
        orient(outer, true);
        paths.push_back(to_path(outer));
        for (const Loop& h : part.holes) {
            Loop hole = h;
            orient(hole, false);
            paths.push_back(to_path(hole));
        }
    }
    paths.erase(std::remove_if(paths.begin(), paths.end(),
                               [](const cl::Path& p) { return p.size() < 3; }),
                paths.end());
    return paths;
}

void collect_outer(const cl::PolyNode* node, Region& out)
{
    Loop outer = to_loop(node->Contour);
    if (outer.size() >= 3 && std::abs(signed_area(outer)) > kDebrisArea) {
        orient(outer, true);
        PolygonWithHoles part;
        part.outer = std::move(outer);
        for (const cl::PolyNode* hole : node->Childs) {
            Loop h = to_loop(hole->Contour);
            if (h.size() >= 3 && std::abs(signed_area(h)) > kDebrisArea) {
                orient(h, false);
                part.holes.push_back(std::move(h));
            }
        }
        out.parts.push_back(std::move(part));
    }
    for (const cl::PolyNode* hole : node->Childs)
        for (const cl::PolyNode* island : hole->Childs) collect_outer(island, out);
}

Region from_tree(const cl::PolyTree& tree)
{
    Region out;
    for (const cl::PolyNode* node : tree.Childs) collect_outer(node, out);
    return out;
}

Region boolean(const Region& a, const Region& b, cl::ClipType type)
{
    cl::Clipper clipper;
    clipper.AddPaths(to_paths(a), cl::ptSubject, true);
    clipper.AddPaths(to_paths(b), cl::ptClip, true);
    cl::PolyTree tree;
    clipper.Execute(type, tree, cl::pftNonZero, cl::pftNonZero);
    return from_tree(tree);
}

enum class Side { outside, inside, boundary };

double segment_distance(Point p, Point a, Point b)
{
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, a + ab * t);
}

Side locate(const Loop& loop, Point p)
{
    const std::size_t n = loop.size();
    int winding = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = loop[i];
        const Point b = loop[(i + 1) % n];
        if (segment_distance(p, a, b) <= kSnapEpsilon) return Side::boundary;
        if (a.y <= p.y) {
            if (b.y > p.y && cross(b - a, p - a) > 0.0) ++winding;
        } else if (b.y <= p.y && cross(b - a, p - a) < 0.0) {
            --winding;
        }
    }
    return winding != 0 ? Side::inside : Side::outside;
}

int orientation(Point a, Point b, Point c)
{
    const double v = cross(b - a, c - a);
    const double scale = std::max({std::abs(b.x - a.x), std::abs(b.y - a.y), std::abs(c.x - a.x),
                                   std::abs(c.y - a.y), 1.0});
    if (std::abs(v) <= 1e-12 * scale * scale) return 0;
    return v > 0.0 ? 1 : -1;
}

bool on_segment(Point a, Point b, Point p)
{
    return std::min(a.x, b.x) - kSnapEpsilon <= p.x && p.x <= std::max(a.x, b.x) + kSnapEpsilon &&
           std::min(a.y, b.y) - kSnapEpsilon <= p.y && p.y <= std::max(a.y, b.y) + kSnapEpsilon;
}

bool segments_intersect(Point a, Point b, Point c, Point d)
{
    const int o1 = orientation(a, b, c);
    const int o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a);
    const int o4 = orientation(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

bool loop_is_simple(const Loop& loop)
{
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = loop[i], b = loop[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            // adjacent edges share a vertex by construction
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_intersect(a, b, loop[j], loop[(j + 1) % n])) return false;
        }
    }
    return true;
}

bool loops_cross(const Loop& p, const Loop& q)
{
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j)
            if (segments_intersect(p[i], p[(i + 1) % p.size()], q[j], q[(j + 1) % q.size()]))
                return true;
    return false;
}

std::string where(std::size_t part, std::size_t loop)
{
    return "part " + std::to_string(part) + " loop " + std::to_string(loop) +
           (loop == 0 ? " (outer)" : " (hole " + std::to_string(loop - 1) + ")");
}

void check_loop(const Loop& loop, std::size_t part, std::size_t index)
{
    if (loop.size() < 3)
        throw ValidationError("degenerate_loop", "fewer than 3 vertices in " + where(part, index));
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Point p = loop[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw ValidationError("degenerate_loop", "non-finite vertex in " + where(part, index));
        if (distance(p, loop[(i + 1) % loop.size()]) < kSnapEpsilon)
            throw ValidationError("degenerate_loop",
                                  "duplicate consecutive vertex " + std::to_string(i) + " in " +
                                      where(part, index));
    }
    if (std::abs(signed_area(loop)) <= kDebrisArea)
        throw ValidationError("degenerate_loop", "zero area in " + where(part, index));
}

Point centroid(const Loop& loop)
{
    double a = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Point p = loop[i], q = loop[(i + 1) % loop.size()];
        const double c = cross(p, q);
        a += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    if (std::abs(a) < 1e-300) return loop.front();
    return {cx / (3.0 * a), cy / (3.0 * a)};
}

void rdp(const Loop& pts, std::size_t first, std::size_t last, double tol, std::vector<bool>& keep)
{
    if (last <= first + 1) return;
    double best = -1.0;
    std::size_t index = first;
    for (std::size_t i = first + 1; i < last; ++i) {
        const double d = segment_distance(pts[i], pts[first], pts[last]);
        if (d > best) {
            best = d;
            index = i;
        }
    }
    if (best > tol) {
        keep[index] = true;
        rdp(pts, first, index, tol, keep);
        rdp(pts, index, last, tol, keep);
    }
}

} // namespace

double signed_area(const Loop& loop)
{
    double a = 0.0;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) a += cross(loop[i], loop[(i + 1) % n]);
    return 0.5 * a;
}

double loop_length(const Loop& loop)
{
    double len = 0.0;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) len += distance(loop[i], loop[(i + 1) % n]);
    return len;
}

double area(const PolygonWithHoles& poly)
{
    double a = std::abs(signed_area(poly.outer));
    for (const Loop& h : poly.holes) a -= std::abs(signed_area(h));
    return a;
}

double area(const Region& region)
{
    double a = 0.0;
    for (const auto& part : region.parts) a += area(part);
    return a;
}

bool contains(const Loop& loop, Point p) { return locate(loop, p) != Side::outside; }

bool contains(const PolygonWithHoles& poly, Point p)
{
    if (locate(poly.outer, p) == Side::outside) return false;
    for (const Loop& h : poly.holes)
        if (locate(h, p) == Side::inside) return false;
    return true;
}

bool contains(const Region& region, Point p)
{
    return std::any_of(region.parts.begin(), region.parts.end(),
                       [&](const PolygonWithHoles& part) { return contains(part, p); });
}

double distance_to_boundary(const Region& region, Point p)
{
    double best = std::numeric_limits<double>::infinity();
    auto scan = [&](const Loop& loop) {
        for (std::size_t i = 0; i < loop.size(); ++i)
            best = std::min(best, segment_distance(p, loop[i], loop[(i + 1) % loop.size()]));
    };
    for (const auto& part : region.parts) {
        scan(part.outer);
        for (const Loop& h : part.holes) scan(h);
    }
    return best;
}

BoundingBox bounding_box(const Loop& loop)
{
    BoundingBox box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity()};
    for (const Point& p : loop) {
        box.min_x = std::min(box.min_x, p.x);
        box.min_y = std::min(box.min_y, p.y);
        box.max_x = std::max(box.max_x, p.x);
        box.max_y = std::max(box.max_y, p.y);
    }
    return box;
}

BoundingBox bounding_box(const Region& region)
{
    if (region.empty()) return {};
    BoundingBox box = bounding_box(region.parts.front().outer);
    for (const auto& part : region.parts) {
        const BoundingBox b = bounding_box(part.outer);
        box.min_x = std::min(box.min_x, b.min_x);
        box.min_y = std::min(box.min_y, b.min_y);
        box.max_x = std::max(box.max_x, b.max_x);
        box.max_y = std::max(box.max_y, b.max_y);
    }
    return box;
}

void validate(const Region& region)
{
    for (std::size_t p = 0; p < region.parts.size(); ++p) {
        const PolygonWithHoles& part = region.parts[p];
        check_loop(part.outer, p, 0);
        if (signed_area(part.outer) <= 0.0)
            throw ValidationError("orientation", "outer loop must be counter-clockwise in " + where(p, 0));
        if (!loop_is_simple(part.outer))
            throw ValidationError("self_intersection", "self-intersecting " + where(p, 0));
        for (std::size_t h = 0; h < part.holes.size(); ++h) {
            const Loop& hole = part.holes[h];
            check_loop(hole, p, h + 1);
            if (signed_area(hole) >= 0.0)
                throw ValidationError("orientation", "hole must be clockwise in " + where(p, h + 1));
            if (!loop_is_simple(hole))
                throw ValidationError("self_intersection", "self-intersecting " + where(p, h + 1));
            if (loops_cross(part.outer, hole) || locate(part.outer, hole.front()) != Side::inside)
                throw ValidationError("hole_outside", "hole not strictly inside outer in " + where(p, h + 1));
            for (std::size_t k = 0; k < h; ++k) {
                const Loop& other = part.holes[k];
                if (loops_cross(hole, other) || locate(other, hole.front()) != Side::outside ||
                    locate(hole, other.front()) != Side::outside)
                    throw ValidationError("hole_overlap", "holes overlap in " + where(p, h + 1));
            }
        }
    }
    for (std::size_t p = 0; p < region.parts.size(); ++p)
        for (std::size_t q = 0; q < p; ++q) {
            Region a{{region.parts[p]}}, b{{region.parts[q]}};
            if (area(region_intersection(a, b)) > kDebrisArea)
                throw ValidationError("part_overlap",
                                      "parts " + std::to_string(q) + " and " + std::to_string(p) + " overlap");
        }
}

Region normalize(const Region& region)
{
    cl::Clipper clipper;
    clipper.AddPaths(to_paths(region), cl::ptSubject, true);
    cl::PolyTree tree;
    clipper.Execute(cl::ctUnion, tree, cl::pftNonZero, cl::pftNonZero);
    return from_tree(tree);
}

Region make_rectangle(double x0, double y0, double x1, double y1)
{
    return make_region({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

Loop make_regular_polygon(Point center, double circumradius, int sides, double phase)
{
    Loop loop;
    loop.reserve(static_cast<std::size_t>(sides));
    for (int i = 0; i < sides; ++i) {
        const double a = phase + 2.0 * std::numbers::pi * i / sides;
        loop.push_back({center.x + circumradius * std::cos(a), center.y + circumradius * std::sin(a)});
    }
    return loop;
}

Region make_region(Loop outer, std::vector<Loop> holes)
{
    orient(outer, true);
    for (Loop& h : holes) orient(h, false);
    return Region{{PolygonWithHoles{std::move(outer), std::move(holes)}}};
}

Region region_union(const Region& a, const Region& b) { return boolean(a, b, cl::ctUnion); }

Region region_union(const std::vector<Region>& regions)
{
    cl::Clipper clipper;
    for (const Region& r : regions) clipper.AddPaths(to_paths(r), cl::ptSubject, true);
    cl::PolyTree tree;
    clipper.Execute(cl::ctUnion, tree, cl::pftNonZero, cl::pftNonZero);
    return from_tree(tree);
}

Region region_difference(const Region& a, const Region& b) { return boolean(a, b, cl::ctDifference); }

Region region_intersection(const Region& a, const Region& b)
{
    return boolean(a, b, cl::ctIntersection);
}

double symmetric_difference_area(const Region& a, const Region& b)
{
    return area(region_difference(a, b)) + area(region_difference(b, a));
}

Region offset_region(const Region& region, double delta, double tol)
{
    if (!(tol > 0.0)) throw ValidationError("bad_tolerance", "offset tolerance must be positive");
    for (std::size_t p = 0; p < region.parts.size(); ++p) {
        check_loop(region.parts[p].outer, p, 0);
        for (std::size_t h = 0; h < region.parts[p].holes.size(); ++h)
            check_loop(region.parts[p].holes[h], p, h + 1);
    }
    if (region.empty()) return {};
    if (delta == 0.0) return normalize(region);

    cl::ClipperOffset offsetter(2.0, tol * kScale);
    offsetter.AddPaths(to_paths(region), cl::jtRound, cl::etClosedPolygon);
    cl::PolyTree tree;
    offsetter.Execute(tree, delta * kScale);
    return from_tree(tree);
}

Region opening(const Region& region, double diameter, double tol)
{
    if (diameter < 0.0) throw ValidationError("bad_diameter", "opening diameter must be >= 0");
    if (diameter == 0.0) return normalize(region);
    // erode slightly less so slots exactly one diameter wide survive; the
    // final intersection keeps the result inside the region
    const double slack = 0.5 * tol;
    const Region eroded = offset_region(region, -std::max(0.0, 0.5 * diameter - slack), tol);
    if (eroded.empty()) return {};
    return region_intersection(offset_region(eroded, 0.5 * diameter, tol), region);
}

double max_inscribed_radius(const Region& region, double tol)
{
    if (region.empty()) throw ValidationError("empty_region", "inscribed radius of an empty region");
    double hi = 0.0;
    for (const auto& part : region.parts) {
        const BoundingBox b = bounding_box(part.outer);
        hi = std::max(hi, 0.5 * std::min(b.width(), b.height()));
    }
    double lo = 0.0;
    const double step_tol = 0.5 * tol;
    while (hi - lo > step_tol) {
        const double mid = 0.5 * (lo + hi);
        if (offset_region(region, -mid, step_tol).empty())
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

InscribedDisk deepest_point(const Region& region, double tol)
{
    const double r = max_inscribed_radius(region, tol);
    double back_off = std::max(tol, 1e-3);
    for (int attempt = 0; attempt < 30; ++attempt) {
        const double depth = std::max(0.0, r - back_off);
        const Region core = depth > 0.0 ? offset_region(region, -depth, 0.5 * tol) : region;
        if (!core.empty()) {
            const auto largest = std::max_element(
                core.parts.begin(), core.parts.end(),
                [](const auto& a, const auto& b) { return area(a) < area(b); });
            Point c = centroid(largest->outer);
            if (!contains(*largest, c)) c = largest->outer.front();
            return {c, r};
        }
        back_off *= 2.0;
    }
    return {region.parts.front().outer.front(), 0.0};
}

RegionMetrics region_metrics(const Region& region)
{
    RegionMetrics m;
    for (const auto& part : region.parts) {
        m.area += area(part);
        m.perimeter += loop_length(part.outer);
        for (const Loop& h : part.holes) m.perimeter += loop_length(h);
    }
    m.component_count = static_cast<int>(region.parts.size());
    return m;
}

std::vector<Region> components(const Region& region)
{
    std::vector<Region> out;
    out.reserve(region.parts.size());
    for (const auto& part : region.parts) out.push_back(Region{{part}});
    return out;
}

std::vector<Point> convex_hull(std::vector<Point> pts)
{
    std::sort(pts.begin(), pts.end(),
              [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const Point& p : pts) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        const Point p = pts[i];
        while (k >= t && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

OrientedRect min_area_rect(const Region& region)
{
    std::vector<Point> pts;
    for (const auto& part : region.parts) pts.insert(pts.end(), part.outer.begin(), part.outer.end());
    const std::vector<Point> hull = convex_hull(std::move(pts));
    OrientedRect best;
    best.area = std::numeric_limits<double>::infinity();
    if (hull.size() < 3) return best;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point u = normalized(hull[(i + 1) % hull.size()] - hull[i]);
        const Point v = perp(u);
        double min_u = std::numeric_limits<double>::infinity(), max_u = -min_u;
        double min_v = min_u, max_v = -min_u;
        for (const Point& p : hull) {
            min_u = std::min(min_u, dot(p, u));
            max_u = std::max(max_u, dot(p, u));
            min_v = std::min(min_v, dot(p, v));
            max_v = std::max(max_v, dot(p, v));
        }
        const double a = (max_u - min_u) * (max_v - min_v);
        if (a < best.area - 1e-12) {
            best.area = a;
            best.corner = {u * min_u + v * min_v, u * max_u + v * min_v, u * max_u + v * max_v,
                           u * min_u + v * max_v};
        }
    }
    return best;
}

Loop simplify_loop(const Loop& loop, double tolerance)
{
    if (loop.size() <= 3) return loop;
    // anchor at vertex 0 and the vertex farthest from it
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 1; i < loop.size(); ++i) {
        const double d = distance(loop[0], loop[i]);
        if (d > far_d) {
            far_d = d;
            far = i;
        }
    }
    Loop ring(loop);
    ring.push_back(loop.front());
    std::vector<bool> keep(ring.size(), false);
    keep[0] = keep[far] = keep[ring.size() - 1] = true;
    rdp(ring, 0, far, tolerance, keep);
    rdp(ring, far, ring.size() - 1, tolerance, keep);
    Loop out;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i)
        if (keep[i]) out.push_back(ring[i]);
    if (out.size() < 3) return loop;
    return out;
}

} // namespace pocketforge
