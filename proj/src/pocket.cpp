#include "pocketforge/pocket.hpp"

#include "pocketforge/errors.hpp"

#include <algorithm>
#include <set>

namespace pocketforge {

namespace {

double point_line_distance(Point p, Point a, Point b)
{
    const Point d = normalized(b - a);
    return std::abs(cross(d, p - a));
}

// Side k of the rectangle runs from corner[k] to corner[k+1].
int rect_side_of_edge(const OrientedRect& rect, Point a, Point b, double tol)
{
    for (int k = 0; k < 4; ++k) {
        const Point c0 = rect.corner[static_cast<std::size_t>(k)];
        const Point c1 = rect.corner[static_cast<std::size_t>((k + 1) % 4)];
        if (point_line_distance(a, c0, c1) <= tol && point_line_distance(b, c0, c1) <= tol) return k;
    }
    return -1;
}

} // namespace

const char* to_string(Closure c)
{
    switch (c) {
    case Closure::closed: return "closed";
    case Closure::open: return "open";
    case Closure::corner: return "corner";
    }
    return "closed";
}

const char* to_string(FloorKind f) { return f == FloorKind::flat ? "flat" : "complex"; }
const char* to_string(WallKind w) { return w == WallKind::perpendicular ? "perpendicular" : "drafted"; }

const char* to_string(EntityKind k)
{
    switch (k) {
    case EntityKind::thin_wall: return "thin_wall";
    case EntityKind::haut_d_aile: return "haut_d_aile";
    case EntityKind::raidisseur: return "raidisseur";
    }
    return "thin_wall";
}

void validate(const Pocket& pocket)
{
    validate(Region{{pocket.boundary}});
    if (!(pocket.depth > 0.0)) throw ValidationError("bad_depth", "pocket depth must be > 0");
    if (pocket.islands.size() != pocket.boundary.holes.size())
        throw ValidationError("island_mismatch", "island attributes must match boundary holes one-to-one");
    const int edges = static_cast<int>(pocket.boundary.outer.size());
    for (int e : pocket.open_edges)
        if (e < 0 || e >= edges)
            throw ValidationError("bad_open_edge", "open edge index " + std::to_string(e) + " out of range");
    for (std::size_t i = 0; i < pocket.islands.size(); ++i) {
        const IslandInfo& isl = pocket.islands[i];
        if (isl.depth && !(*isl.depth > 0.0))
            throw ValidationError("bad_depth", "island " + std::to_string(i) + " depth must be > 0");
    }
    for (std::size_t i = 0; i < pocket.entities.size(); ++i) {
        const SpecificEntity& ent = pocket.entities[i];
        if (ent.guard_margin && *ent.guard_margin < 0.0)
            throw ValidationError("bad_margin", "entity " + std::to_string(i) + " guard margin must be >= 0");
        validate(ent.footprint);
        if (area(region_intersection(ent.footprint, Region{{pocket.boundary}})) <= 0.0)
            throw ValidationError("entity_outside",
                                  "entity " + std::to_string(i) + " footprint does not meet the pocket");
    }
}

Region pocket_area(const Pocket& pocket) { return normalize(Region{{pocket.boundary}}); }

std::vector<std::vector<int>> open_edge_runs(const Pocket& pocket)
{
    const int n = static_cast<int>(pocket.boundary.outer.size());
    std::set<int> open(pocket.open_edges.begin(), pocket.open_edges.end());
    std::vector<std::vector<int>> runs;
    if (open.empty()) return runs;
    if (static_cast<int>(open.size()) == n) {
        runs.emplace_back(open.begin(), open.end());
        return runs;
    }
    // start just after a closed edge so no run wraps past index 0
    int start = 0;
    while (open.count(start)) ++start;
    std::vector<int> current;
    for (int k = 1; k <= n; ++k) {
        const int e = (start + k) % n;
        if (open.count(e)) {
            current.push_back(e);
        } else if (!current.empty()) {
            runs.push_back(current);
            current.clear();
        }
    }
    if (!current.empty()) runs.push_back(current);
    return runs;
}

PocketClass classify_pocket(const Pocket& pocket)
{
    PocketClass cls;
    cls.floor = pocket.floor;
    cls.wall = pocket.wall;
    cls.has_islands = !pocket.boundary.holes.empty();
    cls.has_specific = !pocket.entities.empty();

    const auto runs = open_edge_runs(pocket);
    if (runs.empty()) {
        cls.closure = Closure::closed;
        return cls;
    }
    cls.closure = Closure::open;
    if (runs.size() != 1) return cls;

    const Loop& outer = pocket.boundary.outer;
    const OrientedRect rect = min_area_rect(Region{{pocket.boundary}});
    const double diag = distance(rect.corner[0], rect.corner[2]);
    const double tol = 1e-3 + 1e-6 * diag;
    std::set<int> sides;
    for (int e : runs.front()) {
        const Point a = outer[static_cast<std::size_t>(e)];
        const Point b = outer[static_cast<std::size_t>(e + 1) % outer.size()];
        const int side = rect_side_of_edge(rect, a, b, tol);
        if (side >= 0) sides.insert(side);
    }
    if (sides.size() == 2) {
        const int s0 = *sides.begin(), s1 = *sides.rbegin();
        if (s1 - s0 == 1 || (s0 == 0 && s1 == 3)) cls.closure = Closure::corner;
    }
    return cls;
}

Promotion promote_negative_islands(const Pocket& pocket)
{
    Promotion out;
    out.parent = pocket;
    out.parent.boundary.holes.clear();
    out.parent.islands.clear();
    for (std::size_t i = 0; i < pocket.boundary.holes.size(); ++i) {
        const IslandInfo& info = pocket.islands.at(i);
        const Loop& hole = pocket.boundary.holes[i];
        if (!info.negative) {
            out.parent.boundary.holes.push_back(hole);
            out.parent.islands.push_back(info);
            continue;
        }
        if (info.extends_below_floor && !info.depth)
            throw ValidationError("negative_island_depth",
                                  "negative island " + std::to_string(i) +
                                      " extends below the parent floor but has no explicit depth");
        Pocket child;
        child.name = pocket.name + ".island" + std::to_string(i);
        child.boundary.outer = Loop(hole.rbegin(), hole.rend());
        child.depth = info.depth.value_or(pocket.depth);
        child.floor = pocket.floor;
        child.wall = pocket.wall;
        out.promoted.push_back(std::move(child));
    }
    return out;
}

MaskResult mask_specific_entities(const Pocket& pocket, double default_margin)
{
    MaskResult out;
    const Region material = pocket_area(pocket);
    if (pocket.entities.empty()) {
        out.machinable = material;
        return out;
    }
    std::vector<Region> guards;
    for (const SpecificEntity& ent : pocket.entities) {
        const double margin = ent.guard_margin.value_or(default_margin);
        guards.push_back(margin > 0.0 ? offset_region(ent.footprint, margin) : normalize(ent.footprint));
    }
    out.reserved = region_intersection(region_union(guards), material);
    out.machinable = region_difference(material, out.reserved);
    out.fully_reserved = out.machinable.empty();
    return out;
}

} // namespace pocketforge
