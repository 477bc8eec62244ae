#pragma once

#include "pocketforge/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pocketforge {

enum class FloorKind { flat, complex };
enum class WallKind { perpendicular, drafted };
enum class Closure { closed, open, corner };
enum class EntityKind { thin_wall, haut_d_aile, raidisseur };

/// Per-hole attributes. Every hole of a pocket boundary is an island.
struct IslandInfo {
    bool negative = false;
    /// Depth of a promoted negative island; inherits the parent depth when absent.
    std::optional<double> depth;
    /// The depression continues below the parent floor, so its depth cannot be inherited.
    bool extends_below_floor = false;

    friend bool operator==(const IslandInfo&, const IslandInfo&) = default;
};

struct SpecificEntity {
    EntityKind kind = EntityKind::thin_wall;
    Region footprint;
    /// Unmachined guard band around the footprint; catalog default when absent.
    std::optional<double> guard_margin;

    friend bool operator==(const SpecificEntity&, const SpecificEntity&) = default;
};

struct Pocket {
    std::string name;
    PolygonWithHoles boundary;       // top-plane contour
    std::vector<IslandInfo> islands; // parallel to boundary.holes
    std::vector<int> open_edges;     // indices into boundary.outer edges (i -> i+1)
    double depth = 0.0;
    FloorKind floor = FloorKind::flat;
    WallKind wall = WallKind::perpendicular;
    std::vector<SpecificEntity> entities;

    friend bool operator==(const Pocket&, const Pocket&) = default;
};

struct PocketClass {
    Closure closure = Closure::closed;
    FloorKind floor = FloorKind::flat;
    WallKind wall = WallKind::perpendicular;
    bool has_islands = false;
    bool has_specific = false;

    friend bool operator==(const PocketClass&, const PocketClass&) = default;
};

struct Promotion {
    Pocket parent;
    std::vector<Pocket> promoted;
};

struct MaskResult {
    Region machinable;
    Region reserved;
    /// Set when the guard zones swallow the whole pocket.
    bool fully_reserved = false;
};

void validate(const Pocket& pocket);

/// Material area of the pocket: outer contour minus islands.
Region pocket_area(const Pocket& pocket);

/// Maximal runs of cyclically consecutive open edges, each sorted along the loop.
std::vector<std::vector<int>> open_edge_runs(const Pocket& pocket);

PocketClass classify_pocket(const Pocket& pocket);

Promotion promote_negative_islands(const Pocket& pocket);

MaskResult mask_specific_entities(const Pocket& pocket, double default_margin = 0.0);

const char* to_string(Closure c);
const char* to_string(FloorKind f);
const char* to_string(WallKind w);
const char* to_string(EntityKind k);

} // namespace pocketforge
