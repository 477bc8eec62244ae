#pragma once

#include "pocketforge/geometry.hpp"
#include "pocketforge/pocket.hpp"
#include "pocketforge/tool.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pocketforge {

enum class MoveKind { line, arc_cw, arc_ccw };
enum class MoveIntent { cut, entry, link, exit };

struct Move {
    MoveKind kind = MoveKind::line;
    Point start;
    Point end;
    Point center; // arcs only
    MoveIntent intent = MoveIntent::cut;

    bool is_arc() const { return kind != MoveKind::line; }
    double radius() const;
    /// Swept angle in (0, 2*pi]; coincident endpoints mean a full turn.
    double sweep() const;
    double length() const;
    Point start_tangent() const;
    Point end_tangent() const;

    friend bool operator==(const Move&, const Move&) = default;
};

Move line_move(Point a, Point b, MoveIntent intent = MoveIntent::cut);
Move arc_move(Point a, Point b, Point center, bool ccw, MoveIntent intent = MoveIntent::cut);

struct Toolpath {
    std::vector<Move> moves;
    Tool tool;
    double feed = 0.0; // programmed feed V_f, mm/s
    /// Straight axial plunge depth executed before the first move (axial tools).
    double axial_plunge = 0.0;
    /// Non-fatal generation notes, e.g. an HSM link that fell back to classic.
    std::vector<std::string> flags;

    friend bool operator==(const Toolpath&, const Toolpath&) = default;
};

enum class PathMode { spiral, zigzag };
enum class LinkStyle { classic, hsm };
enum class EntryKind { tangential_flank, spiral_plunge };

struct StrategyParams {
    PathMode mode = PathMode::spiral;
    double stepover = 5.0;         // mm
    double zigzag_direction = 0.0; // radians
    LinkStyle links = LinkStyle::classic;
    double corner_radius = 0.0;    // mm, 0 disables cornerization
    EntryKind entry = EntryKind::spiral_plunge;
    double chord_tol = kDefaultTolerance;

    friend bool operator==(const StrategyParams&, const StrategyParams&) = default;
};

struct PathLength {
    double total = 0.0;
    double cut = 0.0;
};

/// Contour-parallel passes at stepover spacing. Closed-pocket strategies
/// (spiral_plunge entry) run inside-out and finish on the wall ring; flank
/// entries run outside-in starting on the ring nearest `start_near`.
Toolpath spiral_path(const Region& zone, const Tool& tool, const StrategyParams& params,
                     std::optional<Point> start_near = std::nullopt);

/// Back-and-forth passes along params.zigzag_direction followed by a
/// finishing contour on the tool-centre boundary.
Toolpath zigzag_path(const Region& zone, const Tool& tool, const StrategyParams& params,
                     std::optional<Point> start_near = std::nullopt);

/// Replaces corners between consecutive line cut moves by tangent arcs of
/// radius min(r, largest radius that fits both legs).
Toolpath cornerize(const Toolpath& path, double r);

/// Rewrites link moves. `hsm` blends them into tangent arcs: a semicircle
/// between antiparallel passes, a biarc otherwise. When `centre_region` is
/// given, blends leaving it fall back to straight links and are flagged.
Toolpath hsm_links(const Toolpath& path, LinkStyle style, double stepover,
                   const Region* centre_region = nullptr);

/// Entry moves placed before the first cut of `body`: a quarter-circle
/// flank entry for open pockets, a helical plunge for closed ones.
std::vector<Move> entry_path(const Region& zone, const PocketClass& cls, const Tool& tool,
                             const StrategyParams& params, const Toolpath& body, double depth);

/// Replaces runs of at least `min_segments` cut lines whose vertices lie
/// within `tol` of a common circle by a single arc.
Toolpath fit_arcs(const Toolpath& path, double tol, std::size_t min_segments = 3);

/// Replaces every arc with its minimal chord chain of sagitta <= chord_tol.
Toolpath discretize_arcs(const Toolpath& path, double chord_tol);

PathLength path_length(const Toolpath& path);

/// Line-move length counts. With edges e0 < ... < ek the bins are
/// [0,e0), [e0,e1), ..., [ek,inf).
std::vector<std::size_t> segment_histogram(const Toolpath& path, const std::vector<double>& bin_edges);

/// Largest distance between the end of one move and the start of the next.
double max_continuity_gap(const Toolpath& path);

/// Full strategy path for one zone: body, cornerization and entry.
Toolpath generate_toolpath(const Region& zone, const PocketClass& cls, const Tool& tool,
                           const StrategyParams& params, double depth, double feed,
                           std::optional<Point> start_near = std::nullopt);

const char* to_string(MoveKind k);
const char* to_string(MoveIntent i);
const char* to_string(PathMode m);
const char* to_string(LinkStyle l);
const char* to_string(EntryKind e);

} // namespace pocketforge
