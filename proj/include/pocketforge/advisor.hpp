#pragma once

#include "pocketforge/kinematics.hpp"
#include "pocketforge/pocket.hpp"
#include "pocketforge/tool_selection.hpp"
#include "pocketforge/toolpath.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace pocketforge {

struct ForbiddenCombo {
    PathMode mode = PathMode::spiral;
    LinkStyle links = LinkStyle::classic;
    std::string reason;

    friend bool operator==(const ForbiddenCombo&, const ForbiddenCombo&) = default;
};

/// Process rules; loaded from a JSON rule file so shop practice can override them.
struct AdvisorRules {
    EntryKind entry_closed = EntryKind::spiral_plunge;
    EntryKind entry_open = EntryKind::tangential_flank;
    double stepover_ratio = 0.5;
    double r_min = 0.5;                // mm
    double short_segment = 2.0;        // mm
    bool discretize_arcs = false;
    double chord_tol = kDefaultTolerance;
    double guard_margin = 0.0;         // mm, 0 = smallest catalog tool radius
    std::vector<ForbiddenCombo> forbidden;

    friend bool operator==(const AdvisorRules&, const AdvisorRules&) = default;
};

struct CornerRadius {
    double radius = 0.0;
    bool feed_sustainable = true;
};

/// r* = max(V_f^2 / a_max, r_min), clipped to the local clearance.
CornerRadius recommended_corner_radius(double v_f, const MachineParams& machine,
                                       double local_clearance = std::numeric_limits<double>::infinity(),
                                       double r_min = 0.5);

/// Angle in [0, pi) of the long side of the zone's minimum-area rectangle.
double longest_extent_direction(const Region& zone);

/// mode x links x corner radius {0, r*}; entry fixed by closure.
std::vector<StrategyParams> enumerate_strategies(const PocketClass& cls, const Tool& tool, const MachineParams& machine,
                                                 double v_f, const Region& zone, const AdvisorRules& rules = {});

struct RankedStrategy {
    int order = 0; // enumeration index
    StrategyParams params;
    SimResult sim; // profile and block plans are dropped
    double short_ratio = 0.0;
    std::size_t segments = 0;
    PathLength length;
    std::vector<std::string> flags;
};

struct CandidateFailure {
    int order = 0;
    StrategyParams params;
    std::string code;
    std::string message;
};

struct StrategyReport {
    Tool tool;
    double feed = 0.0;
    bool discretized = false;
    std::vector<RankedStrategy> ranked;
    std::vector<CandidateFailure> failures;
    StrategyParams recommended;
    std::vector<std::string> rationale;
};

StrategyReport rank(const Region& zone, const PocketClass& cls, const std::vector<StrategyParams>& candidates,
                    const Tool& tool, const MachineParams& machine, double v_f, double depth,
                    const AdvisorRules& rules = {}, std::optional<Point> start_near = std::nullopt);

/// Midpoint of the middle edge of the first open-edge run.
std::optional<Point> open_entry_hint(const Pocket& pocket);

struct PocketAdvice {
    std::string pocket;
    PocketClass cls;
    Decomposition decomposition;
    std::vector<StrategyReport> reports; // one per chosen tool
};

/// Pocket area minus guarded specific entities. A non-positive rule margin
/// uses the smallest catalog tool radius.
Region machinable_region(const Pocket& pocket, const std::vector<Tool>& catalog, const AdvisorRules& rules = {});

/// Full chain: mask, bounds, decomposition, then strategy ranking on each
/// chosen tool's accessible zone. `v_f` <= 0 uses each tool's capable feed.
PocketAdvice advise_pocket(const Pocket& pocket, const std::vector<Tool>& catalog, const MachineParams& machine,
                           double v_f, const AdvisorRules& rules = {});

/// Markdown summary with a mode x link-style time matrix per tool.
std::string report_markdown(const PocketAdvice& advice);

/// "1 min 43.4 s" style.
std::string format_duration(double seconds);

} // namespace pocketforge
