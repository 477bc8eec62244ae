#pragma once

#include "pocketforge/geometry.hpp"
#include "pocketforge/tool.hpp"

#include <optional>
#include <vector>

namespace pocketforge {

struct DiameterBounds {
    double d0 = 0.0; // capable diameter
    double dx = 0.0; // maximal insertable diameter
};

/// One evaluated candidate diameter.
struct DecompositionStep {
    double diameter = 0.0;
    Tool tool;     // catalog tool whose capable feed is used
    Region zone;   // opening of the machinable region by `diameter`
    double length = 0.0; // L_i, mm
    double time = 0.0;   // T_i, s
    double volume = 0.0; // mm^3
    double mrr = 0.0;    // mm^3/s
};

/// Branch decision on one interval [lo, hi] split at mid.
struct IntervalDecision {
    int iteration = 0;
    double lo = 0.0;
    double mid = 0.0;
    double hi = 0.0;
    double mrr_lo = 0.0;
    double mrr_mid = 0.0;
    double ratio = 0.0;
    bool kept_upper = false;
};

struct ChosenTool {
    Tool tool;
    Region zone;
};

struct Decomposition {
    DiameterBounds bounds;
    std::vector<DecompositionStep> steps;       // ascending diameter
    std::vector<IntervalDecision> decisions;    // in evaluation order
    std::vector<ChosenTool> chosen;             // descending diameter
    Region residual;                            // machinable area no chosen tool reaches
};

struct DecomposeOptions {
    double threshold = 0.05;
    /// Intervals narrower than this stop; <= 0 means the catalog granularity.
    double min_interval = 0.0;
    /// Stepover of the evaluation paths as a fraction of the diameter.
    double stepover_ratio = 0.5;
    double tol = kDefaultTolerance;
    /// Worker threads for candidate evaluation; 0 reads POCKETFORGE_THREADS.
    unsigned threads = 0;
};

double removal_time(double length, const Tool& tool);
double mrr(double volume, double time);

/// Dx = twice the inscribed radius; D0 = largest diameter whose erosion is
/// non-empty and splits into no more pieces than the region itself.
DiameterBounds diameter_bounds(const Region& machinable, double tol = kDefaultTolerance);

/// Largest catalog tool with diameter <= d (within snap epsilon).
std::optional<Tool> snap_to_catalog(const std::vector<Tool>& catalog, double d);

/// Smallest positive gap between distinct catalog diameters.
double catalog_granularity(const std::vector<Tool>& catalog);

DecompositionStep evaluate_diameter(const Region& machinable, double depth, double d, const Tool& tool,
                                    const DecomposeOptions& opts);

Decomposition dichotomy_decompose(const Region& machinable, double depth, const DiameterBounds& bounds,
                                  const std::vector<Tool>& catalog, const DecomposeOptions& opts = {});

struct ZoneAssignment {
    double diameter = 0.0;
    Region zone;
};

/// Largest tool first; each zone is its opening minus the zones already
/// assigned. `residual` receives what no tool reaches.
std::vector<ZoneAssignment> assign_zones(const Region& machinable, const std::vector<double>& diameters,
                                         Region* residual = nullptr, double tol = kDefaultTolerance);

} // namespace pocketforge
