#include "pocketforge/tool_selection.hpp"

#include "pocketforge/errors.hpp"
#include "pocketforge/parallel.hpp"
#include "pocketforge/toolpath.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <thread>

namespace pocketforge {

namespace {

// Bisection resolution for D0, also the slack used when snapping to the catalog.
constexpr double kDiameterResolution = 0.1;

bool reachable_without_retract(const Region& machinable, std::size_t pieces, double d, double tol)
{
    const Region eroded = offset_region(machinable, -0.5 * d, tol);
    return !eroded.empty() && eroded.parts.size() <= pieces;
}

bool catalog_has_diameter_in(const std::vector<Tool>& catalog, double lo, double hi)
{
    return std::any_of(catalog.begin(), catalog.end(), [&](const Tool& t) {
        return t.diameter > lo + kSnapEpsilon && t.diameter <= hi + kDiameterResolution;
    });
}

} // namespace

unsigned worker_threads()
{
    if (const char* env = std::getenv("POCKETFORGE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

double removal_time(double length, const Tool& tool)
{
    if (length < 0.0) throw ValidationError("bad_length", "path length must be >= 0");
    if (!(tool.vc > 0.0)) throw ValidationError("bad_tool", "tool capable feed must be > 0");
    return length / tool.vc;
}

double mrr(double volume, double time)
{
    if (time > 0.0) return volume / time;
    if (volume > 0.0) throw ValidationError("zero_time", "material removal rate with zero time");
    return 0.0;
}

DiameterBounds diameter_bounds(const Region& machinable, double tol)
{
    if (machinable.empty()) throw ValidationError("empty_region", "diameter bounds of an empty region");
    DiameterBounds b;
    b.dx = 2.0 * max_inscribed_radius(machinable, tol);
    const std::size_t pieces = machinable.parts.size();
    const double step = 0.5 * kDiameterResolution;
    if (reachable_without_retract(machinable, pieces, std::max(0.0, b.dx - step), tol)) {
        b.d0 = b.dx;
        return b;
    }
    double lo = 0.0, hi = b.dx;
    while (hi - lo > step) {
        const double mid = 0.5 * (lo + hi);
        if (reachable_without_retract(machinable, pieces, mid, tol))
            lo = mid;
        else
            hi = mid;
    }
    b.d0 = std::max(lo, 0.5 * (lo + hi));
    if (!(b.d0 > 0.0)) b.d0 = std::min(b.dx, step);
    return b;
}

std::optional<Tool> snap_to_catalog(const std::vector<Tool>& catalog, double d)
{
    std::optional<Tool> best;
    for (const Tool& t : catalog)
        if (t.diameter <= d + kDiameterResolution && (!best || t.diameter > best->diameter)) best = t;
    return best;
}

double catalog_granularity(const std::vector<Tool>& catalog)
{
    std::vector<double> ds;
    for (const Tool& t : catalog) ds.push_back(t.diameter);
    std::sort(ds.begin(), ds.end());
    double gap = 0.0;
    for (std::size_t i = 1; i < ds.size(); ++i) {
        const double g = ds[i] - ds[i - 1];
        if (g > kSnapEpsilon && (gap == 0.0 || g < gap)) gap = g;
    }
    return gap > 0.0 ? gap : 1.0;
}

DecompositionStep evaluate_diameter(const Region& machinable, double depth, double d, const Tool& tool,
                                    const DecomposeOptions& opts)
{
    DecompositionStep step;
    step.diameter = d;
    step.tool = tool;
    step.zone = opening(machinable, d, opts.tol);
    // virtual cutter of the candidate diameter, fed at the catalog tool's capability
    Tool virtual_tool = tool;
    virtual_tool.diameter = d;
    StrategyParams params;
    params.mode = PathMode::spiral;
    params.stepover = opts.stepover_ratio * d;
    params.chord_tol = opts.tol;
    const Toolpath path = spiral_path(step.zone, virtual_tool, params);
    step.length = path_length(path).total;
    step.time = removal_time(step.length, tool);
    step.volume = area(step.zone) * depth;
    step.mrr = mrr(step.volume, step.time);
    return step;
}

std::vector<ZoneAssignment> assign_zones(const Region& machinable, const std::vector<double>& diameters,
                                         Region* residual, double tol)
{
    std::vector<ZoneAssignment> out;
    Region assigned;
    for (double d : diameters) {
        ZoneAssignment z;
        z.diameter = d;
        z.zone = region_difference(opening(machinable, d, tol), assigned);
        assigned = region_union(assigned, z.zone);
        out.push_back(std::move(z));
    }
    if (residual) *residual = region_difference(machinable, assigned);
    return out;
}

Decomposition dichotomy_decompose(const Region& machinable, double depth, const DiameterBounds& bounds,
                                  const std::vector<Tool>& catalog, const DecomposeOptions& opts)
{
    if (catalog.empty()) throw ValidationError("empty_catalog", "tool catalog is empty");
    if (!(bounds.d0 > 0.0) || bounds.d0 > bounds.dx + kSnapEpsilon)
        throw ValidationError("bad_bounds", "diameter bounds must satisfy 0 < D0 <= Dx");
    if (!(depth > 0.0)) throw ValidationError("bad_depth", "depth must be > 0");
    if (!snap_to_catalog(catalog, bounds.dx))
        throw InfeasibleError("no_insertable_tool", "no catalog tool fits the pocket (Dx = " +
                                                        std::to_string(bounds.dx) + " mm)");

    const double min_interval = opts.min_interval > 0.0 ? opts.min_interval : catalog_granularity(catalog);
    const unsigned threads = opts.threads > 0 ? opts.threads : worker_threads();

    Decomposition out;
    out.bounds = bounds;
    std::map<double, DecompositionStep> evaluated;
    auto evaluate_all = [&](std::vector<double> ds) {
        std::sort(ds.begin(), ds.end());
        ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
        std::erase_if(ds, [&](double d) { return evaluated.count(d) > 0; });
        std::vector<std::optional<DecompositionStep>> results(ds.size());
        parallel_for(ds.size(), threads, [&](std::size_t i) {
            const auto tool = snap_to_catalog(catalog, ds[i]);
            if (tool) results[i] = evaluate_diameter(machinable, depth, ds[i], *tool, opts);
        });
        for (std::size_t i = 0; i < ds.size(); ++i)
            if (results[i]) evaluated.emplace(ds[i], std::move(*results[i]));
    };

    // D0 may lie below the smallest tool; the smallest insertable tool then stands in
    double d0 = bounds.d0;
    if (!snap_to_catalog(catalog, d0)) {
        double smallest = bounds.dx;
        for (const Tool& t : catalog) smallest = std::min(smallest, t.diameter);
        d0 = smallest;
    }
    std::vector<double> retained{d0};

    struct Interval {
        double lo, hi;
    };
    std::vector<Interval> level{{d0, bounds.dx}};
    for (int iteration = 1; !level.empty(); ++iteration) {
        std::vector<Interval> active;
        for (const Interval& iv : level)
            if (iv.hi - iv.lo >= min_interval && catalog_has_diameter_in(catalog, iv.lo, iv.hi))
                active.push_back(iv);
        std::vector<double> needed;
        for (const Interval& iv : active) {
            needed.push_back(iv.lo);
            needed.push_back(0.5 * (iv.lo + iv.hi));
        }
        evaluate_all(needed);

        std::vector<Interval> next;
        for (const Interval& iv : active) {
            const double mid = 0.5 * (iv.lo + iv.hi);
            const auto lo_it = evaluated.find(iv.lo);
            const auto mid_it = evaluated.find(mid);
            IntervalDecision dec;
            dec.iteration = iteration;
            dec.lo = iv.lo;
            dec.mid = mid;
            dec.hi = iv.hi;
            if (lo_it != evaluated.end() && mid_it != evaluated.end()) {
                dec.mrr_lo = lo_it->second.mrr;
                dec.mrr_mid = mid_it->second.mrr;
                dec.ratio = dec.mrr_lo > 0.0 ? dec.mrr_mid / dec.mrr_lo : 0.0;
                dec.kept_upper = dec.ratio > 1.0 + opts.threshold;
            }
            out.decisions.push_back(dec);
            next.push_back({iv.lo, mid});
            if (dec.kept_upper) {
                retained.push_back(mid);
                next.push_back({mid, iv.hi});
            }
        }
        level = std::move(next);
    }

    for (auto& [d, step] : evaluated) out.steps.push_back(step);

    // snap retained diameters to catalog tools, largest first, without duplicates
    std::vector<Tool> tools;
    for (double d : retained)
        if (auto t = snap_to_catalog(catalog, d)) tools.push_back(*t);
    std::sort(tools.begin(), tools.end(), [](const Tool& a, const Tool& b) { return a.diameter > b.diameter; });
    tools.erase(std::unique(tools.begin(), tools.end(),
                            [](const Tool& a, const Tool& b) { return std::abs(a.diameter - b.diameter) < kSnapEpsilon; }),
                tools.end());
    std::vector<double> diameters;
    for (const Tool& t : tools) diameters.push_back(t.diameter);
    const auto zones = assign_zones(machinable, diameters, &out.residual, opts.tol);
    for (std::size_t i = 0; i < tools.size(); ++i) out.chosen.push_back({tools[i], zones[i].zone});
    return out;
}

} // namespace pocketforge
