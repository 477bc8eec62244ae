#include "pocketforge/advisor.hpp"

#include "pocketforge/errors.hpp"
#include "pocketforge/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace pocketforge {

namespace {

std::string fmt(const char* pattern, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

double short_segment_ratio(const Toolpath& path, double cutoff, std::size_t* segments)
{
    std::size_t lines = 0, short_lines = 0;
    for (const Move& m : path.moves) {
        if (m.is_arc()) continue;
        ++lines;
        if (m.length() < cutoff) ++short_lines;
    }
    if (segments) *segments = lines;
    return lines ? static_cast<double>(short_lines) / static_cast<double>(lines) : 0.0;
}

bool forbidden(const AdvisorRules& rules, const StrategyParams& p, std::string* reason)
{
    for (const ForbiddenCombo& f : rules.forbidden)
        if (f.mode == p.mode && f.links == p.links) {
            if (reason) *reason = f.reason;
            return true;
        }
    return false;
}

std::string describe(const StrategyParams& p)
{
    return std::string(to_string(p.mode)) + "/" + to_string(p.links) + "/r=" + fmt("%.3g", p.corner_radius);
}

} // namespace

CornerRadius recommended_corner_radius(double v_f, const MachineParams& machine, double local_clearance, double r_min)
{
    if (!(v_f > 0.0) || !(machine.a_max > 0.0)) throw ValidationError("bad_input", "feed and a_max must be > 0");
    CornerRadius out;
    const double sustain = v_f * v_f / machine.a_max;
    out.radius = std::max(sustain, r_min);
    if (local_clearance < out.radius) {
        out.radius = std::max(0.0, local_clearance);
        out.feed_sustainable = out.radius >= sustain;
    }
    return out;
}

double longest_extent_direction(const Region& zone)
{
    if (zone.empty()) return 0.0;
    const OrientedRect rect = min_area_rect(zone);
    const Point a = rect.corner[1] - rect.corner[0];
    const Point b = rect.corner[2] - rect.corner[1];
    const Point d = norm(a) >= norm(b) ? a : b;
    double angle = std::atan2(d.y, d.x);
    if (angle < 0.0) angle += std::numbers::pi;
    if (angle >= std::numbers::pi - 1e-12) angle -= std::numbers::pi;
    // snap near-axis directions so rectangles sweep exactly along x or y
    for (double axis : {0.0, 0.5 * std::numbers::pi})
        if (std::abs(angle - axis) < 1e-9) angle = axis;
    return angle;
}

std::vector<StrategyParams> enumerate_strategies(const PocketClass& cls, const Tool& tool, const MachineParams& machine,
                                                 double v_f, const Region& zone, const AdvisorRules& rules)
{
    const EntryKind entry = cls.closure == Closure::closed ? rules.entry_closed : rules.entry_open;
    const double r_star = recommended_corner_radius(v_f, machine, std::numeric_limits<double>::infinity(), rules.r_min).radius;
    const double direction = longest_extent_direction(zone);
    std::vector<StrategyParams> out;
    for (PathMode mode : {PathMode::spiral, PathMode::zigzag})
        for (LinkStyle links : {LinkStyle::classic, LinkStyle::hsm})
            for (double radius : {0.0, r_star}) {
                StrategyParams p;
                p.mode = mode;
                p.links = links;
                p.corner_radius = radius;
                p.entry = entry;
                p.stepover = rules.stepover_ratio * tool.diameter;
                p.zigzag_direction = direction;
                p.chord_tol = rules.chord_tol;
                out.push_back(p);
            }
    return out;
}

StrategyReport rank(const Region& zone, const PocketClass& cls, const std::vector<StrategyParams>& candidates,
                    const Tool& tool, const MachineParams& machine, double v_f, double depth,
                    const AdvisorRules& rules, std::optional<Point> start_near)
{
    if (candidates.empty()) throw ValidationError("no_candidates", "at least one strategy is required");
    StrategyReport report;
    report.tool = tool;
    report.feed = v_f;
    report.discretized = rules.discretize_arcs;

    std::vector<std::optional<RankedStrategy>> results(candidates.size());
    std::vector<std::optional<CandidateFailure>> failures(candidates.size());
    parallel_for(candidates.size(), worker_threads(), [&](std::size_t i) {
        const StrategyParams& params = candidates[i];
        try {
            Toolpath path = generate_toolpath(zone, cls, tool, params, depth, v_f, start_near);
            if (rules.discretize_arcs) path = discretize_arcs(path, rules.chord_tol);
            RankedStrategy r;
            r.order = static_cast<int>(i);
            r.params = params;
            r.sim = simulate(path, machine, v_f);
            r.sim.profile.clear();
            r.sim.blocks.clear();
            r.length = path_length(path);
            r.short_ratio = short_segment_ratio(path, rules.short_segment, &r.segments);
            r.flags = path.flags;
            results[i] = std::move(r);
        } catch (const Error& e) {
            failures[i] = CandidateFailure{static_cast<int>(i), params, e.code(), e.what()};
        }
    });
    for (auto& r : results)
        if (r) report.ranked.push_back(std::move(*r));
    for (auto& f : failures)
        if (f) report.failures.push_back(std::move(*f));

    if (report.ranked.empty()) {
        std::string causes;
        for (const auto& f : report.failures)
            causes += (causes.empty() ? "" : "; ") + std::to_string(f.order) + ": " + f.message;
        throw InfeasibleError("no_strategy", "every candidate failed path generation (" + causes + ")");
    }

    std::stable_sort(report.ranked.begin(), report.ranked.end(), [](const RankedStrategy& a, const RankedStrategy& b) {
        if (a.sim.time != b.sim.time) return a.sim.time < b.sim.time;
        if (a.short_ratio != b.short_ratio) return a.short_ratio < b.short_ratio;
        return a.order < b.order;
    });

    report.rationale.push_back("ranked by simulated machining time; ties broken by short-segment share (< " +
                               fmt("%.3g", rules.short_segment) + " mm) then enumeration order");
    report.rationale.push_back(std::string("entry ") +
                               to_string(cls.closure == Closure::closed ? rules.entry_closed : rules.entry_open) +
                               " for a " + to_string(cls.closure) + " pocket");
    report.rationale.push_back(rules.discretize_arcs ? "arcs discretized at " + fmt("%.3g", rules.chord_tol) + " mm chordal tolerance"
                                                     : "arcs interpolated natively");

    report.recommended = report.ranked.front().params;
    for (const RankedStrategy& r : report.ranked) {
        std::string reason;
        if (!forbidden(rules, r.params, &reason)) {
            report.recommended = r.params;
            if (&r != &report.ranked.front())
                report.rationale.push_back("rule override: " + describe(report.ranked.front().params) +
                                           " excluded (" + reason + "), recommending " + describe(r.params));
            break;
        }
    }
    return report;
}

std::optional<Point> open_entry_hint(const Pocket& pocket)
{
    const auto runs = open_edge_runs(pocket);
    if (runs.empty()) return std::nullopt;
    const auto& run = runs.front();
    const int e = run[run.size() / 2];
    const Loop& outer = pocket.boundary.outer;
    const Point a = outer[static_cast<std::size_t>(e)];
    const Point b = outer[static_cast<std::size_t>(e + 1) % outer.size()];
    return (a + b) * 0.5;
}

Region machinable_region(const Pocket& pocket, const std::vector<Tool>& catalog, const AdvisorRules& rules)
{
    double margin = rules.guard_margin;
    if (margin <= 0.0 && !catalog.empty()) {
        margin = catalog.front().radius();
        for (const Tool& t : catalog) margin = std::min(margin, t.radius());
    }
    MaskResult mask = mask_specific_entities(pocket, margin);
    if (mask.fully_reserved) throw InfeasibleError("fully_reserved", "specific entities reserve the whole pocket");
    return std::move(mask.machinable);
}

PocketAdvice advise_pocket(const Pocket& pocket, const std::vector<Tool>& catalog, const MachineParams& machine,
                           double v_f, const AdvisorRules& rules)
{
    validate(pocket);
    if (catalog.empty()) throw ValidationError("empty_catalog", "tool catalog is empty");
    PocketAdvice advice;
    advice.pocket = pocket.name;
    advice.cls = classify_pocket(pocket);

    const Region machinable = machinable_region(pocket, catalog, rules);
    const DiameterBounds bounds = diameter_bounds(machinable, rules.chord_tol);
    advice.decomposition = dichotomy_decompose(machinable, pocket.depth, bounds, catalog);

    const std::optional<Point> hint = open_entry_hint(pocket);
    for (const ChosenTool& chosen : advice.decomposition.chosen) {
        const double feed = v_f > 0.0 ? v_f : chosen.tool.vc;
        const Region zone = opening(machinable, chosen.tool.diameter, rules.chord_tol);
        const auto candidates = enumerate_strategies(advice.cls, chosen.tool, machine, feed, zone, rules);
        advice.reports.push_back(rank(zone, advice.cls, candidates, chosen.tool, machine, feed, pocket.depth, rules, hint));
    }
    return advice;
}

std::string format_duration(double seconds)
{
    if (seconds < 60.0) return fmt("%.1f s", seconds);
    const int minutes = static_cast<int>(seconds / 60.0);
    return std::to_string(minutes) + " min " + fmt("%.1f s", seconds - 60.0 * minutes);
}

std::string report_markdown(const PocketAdvice& advice)
{
    std::ostringstream md;
    const PocketClass& c = advice.cls;
    md << "# Strategy report: " << (advice.pocket.empty() ? "pocket" : advice.pocket) << "\n\n";
    md << "Class: " << to_string(c.closure) << ", " << to_string(c.floor) << " floor, " << to_string(c.wall)
       << " walls, islands " << (c.has_islands ? "yes" : "no") << ", specific entities "
       << (c.has_specific ? "yes" : "no") << "\n\n";
    const Decomposition& d = advice.decomposition;
    md << "D0 = " << fmt("%.2f", d.bounds.d0) << " mm, Dx = " << fmt("%.2f", d.bounds.dx) << " mm; tools:";
    for (const ChosenTool& t : d.chosen) md << " " << fmt("%.4g", t.tool.diameter);
    md << "\n";

    for (const StrategyReport& r : advice.reports) {
        md << "\n## Tool " << fmt("%.4g", r.tool.diameter) << " mm, V_f " << fmt("%.1f", r.feed * 0.06) << " m/min"
           << (r.discretized ? " (arcs discretized)" : "") << "\n\n";
        std::vector<double> radii;
        for (const RankedStrategy& s : r.ranked)
            if (std::find(radii.begin(), radii.end(), s.params.corner_radius) == radii.end())
                radii.push_back(s.params.corner_radius);
        std::sort(radii.begin(), radii.end());
        md << "| mode |";
        for (double rad : radii) md << " classic r=" << fmt("%.3g", rad) << " | hsm r=" << fmt("%.3g", rad) << " |";
        md << "\n|---|";
        for (std::size_t i = 0; i < radii.size(); ++i) md << "---|---|";
        md << "\n";
        for (PathMode mode : {PathMode::spiral, PathMode::zigzag}) {
            md << "| " << to_string(mode) << " |";
            for (double rad : radii)
                for (LinkStyle link : {LinkStyle::classic, LinkStyle::hsm}) {
                    auto it = std::find_if(r.ranked.begin(), r.ranked.end(), [&](const RankedStrategy& s) {
                        return s.params.mode == mode && s.params.links == link && s.params.corner_radius == rad;
                    });
                    md << " " << (it == r.ranked.end() ? std::string("n/a") : format_duration(it->sim.time)) << " |";
                }
            md << "\n";
        }
        md << "\n| rank | strategy | time (s) | CAM time (s) | short segments |\n|---|---|---|---|---|\n";
        for (std::size_t i = 0; i < r.ranked.size(); ++i) {
            const RankedStrategy& s = r.ranked[i];
            md << "| " << i + 1 << " | " << describe(s.params) << " | " << fmt("%.3f", s.sim.time) << " | "
               << fmt("%.3f", s.sim.cam_time) << " | " << fmt("%.1f%%", 100.0 * s.short_ratio) << " |\n";
        }
        for (const CandidateFailure& f : r.failures)
            md << "\nFailed: " << describe(f.params) << ": " << f.message << "\n";
        md << "\nRecommended: " << describe(r.recommended) << "\n";
        for (const std::string& line : r.rationale) md << "- " << line << "\n";
    }
    return md.str();
}

} // namespace pocketforge
