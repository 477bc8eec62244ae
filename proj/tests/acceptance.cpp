// Acceptance run: one PASS/FAIL line per criterion. Exits 0 once every
// criterion has been evaluated; --strict turns any FAIL into exit status 1.

#include "pocketforge/advisor.hpp"
#include "pocketforge/io.hpp"

#include "support/corpus.hpp"
#include "support/raster.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

using namespace pocketforge;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kRatioTol = 0.02;
constexpr double kFormulaRel = 1e-9;
constexpr double kBoundaryRel = 1e-6;
constexpr double kGapRatio = 1.5;
constexpr double kOracleAreaFrac = 0.01;
constexpr double kClosedFormTol = 1e-4;
constexpr double kCoverage = 0.99;
constexpr double kContinuity = 1e-6;
constexpr double kBudgetAc1 = 10.0;
constexpr double kBudgetAc3 = 30.0;
constexpr double kBudgetAc5 = 60.0;

const fs::path kData = POCKETFORGE_DATA_DIR;

struct Criterion {
    std::string id;
    std::string title;
    bool ok = true;
    std::vector<std::string> notes;

    void check(bool cond, const std::string& what)
    {
        ok = ok && cond;
        notes.push_back(std::string(cond ? "ok   " : "FAIL ") + what);
    }
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

bool rel_eq(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)); }

Tool tool(double d, double vc) { return {d, 2, vc, PlungeStyle::helical}; }

MachineParams legacy(double a_max = 1000.0)
{
    MachineParams m;
    m.a_max = a_max;
    m.block_time = 0.012;
    m.lookahead = 50;
    m.corner_dv = 20.0;
    m.mode = AccelMode::brisk;
    return m;
}

PocketClass closed() { return {Closure::closed, FloorKind::flat, WallKind::perpendicular, false, false}; }

constexpr double kVf = 10000.0 / 60.0;

double oracle_mrr(const Region& machinable, double depth, double d, double vc)
{
    const auto g = raster::frame(machinable, 0.05, 1.0);
    const double volume = raster::opening(raster::rasterize(machinable, g), d).area() * depth;
    StrategyParams p;
    p.stepover = 0.5 * d;
    const double length = path_length(spiral_path(opening(machinable, d), tool(d, vc), p)).total;
    return volume / (length / vc);
}

const DecompositionStep* step_for(const Decomposition& d, double diameter)
{
    for (const auto& s : d.steps)
        if (s.diameter == diameter) return &s;
    return nullptr;
}

void ac1(Criterion& c)
{
    const Pocket pocket = load_pocket(kData / "pockets" / "dumbbell.json");
    struct Case {
        const char* catalog;
        double ratio;
        bool keep;
    };
    for (const Case& k : {Case{"dumbbell_ratio104.json", 1.04, false}, Case{"dumbbell_ratio130.json", 1.30, true}}) {
        const auto tools = load_tools(kData / "tools" / k.catalog);
        const Region machinable = machinable_region(pocket, tools);
        const Decomposition d = dichotomy_decompose(machinable, pocket.depth, diameter_bounds(machinable), tools);
        if (d.decisions.empty()) {
            c.check(false, std::string(k.catalog) + ": no interval decision");
            continue;
        }
        const IntervalDecision& first = d.decisions.front();
        c.check(first.kept_upper == k.keep && d.chosen.size() == (k.keep ? 2u : 1u),
                std::string(k.catalog) + ": upper interval " + (first.kept_upper ? "kept" : "dropped") + ", " +
                    std::to_string(d.chosen.size()) + " tool(s)");
        const auto* lo = step_for(d, first.lo);
        const auto* mid = step_for(d, first.mid);
        if (!lo || !mid) {
            c.check(false, std::string(k.catalog) + ": decision diameters not evaluated");
            continue;
        }
        const double oracle = oracle_mrr(machinable, pocket.depth, mid->diameter, mid->tool.vc) /
                              oracle_mrr(machinable, pocket.depth, lo->diameter, lo->tool.vc);
        c.check(std::abs(first.ratio - oracle) <= kRatioTol && std::abs(first.ratio - k.ratio) <= kRatioTol,
                std::string(k.catalog) + ": ratio " + fmt("%.4f", first.ratio) + ", oracle " + fmt("%.4f", oracle) +
                    ", target " + fmt("%.2f", k.ratio));
    }
}

void ac2(Criterion& c)
{
    const Pocket pocket = load_pocket(kData / "pockets" / "dumbbell.json");
    const auto tools = load_tools(kData / "tools" / "dumbbell_ratio130.json");
    const Region machinable = machinable_region(pocket, tools);
    const DiameterBounds b = diameter_bounds(machinable);
    const Decomposition d = dichotomy_decompose(machinable, pocket.depth, b, tools);
    bool exact = !d.steps.empty();
    for (const auto& s : d.steps) exact = exact && rel_eq(s.time, s.length / s.tool.vc, kFormulaRel);
    c.check(exact, "T = L / vc on " + std::to_string(d.steps.size()) + " evaluated diameters");
    const bool mid = !d.decisions.empty() && d.decisions.front().lo == b.d0 && d.decisions.front().hi == b.dx &&
                     d.decisions.front().mid == 0.5 * (b.d0 + b.dx);
    c.check(mid, "first midpoint " + fmt("%.6f", d.decisions.empty() ? 0.0 : d.decisions.front().mid) +
                     " = (D0 + Dx) / 2 = " + fmt("%.6f", 0.5 * (b.d0 + b.dx)));

    bool arcs = true;
    for (double a : {500.0, 1000.0, 5000.0, 20000.0})
        for (double r : {0.1, 1.0, 5.0, 27.0, 100.0})
            arcs = arcs && rel_eq(arc_feed_limit(r, kVf, a), std::min(std::sqrt(r * a), kVf), kFormulaRel);
    c.check(arcs, "arc feed limit = min(sqrt(r a), Vf) on 20 cases");
    bool boundary = true;
    for (double a : {500.0, 1000.0, 5000.0, 20000.0})
        boundary = boundary && rel_eq(arc_feed_limit(kVf * kVf / a, kVf, a), kVf, kBoundaryRel);
    c.check(boundary, "r = Vf^2 / a sustains Vf");
}

Toolpath lobed_path(PathMode mode, LinkStyle links, bool discretize)
{
    const Region zone = opening(corpus::lobed_pocket(), 10.0);
    StrategyParams p;
    p.mode = mode;
    p.links = links;
    p.stepover = 5.0;
    p.zigzag_direction = longest_extent_direction(zone);
    Toolpath path = generate_toolpath(zone, closed(), tool(10.0, kVf), p, 10.0, kVf);
    return discretize ? discretize_arcs(path, 0.01) : path;
}

void ac3(Criterion& c)
{
    for (PathMode mode : {PathMode::spiral, PathMode::zigzag})
        for (LinkStyle links : {LinkStyle::classic, LinkStyle::hsm}) {
            const Toolpath p = lobed_path(mode, links, true);
            const SimResult base = simulate(p, legacy(1000.0), kVf);
            const SimResult fast = simulate(p, legacy(10000.0), kVf);
            const double r1 = base.time / base.cam_time, r10 = fast.time / fast.cam_time;
            c.check(r1 > kGapRatio && r10 < r1, std::string(to_string(mode)) + "/" + to_string(links) + ": time/cam " +
                                                    fmt("%.3f", r1) + " at 1000 mm/s2, " + fmt("%.3f", r10) +
                                                    " at 10000 mm/s2");
        }
}

const RankedStrategy* find(const StrategyReport& r, PathMode mode, LinkStyle links)
{
    for (const RankedStrategy& s : r.ranked)
        if (s.params.mode == mode && s.params.links == links) return &s;
    return nullptr;
}

void ac4(Criterion& c)
{
    const Region zone = opening(corpus::lobed_pocket(), 10.0);
    for (bool discretize : {true, false}) {
        AdvisorRules rules;
        rules.discretize_arcs = discretize;
        std::vector<StrategyParams> candidates;
        for (const StrategyParams& p : enumerate_strategies(closed(), tool(10.0, kVf), legacy(), kVf, zone, rules))
            if ((p.corner_radius > 0.0) != discretize) candidates.push_back(p);
        const StrategyReport r = rank(zone, closed(), candidates, tool(10.0, kVf), legacy(), kVf, 10.0, rules);
        for (PathMode mode : {PathMode::spiral, PathMode::zigzag}) {
            const auto* classic = find(r, mode, LinkStyle::classic);
            const auto* hsm = find(r, mode, LinkStyle::hsm);
            if (!classic || !hsm) {
                c.check(false, std::string(to_string(mode)) + ": strategy missing from ranking");
                continue;
            }
            const double tc = classic->sim.time, th = hsm->sim.time;
            if (discretize)
                c.check(th > tc, std::string("discretized ") + to_string(mode) + ": hsm " + fmt("%.3f", th) +
                                     " s > classic " + fmt("%.3f", tc) + " s");
            else
                c.check(th <= tc, std::string("native, r* = ") + fmt("%.2f", hsm->params.corner_radius) + " " +
                                      to_string(mode) + ": hsm " + fmt("%.3f", th) + " s <= classic " +
                                      fmt("%.3f", tc) + " s");
        }
    }
}

void ac5(Criterion& c)
{
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> dia(2.0, 16.0);
    int passed = 0, vertex_ok = 0;
    double worst = 0.0;
    const auto polys = corpus::rectilinear_corpus(50, 101);
    for (const Region& r : polys) {
        const double d = dia(rng);
        vertex_ok += r.parts.size() == 1 && r.parts.front().outer.size() <= 20;
        const auto g = raster::frame(r, 0.05, 1.0);
        const auto oracle = raster::opening(raster::rasterize(r, g), d);
        const double frac = raster::xor_area(raster::rasterize(opening(r, d), g), oracle) / area(r);
        worst = std::max(worst, frac);
        passed += frac < kOracleAreaFrac;
    }
    c.check(vertex_ok == 50, std::to_string(vertex_ok) + "/50 polygons with at most 20 vertices");
    c.check(passed == 50, std::to_string(passed) + "/50 below 1% symmetric difference, worst " +
                              fmt("%.4f", 100.0 * worst) + "%");
}

Toolpath line(double length)
{
    Toolpath p;
    p.moves.push_back(line_move({0, 0}, {length, 0}));
    return p;
}

void ac6(Criterion& c)
{
    MachineParams m;
    m.a_max = 1000.0;
    const double trap = plan_profile(line(100.0), m, 50.0).time;
    const double tri = plan_profile(line(1.0), m, 50.0).time;
    c.check(std::abs(trap - 2.05) <= kClosedFormTol && std::abs(trap - raster::integrate_line(100.0, 50.0, 1000.0)) <= kClosedFormTol,
            "trapezoid " + fmt("%.6f", trap) + " s vs 2.05 s");
    c.check(std::abs(tri - 2.0 * std::sqrt(1e-3)) <= kClosedFormTol && std::abs(tri - 0.0632) <= kClosedFormTol,
            "triangle " + fmt("%.6f", tri) + " s vs 0.0632 s");

    int soft_ok = 0, mono_ok = 0;
    const auto paths = corpus::path_corpus(20, 42);
    for (const Toolpath& p : paths) {
        MachineParams brisk;
        brisk.a_max = 5000.0;
        MachineParams soft = brisk;
        soft.mode = AccelMode::soft;
        soft_ok += plan_profile(p, soft, p.feed).time >= plan_profile(p, brisk, p.feed).time - 1e-9;

        bool mono = true;
        for (AccelMode mode : {AccelMode::brisk, AccelMode::soft}) {
            double prev = std::numeric_limits<double>::infinity();
            for (double a : {500.0, 1000.0, 2500.0, 5000.0, 20000.0}) {
                MachineParams q;
                q.a_max = a;
                q.mode = mode;
                const double t = plan_profile(p, q, p.feed).time;
                mono = mono && t <= prev + 1e-9;
                prev = t;
            }
            prev = std::numeric_limits<double>::infinity();
            for (int look : {1, 2, 5, 20, 200}) {
                MachineParams q;
                q.a_max = 1000.0;
                q.mode = mode;
                q.lookahead = look;
                const double t = plan_profile(p, q, p.feed).time;
                mono = mono && t <= prev + 1e-9;
                prev = t;
            }
        }
        mono_ok += mono;
    }
    c.check(soft_ok == 20, std::to_string(soft_ok) + "/20 paths with soft >= brisk");
    c.check(mono_ok == 20, std::to_string(mono_ok) + "/20 paths monotone in a_max and lookahead");
}

double coverage(const Toolpath& path, const Region& zone)
{
    const double r = path.tool.radius();
    const auto g = raster::frame(zone, 0.05, r + 1.0);
    const auto z = raster::rasterize(zone, g);
    return 1.0 - raster::minus_area(z, raster::swept(path, r, g)) / z.area();
}

void ac7(Criterion& c)
{
    const auto polys = corpus::rectilinear_corpus(20, 11);

    int opening_ok = 0, opening_n = 0;
    for (const Region& r : polys) {
        const double a = area(r);
        Region prev = r;
        for (double d : {2.0, 6.0, 10.0, 16.0}) {
            const Region o = opening(r, d);
            opening_ok += area(region_difference(o, r)) < 1e-3 * a && symmetric_difference_area(o, opening(o, d)) < 1e-3 * a &&
                          area(region_difference(o, prev)) < 1e-3 * a;
            ++opening_n;
            prev = o;
        }
    }
    c.check(opening_ok == opening_n, "opening anti-extensive, idempotent, monotone: " + std::to_string(opening_ok) + "/" +
                                         std::to_string(opening_n));

    int zones_ok = 0, zones_n = 0;
    std::vector<Tool> catalog{tool(10, 166.67), tool(16, 260), tool(20, 330), tool(25, 420), tool(32, 600)};
    std::vector<Region> regions = {corpus::dumbbell(), corpus::lobed_pocket()};
    for (std::size_t k = 0; k < 5; ++k) regions.push_back(polys[k]);
    for (const Region& r : regions) {
        const auto assigned = assign_zones(r, {16.0, 8.0, 4.0});
        bool ok = true;
        for (std::size_t i = 0; i < assigned.size(); ++i) {
            ok = ok && area(region_difference(assigned[i].zone, r)) < 1e-3;
            for (std::size_t j = 0; j < i; ++j) ok = ok && area(region_intersection(assigned[i].zone, assigned[j].zone)) < 1e-2;
        }
        zones_ok += ok;
        ++zones_n;
    }
    const Decomposition d = dichotomy_decompose(corpus::dumbbell(), 10.0, diameter_bounds(corpus::dumbbell()), catalog);
    bool dec_ok = true;
    for (std::size_t i = 0; i < d.chosen.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) dec_ok = dec_ok && area(region_intersection(d.chosen[i].zone, d.chosen[j].zone)) < 1e-2;
    zones_ok += dec_ok;
    ++zones_n;
    c.check(zones_ok == zones_n, "zones disjoint and inside the region: " + std::to_string(zones_ok) + "/" + std::to_string(zones_n));

    int cont_ok = 0, corner_ok = 0, hsm_ok = 0, n = 0;
    for (std::size_t k = 0; k < 10; ++k) {
        const Region zone = opening(polys[k], 8.0);
        if (zone.empty()) continue;
        for (PathMode mode : {PathMode::spiral, PathMode::zigzag}) {
            StrategyParams sp;
            sp.mode = mode;
            sp.stepover = 4.0;
            const Tool t = tool(8.0, 100.0);
            const Toolpath raw = mode == PathMode::spiral ? spiral_path(zone, t, sp) : zigzag_path(zone, t, sp);
            const double len = path_length(raw).total;
            bool cont = max_continuity_gap(raw) < kContinuity, shorter = true;
            for (double r : {1.0, 3.0, 8.0}) {
                const Toolpath cz = cornerize(raw, r);
                cont = cont && max_continuity_gap(cz) < kContinuity;
                shorter = shorter && path_length(cz).total <= len + 1e-9;
            }
            const Toolpath h = hsm_links(raw, LinkStyle::hsm, 4.0);
            const Toolpath dz = discretize_arcs(h, 0.01);
            const Toolpath fa = fit_arcs(dz, 0.01);
            cont = cont && max_continuity_gap(h) < kContinuity && max_continuity_gap(dz) < kContinuity &&
                   max_continuity_gap(fa) < kContinuity;
            cont_ok += cont;
            corner_ok += shorter;
            hsm_ok += path_length(h).total >= len - 1e-9;
            ++n;
        }
    }
    const std::string of = "/" + std::to_string(n);
    c.check(cont_ok == n, "C0 continuity after generate, cornerize, hsm links, discretize, fit: " + std::to_string(cont_ok) + of);
    c.check(corner_ok == n, "cornerize never lengthens: " + std::to_string(corner_ok) + of);
    c.check(hsm_ok == n, "hsm links never shorten: " + std::to_string(hsm_ok) + of);

    double worst = 1.0;
    for (const Region& base : {corpus::lobed_pocket(), corpus::dumbbell()}) {
        const Region zone = opening(base, 10.0);
        for (PathMode mode : {PathMode::spiral, PathMode::zigzag})
            for (LinkStyle links : {LinkStyle::classic, LinkStyle::hsm}) {
                StrategyParams sp;
                sp.mode = mode;
                sp.links = links;
                sp.stepover = 5.0;
                sp.zigzag_direction = 0.3;
                const Tool t = tool(10.0, kVf);
                worst = std::min(worst, coverage(mode == PathMode::spiral ? spiral_path(zone, t, sp) : zigzag_path(zone, t, sp), zone));
            }
    }
    c.check(worst >= kCoverage, "coverage of the tool zone, worst " + fmt("%.4f", worst));
}

} // namespace

int main(int argc, char** argv)
{
    bool strict = false, verbose = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0) strict = true;
        else if (std::strcmp(argv[i], "--verbose") == 0 || std::strcmp(argv[i], "-v") == 0) verbose = true;
        else {
            std::fprintf(stderr, "usage: %s [--strict] [--verbose]\n", argv[0]);
            return 2;
        }
    }

    struct Entry {
        const char* id;
        const char* title;
        void (*run)(Criterion&);
        double budget;
    };
    const Entry entries[] = {
        {"AC1", "dichotomy fidelity", ac1, kBudgetAc1},
        {"AC2", "formula checks", ac2, 0.0},
        {"AC3", "CAM-gap property", ac3, kBudgetAc3},
        {"AC4", "strategy ordering", ac4, 0.0},
        {"AC5", "geometry oracle", ac5, kBudgetAc5},
        {"AC6", "kinematic closed forms", ac6, 0.0},
        {"AC7", "invariant suites", ac7, 0.0},
    };

    int failed = 0;
    for (const Entry& e : entries) {
        Criterion c{e.id, e.title};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            e.run(c);
        } catch (const std::exception& ex) {
            c.check(false, std::string("exception: ") + ex.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (e.budget > 0.0) c.check(secs < e.budget, "runtime " + fmt("%.2f", secs) + " s < " + fmt("%.0f", e.budget) + " s");
        failed += !c.ok;
        std::printf("%s %s  %s  (%.2f s)\n", c.id.c_str(), c.ok ? "PASS" : "FAIL", c.title.c_str(), secs);
        for (const auto& n : c.notes)
            if (verbose || !c.ok || n.rfind("FAIL", 0) == 0) std::printf("    %s\n", n.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/7 criteria passed\n", 7 - failed);
    return strict && failed > 0 ? 1 : 0;
}
