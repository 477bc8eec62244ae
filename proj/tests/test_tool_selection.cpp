#include "pocketforge/errors.hpp"
#include "pocketforge/tool_selection.hpp"
#include "pocketforge/toolpath.hpp"

#include "support/corpus.hpp"
#include "support/raster.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>

using namespace pocketforge;

namespace {

Tool tool(double d, double vc) { return {d, 2, vc, PlungeStyle::helical}; }

// Bisection on the grid: largest diameter whose erosion is one 8-connected piece.
double raster_d0(const Region& r, double dx)
{
    const auto g = raster::frame(r, 0.05, 1.0);
    const auto base = raster::rasterize(r, g);
    double lo = 0.0, hi = dx;
    while (hi - lo > 0.01) {
        const double mid = 0.5 * (lo + hi);
        (raster::components(raster::erode(base, 0.5 * mid)) == 1 ? lo : hi) = mid;
    }
    return lo;
}

} // namespace

TEST(RemovalTime, Formula)
{
    EXPECT_DOUBLE_EQ(removal_time(1000.0, tool(10, 100)), 10.0);
    EXPECT_DOUBLE_EQ(removal_time(0.0, tool(10, 100)), 0.0);
    EXPECT_NEAR(removal_time(5489.0, tool(10, 166.67)), 32.9, 0.05);
    EXPECT_THROW(removal_time(-1.0, tool(10, 100)), ValidationError);
}

TEST(Mrr, Formula)
{
    EXPECT_DOUBLE_EQ(mrr(60000.0, 30.0), 2000.0);
    EXPECT_DOUBLE_EQ(mrr(0.0, 10.0), 0.0);
    EXPECT_THROW(mrr(10.0, 0.0), ValidationError);
}

TEST(Mrr, OpenedSquareRecomputedFromParts)
{
    const Region sq = make_rectangle(0, 0, 20, 20);
    DecomposeOptions opts;
    const auto step = evaluate_diameter(sq, 5.0, 10.0, tool(10, 166.67), opts);
    EXPECT_NEAR(step.volume, 1892.7, 2.5);
    const double volume = area(opening(sq, 10.0)) * 5.0;
    StrategyParams p;
    p.stepover = 5.0;
    const Toolpath path = spiral_path(opening(sq, 10.0), tool(10, 166.67), p);
    const double t = path_length(path).total / 166.67;
    EXPECT_NEAR(step.mrr / (volume / t), 1.0, 1e-9);
}

TEST(Bounds, Rectangle)
{
    const auto b = diameter_bounds(make_rectangle(0, 0, 100, 40));
    EXPECT_NEAR(b.dx, 40.0, 0.1);
    EXPECT_NEAR(b.d0, 40.0, 0.1);
}

TEST(Bounds, Square)
{
    const auto b = diameter_bounds(make_rectangle(0, 0, 20, 20));
    EXPECT_NEAR(b.dx, 20.0, 0.1);
    EXPECT_NEAR(b.d0, 20.0, 0.1);
}

TEST(Bounds, DumbbellAgainstRasterConnectivity)
{
    const Region r = corpus::dumbbell();
    const auto b = diameter_bounds(r);
    EXPECT_NEAR(b.dx, 40.0, 0.1);
    EXPECT_NEAR(b.d0, 10.0, 0.1);
    EXPECT_NEAR(b.d0, raster_d0(r, b.dx), 0.1);
}

TEST(Bounds, EmptyThrows)
{
    EXPECT_THROW(diameter_bounds(Region{}), ValidationError);
}

TEST(Snap, LargestNotAbove)
{
    const std::vector<Tool> cat{tool(6, 1), tool(10, 1), tool(16, 1)};
    EXPECT_EQ(snap_to_catalog(cat, 12.0)->diameter, 10.0);
    EXPECT_EQ(snap_to_catalog(cat, 16.0)->diameter, 16.0);
    EXPECT_FALSE(snap_to_catalog(cat, 5.0).has_value());
    EXPECT_DOUBLE_EQ(catalog_granularity(cat), 4.0);
}

TEST(Dichotomy, FirstMidpointIsHalfSum)
{
    const Region sq = make_rectangle(0, 0, 30, 30);
    const std::vector<Tool> cat{tool(10, 100), tool(20, 100), tool(30, 100)};
    const auto d = dichotomy_decompose(sq, 5.0, {10.0, 30.0}, cat);
    ASSERT_FALSE(d.decisions.empty());
    EXPECT_EQ(d.decisions[0].mid, 20.0);
    EXPECT_EQ(d.decisions[0].lo, 10.0);
}

TEST(Dichotomy, RatioBelowThresholdDropsUpper)
{
    const Region r = corpus::dumbbell();
    const auto b = diameter_bounds(r);
    const auto d = dichotomy_decompose(r, 10.0, b, {tool(10, 166.67), tool(25, 65.73)});
    ASSERT_EQ(d.decisions.size(), 1u);
    EXPECT_NEAR(d.decisions[0].ratio, 1.04, 0.005);
    EXPECT_FALSE(d.decisions[0].kept_upper);
    ASSERT_EQ(d.chosen.size(), 1u);
    EXPECT_EQ(d.chosen[0].tool.diameter, 10.0);
}

TEST(Dichotomy, RatioAboveThresholdKeepsBoth)
{
    const Region r = corpus::dumbbell();
    const auto b = diameter_bounds(r);
    const auto d = dichotomy_decompose(r, 10.0, b, {tool(10, 166.67), tool(25, 82.16)});
    ASSERT_EQ(d.decisions.size(), 1u);
    EXPECT_NEAR(d.decisions[0].ratio, 1.30, 0.005);
    EXPECT_TRUE(d.decisions[0].kept_upper);
    ASSERT_EQ(d.chosen.size(), 2u);
    EXPECT_EQ(d.chosen[0].tool.diameter, 25.0);
    EXPECT_EQ(d.chosen[1].tool.diameter, 10.0);
}

TEST(Dichotomy, InfiniteThresholdGivesOneTool)
{
    const Region r = corpus::lobed_pocket();
    const auto b = diameter_bounds(r);
    const std::vector<Tool> cat{tool(6, 100), tool(10, 166.67), tool(16, 200), tool(20, 233), tool(25, 250)};
    DecomposeOptions opts;
    opts.threshold = std::numeric_limits<double>::infinity();
    const auto d = dichotomy_decompose(r, 10.0, b, cat, opts);
    ASSERT_EQ(d.chosen.size(), 1u);
    EXPECT_EQ(d.chosen[0].tool.diameter, snap_to_catalog(cat, b.d0)->diameter);
}

TEST(Dichotomy, ZonesDisjointAndInsideMachinable)
{
    const Region r = corpus::dumbbell();
    const auto b = diameter_bounds(r);
    const std::vector<Tool> cat{tool(10, 166.67), tool(16, 260), tool(20, 330), tool(25, 420), tool(32, 600)};
    const auto d = dichotomy_decompose(r, 10.0, b, cat);
    ASSERT_GE(d.chosen.size(), 2u);
    std::vector<Region> zones;
    for (const auto& c : d.chosen) {
        EXPECT_LT(area(region_difference(c.zone, r)), 1e-3);
        for (const auto& z : zones) EXPECT_LT(area(region_intersection(c.zone, z)), 1e-2);
        zones.push_back(c.zone);
    }
    const double smallest = d.chosen.back().tool.diameter;
    EXPECT_NEAR(area(region_union(zones)), area(opening(r, smallest)), 0.05);
    for (std::size_t k = 1; k < d.chosen.size(); ++k)
        EXPECT_GT(d.chosen[k - 1].tool.diameter, d.chosen[k].tool.diameter);
}

TEST(Dichotomy, TerminationBound)
{
    const Region r = corpus::dumbbell();
    const auto b = diameter_bounds(r);
    std::vector<Tool> cat;
    for (int d = 10; d <= 40; ++d) cat.push_back(tool(d, 10.0 * d));
    DecomposeOptions opts;
    opts.threshold = 0.0;
    const auto d = dichotomy_decompose(r, 10.0, b, cat, opts);
    int max_iter = 0;
    std::map<int, int> per_level;
    for (const auto& dec : d.decisions) {
        max_iter = std::max(max_iter, dec.iteration);
        ++per_level[dec.iteration];
        EXPECT_NEAR(dec.hi - dec.lo, (b.dx - d.decisions[0].lo) / std::pow(2.0, dec.iteration - 1), 1e-9);
    }
    for (auto [level, count] : per_level) EXPECT_LE(count, 1 << (level - 1));
    // width halves each level and stops below the 1 mm granularity
    ASSERT_GT(max_iter, 0);
    EXPECT_LE(max_iter, static_cast<int>(std::ceil(std::log2(b.dx - b.d0))) + 1);
}

TEST(Dichotomy, NoInsertableTool)
{
    const Region r = make_rectangle(0, 0, 8, 8);
    try {
        dichotomy_decompose(r, 5.0, diameter_bounds(r), {tool(10, 100)});
        FAIL() << "expected infeasible";
    } catch (const InfeasibleError& e) {
        EXPECT_EQ(e.code(), "no_insertable_tool");
    }
}

TEST(AssignZones, ConvexSingle)
{
    const Region r = make_rectangle(0, 0, 50, 30);
    const auto z = assign_zones(r, {10.0});
    ASSERT_EQ(z.size(), 1u);
    EXPECT_LT(symmetric_difference_area(z[0].zone, opening(r, 10.0)), 1e-3);
}

TEST(AssignZones, DumbbellLobesAndChannel)
{
    const Region r = corpus::dumbbell();
    Region residual;
    const auto z = assign_zones(r, {30.0, 10.0}, &residual);
    ASSERT_EQ(z.size(), 2u);
    EXPECT_EQ(region_metrics(z[0].zone).component_count, 2);
    EXPECT_TRUE(contains(z[1].zone, {55.0, 20.0}));
    EXPECT_FALSE(contains(z[1].zone, {20.0, 20.0}));
    EXPECT_NEAR(area(residual), area(r) - area(opening(r, 10.0)), 0.05);
}

TEST(AssignZones, DumbbellRasterDifferencing)
{
    // a grid cannot resolve a channel exactly one tool wide, so the oracle uses 9.9
    const Region r = corpus::dumbbell();
    const auto z = assign_zones(r, {30.0, 9.9});
    const auto g = raster::frame(r, 0.05, 1.0);
    const auto base = raster::rasterize(r, g);
    const auto o30 = raster::opening(base, 30.0);
    const auto small = raster::opening(base, 9.9);
    raster::Grid rest = small.blank();
    for (std::size_t k = 0; k < rest.cell.size(); ++k) rest.cell[k] = small.cell[k] && !o30.cell[k];
    EXPECT_LT(raster::xor_area(raster::rasterize(z[0].zone, g), o30), 0.01 * area(r));
    EXPECT_LT(raster::xor_area(raster::rasterize(z[1].zone, g), rest), 0.01 * area(r));
}

TEST(AssignZones, DuplicateDiameterGetsNothing)
{
    const auto z = assign_zones(make_rectangle(0, 0, 50, 30), {20.0, 20.0});
    ASSERT_EQ(z.size(), 2u);
    EXPECT_LT(area(z[1].zone), 1e-6);
}

TEST(OpeningArea, NonIncreasingInDiameter)
{
    const Region r = corpus::lobed_pocket();
    double prev = area(r);
    for (int k = 1; k <= 10; ++k) {
        const double a = area(opening(r, 3.0 * k));
        EXPECT_LE(a, prev + 1e-6);
        prev = a;
    }
}
