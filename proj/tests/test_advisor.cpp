#include "pocketforge/advisor.hpp"
#include "pocketforge/errors.hpp"

#include "support/corpus.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <set>

using namespace pocketforge;

namespace {

Tool phi10() { return {10.0, 2, 166.67, PlungeStyle::helical}; }

MachineParams legacy()
{
    MachineParams m;
    m.a_max = 1000;
    m.block_time = 0.012;
    return m;
}

PocketClass closed() { return {Closure::closed, FloorKind::flat, WallKind::perpendicular, false, false}; }

Pocket lobed_pocket()
{
    const Region r = corpus::lobed_pocket();
    Pocket p;
    p.name = "lobed";
    p.boundary = r.parts.front();
    p.islands.resize(p.boundary.holes.size());
    p.depth = 10;
    return p;
}

Pocket dumbbell_pocket()
{
    Pocket p;
    p.name = "dumbbell";
    p.boundary = corpus::dumbbell().parts.front();
    p.depth = 10;
    return p;
}

const RankedStrategy& find(const StrategyReport& r, PathMode mode, LinkStyle links)
{
    for (const RankedStrategy& s : r.ranked)
        if (s.params.mode == mode && s.params.links == links) return s;
    throw std::runtime_error("strategy missing");
}

StrategyReport rank_lobed(bool discretize, double corner_radius)
{
    const Region zone = opening(corpus::lobed_pocket(), 10.0);
    AdvisorRules rules;
    rules.discretize_arcs = discretize;
    std::vector<StrategyParams> candidates;
    for (const StrategyParams& p : enumerate_strategies(closed(), phi10(), legacy(), 166.67, zone, rules))
        if ((p.corner_radius > 0.0) == (corner_radius > 0.0)) candidates.push_back(p);
    return rank(zone, closed(), candidates, phi10(), legacy(), 166.67, 10.0, rules);
}

} // namespace

TEST(CornerRadius, Examples)
{
    MachineParams m;
    m.a_max = 5000;
    const auto free = recommended_corner_radius(166.67, m);
    EXPECT_NEAR(free.radius, 166.67 * 166.67 / 5000.0, 1e-9);
    EXPECT_GE(free.radius, 5.55);
    EXPECT_TRUE(free.feed_sustainable);
    const auto tight = recommended_corner_radius(166.67, m, 3.0);
    EXPECT_DOUBLE_EQ(tight.radius, 3.0);
    EXPECT_FALSE(tight.feed_sustainable);
    m.a_max = std::numeric_limits<double>::max();
    EXPECT_DOUBLE_EQ(recommended_corner_radius(166.67, m).radius, 0.5);
}

TEST(LongestExtent, AxisAndRotated)
{
    EXPECT_DOUBLE_EQ(longest_extent_direction(make_rectangle(0, 0, 100, 50)), 0.0);
    EXPECT_NEAR(longest_extent_direction(make_rectangle(0, 0, 30, 90)), std::numbers::pi / 2, 1e-12);
    Loop l;
    const double c = std::cos(0.4), s = std::sin(0.4);
    for (Point p : {Point{0, 0}, Point{60, 0}, Point{60, 10}, Point{0, 10}}) l.push_back({c * p.x - s * p.y, s * p.x + c * p.y});
    EXPECT_NEAR(longest_extent_direction(make_region(l)), 0.4, 1e-9);
}

TEST(Enumerate, ClosedGivesEightSpiralPlunge)
{
    const auto zone = make_rectangle(0, 0, 100, 50);
    const auto c = enumerate_strategies(closed(), phi10(), MachineParams{}, 166.67, zone);
    ASSERT_EQ(c.size(), 8u);
    std::set<std::tuple<int, int, bool>> combos;
    for (const StrategyParams& p : c) {
        EXPECT_EQ(p.entry, EntryKind::spiral_plunge);
        EXPECT_DOUBLE_EQ(p.stepover, 5.0);
        EXPECT_DOUBLE_EQ(p.zigzag_direction, 0.0);
        combos.insert({static_cast<int>(p.mode), static_cast<int>(p.links), p.corner_radius > 0.0});
    }
    EXPECT_EQ(combos.size(), 8u);
}

TEST(Enumerate, OpenUsesFlankEntry)
{
    PocketClass cls = closed();
    for (Closure c : {Closure::open, Closure::corner}) {
        cls.closure = c;
        for (const StrategyParams& p : enumerate_strategies(cls, phi10(), MachineParams{}, 166.67, make_rectangle(0, 0, 50, 50)))
            EXPECT_EQ(p.entry, EntryKind::tangential_flank);
    }
}

TEST(Rank, SortedPermutationAndDeterministic)
{
    const Region zone = opening(corpus::lobed_pocket(), 10.0);
    const auto candidates = enumerate_strategies(closed(), phi10(), MachineParams{}, 166.67, zone);
    const StrategyReport a = rank(zone, closed(), candidates, phi10(), MachineParams{}, 166.67, 10.0);
    const StrategyReport b = rank(zone, closed(), candidates, phi10(), MachineParams{}, 166.67, 10.0);
    ASSERT_EQ(a.ranked.size(), candidates.size());
    std::set<int> orders;
    for (std::size_t i = 0; i < a.ranked.size(); ++i) {
        orders.insert(a.ranked[i].order);
        EXPECT_EQ(a.ranked[i].params, candidates[static_cast<std::size_t>(a.ranked[i].order)]);
        if (i > 0) EXPECT_LE(a.ranked[i - 1].sim.time, a.ranked[i].sim.time);
        EXPECT_EQ(a.ranked[i].order, b.ranked[i].order);
        EXPECT_EQ(a.ranked[i].sim.time, b.ranked[i].sim.time);
    }
    EXPECT_EQ(orders.size(), candidates.size());
    EXPECT_EQ(a.recommended, a.ranked.front().params);
}

TEST(Rank, IdenticalCandidatesTieBreakByOrder)
{
    const Region zone = make_rectangle(0, 0, 60, 40);
    StrategyParams p;
    p.stepover = 5.0;
    const StrategyReport r = rank(zone, closed(), {p, p, p}, phi10(), MachineParams{}, 166.67, 5.0);
    ASSERT_EQ(r.ranked.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(r.ranked[static_cast<std::size_t>(i)].order, i);
    EXPECT_EQ(r.ranked[0].sim.time, r.ranked[2].sim.time);
}

TEST(Rank, ForbiddenRuleOverridesRecommendation)
{
    const Region zone = opening(corpus::lobed_pocket(), 10.0);
    const auto candidates = enumerate_strategies(closed(), phi10(), MachineParams{}, 166.67, zone);
    AdvisorRules rules;
    const StrategyReport free = rank(zone, closed(), candidates, phi10(), MachineParams{}, 166.67, 10.0, rules);
    rules.forbidden.push_back({free.ranked.front().params.mode, free.ranked.front().params.links, "shop rule"});
    const StrategyReport r = rank(zone, closed(), candidates, phi10(), MachineParams{}, 166.67, 10.0, rules);
    EXPECT_NE(r.recommended, r.ranked.front().params);
    EXPECT_FALSE(r.recommended.mode == free.ranked.front().params.mode &&
                 r.recommended.links == free.ranked.front().params.links);
    bool recorded = false;
    for (const auto& line : r.rationale) recorded |= line.find("rule override") != std::string::npos;
    EXPECT_TRUE(recorded);
}

TEST(Rank, AllCandidatesFail)
{
    // closed 10 x 10 pocket with a 10 mm tool: no room for the helix
    const Region zone = opening(make_rectangle(0, 0, 10, 10), 10.0);
    StrategyParams p;
    try {
        rank(zone, closed(), {p}, phi10(), MachineParams{}, 166.67, 5.0);
        FAIL() << "expected infeasible";
    } catch (const InfeasibleError& e) {
        EXPECT_EQ(e.code(), "no_strategy");
        EXPECT_NE(std::string(e.what()).find("0:"), std::string::npos);
    }
}

TEST(Rank, EmptyCandidatesRejected)
{
    EXPECT_THROW(rank(make_rectangle(0, 0, 50, 50), closed(), {}, phi10(), MachineParams{}, 166.67, 5.0), ValidationError);
}

TEST(Ordering, DiscretizedHsmSlowerThanClassic)
{
    const StrategyReport r = rank_lobed(true, 0.0);
    for (PathMode mode : {PathMode::spiral, PathMode::zigzag})
        EXPECT_GT(find(r, mode, LinkStyle::hsm).sim.time, find(r, mode, LinkStyle::classic).sim.time) << to_string(mode);
}

TEST(Ordering, NativeArcsWithOptimalRadiusZigzagReverses)
{
    // the spiral pair is reported by the acceptance run, where it does not reverse
    const StrategyReport r = rank_lobed(false, 1.0);
    EXPECT_LE(find(r, PathMode::zigzag, LinkStyle::hsm).sim.time, find(r, PathMode::zigzag, LinkStyle::classic).sim.time);
}

TEST(Advise, DumbbellTwoToolsEightStrategies)
{
    const std::vector<Tool> catalog{{10.0, 2, 166.67, PlungeStyle::helical}, {25.0, 2, 82.16, PlungeStyle::helical}};
    const PocketAdvice a = advise_pocket(dumbbell_pocket(), catalog, MachineParams{}, 0.0);
    ASSERT_EQ(a.reports.size(), 2u);
    for (const StrategyReport& r : a.reports) {
        EXPECT_EQ(r.ranked.size() + r.failures.size(), 8u);
        EXPECT_DOUBLE_EQ(r.feed, r.tool.vc);
        for (const RankedStrategy& s : r.ranked) EXPECT_EQ(s.params.entry, EntryKind::spiral_plunge);
    }
    const std::string md = report_markdown(a);
    EXPECT_NE(md.find("| spiral |"), std::string::npos);
    EXPECT_NE(md.find("Recommended:"), std::string::npos);
}

TEST(Advise, OpenPocketFlankEverywhere)
{
    Pocket p = dumbbell_pocket();
    p.open_edges = {11};
    const PocketAdvice a = advise_pocket(p, {phi10()}, MachineParams{}, 166.67);
    ASSERT_FALSE(a.reports.empty());
    for (const StrategyReport& r : a.reports)
        for (const RankedStrategy& s : r.ranked) EXPECT_EQ(s.params.entry, EntryKind::tangential_flank);
}

TEST(Advise, SpecificEntitiesMaskZone)
{
    Pocket p = lobed_pocket();
    p.entities.push_back({EntityKind::thin_wall, make_rectangle(20, 10, 22, 70), 3.0});
    const Region m = machinable_region(p, {phi10()});
    EXPECT_LT(area(m), area(corpus::lobed_pocket()) - 2.0 * 60.0);
    EXPECT_FALSE(contains(m, {21.0, 40.0}));
    const PocketAdvice a = advise_pocket(p, {phi10()}, MachineParams{}, 166.67);
    for (const ChosenTool& c : a.decomposition.chosen) EXPECT_LT(area(region_intersection(c.zone, make_rectangle(18, 8, 24, 72))), 1e-6);
}

TEST(Format, Duration)
{
    EXPECT_EQ(format_duration(103.4), "1 min 43.4 s");
    EXPECT_EQ(format_duration(30.0), "30.0 s");
}
