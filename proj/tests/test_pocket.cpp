#include "pocketforge/errors.hpp"
#include "pocketforge/pocket.hpp"

#include "support/raster.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace pocketforge;

namespace {

Pocket rectangle_pocket()
{
    Pocket p;
    p.name = "rect";
    p.boundary.outer = {{0, 0}, {100, 0}, {100, 50}, {0, 50}};
    p.depth = 10.0;
    return p;
}

Pocket with_islands(std::vector<IslandInfo> infos)
{
    Pocket p = rectangle_pocket();
    p.boundary.holes.push_back(Loop{{10, 10}, {10, 20}, {20, 20}, {20, 10}});
    p.boundary.holes.push_back(Loop{{60, 10}, {60, 30}, {80, 30}, {80, 10}});
    p.boundary.holes.resize(infos.size());
    p.islands = std::move(infos);
    return p;
}

} // namespace

TEST(Classify, ClosedRectangle)
{
    const PocketClass c = classify_pocket(rectangle_pocket());
    EXPECT_EQ(c, (PocketClass{Closure::closed, FloorKind::flat, WallKind::perpendicular, false, false}));
}

TEST(Classify, OneOpenEdgeIsOpen)
{
    Pocket p = rectangle_pocket();
    p.open_edges = {3};
    EXPECT_EQ(classify_pocket(p).closure, Closure::open);
}

TEST(Classify, OpenRunOverTwoAdjacentSidesIsCorner)
{
    Pocket p = rectangle_pocket();
    p.open_edges = {1, 2};
    EXPECT_EQ(classify_pocket(p).closure, Closure::corner);
    p.open_edges = {3, 0};
    EXPECT_EQ(classify_pocket(p).closure, Closure::corner);
}

TEST(Classify, OppositeOpenSidesStayOpen)
{
    Pocket p = rectangle_pocket();
    p.open_edges = {0, 2};
    EXPECT_EQ(classify_pocket(p).closure, Closure::open);
}

TEST(Classify, ThinWallSetsSpecific)
{
    Pocket p = rectangle_pocket();
    p.entities.push_back({EntityKind::thin_wall, make_rectangle(49, 5, 51, 45), 3.0});
    EXPECT_TRUE(classify_pocket(p).has_specific);
}

TEST(Classify, IslandsAndTags)
{
    Pocket p = with_islands({IslandInfo{}});
    p.floor = FloorKind::complex;
    p.wall = WallKind::drafted;
    const PocketClass c = classify_pocket(p);
    EXPECT_TRUE(c.has_islands);
    EXPECT_EQ(c.floor, FloorKind::complex);
    EXPECT_EQ(c.wall, WallKind::drafted);
}

TEST(Validate, Errors)
{
    Pocket p = rectangle_pocket();
    p.depth = 0.0;
    EXPECT_THROW(validate(p), ValidationError);
    p = rectangle_pocket();
    p.open_edges = {4};
    EXPECT_THROW(validate(p), ValidationError);
    p = rectangle_pocket();
    p.entities.push_back({EntityKind::raidisseur, make_rectangle(200, 0, 210, 10), 1.0});
    EXPECT_THROW(validate(p), ValidationError);
}

TEST(Promote, NormalIslandStays)
{
    const Pocket p = with_islands({IslandInfo{}});
    const Promotion r = promote_negative_islands(p);
    EXPECT_EQ(r.parent, p);
    EXPECT_TRUE(r.promoted.empty());
}

TEST(Promote, NegativeIslandBecomesPocket)
{
    const Pocket p = with_islands({IslandInfo{true, 5.0, false}});
    const Promotion r = promote_negative_islands(p);
    EXPECT_TRUE(r.parent.boundary.holes.empty());
    ASSERT_EQ(r.promoted.size(), 1u);
    EXPECT_DOUBLE_EQ(r.promoted[0].depth, 5.0);
    EXPECT_NEAR(area(pocket_area(r.promoted[0])), 100.0, 1e-9);
    EXPECT_NO_THROW(validate(r.promoted[0]));
}

TEST(Promote, TwoNegativeIslandsDisjointAndAreaConserved)
{
    const Pocket p = with_islands({IslandInfo{true, 5.0, false}, IslandInfo{true, {}, false}});
    const Promotion r = promote_negative_islands(p);
    ASSERT_EQ(r.promoted.size(), 2u);
    EXPECT_DOUBLE_EQ(r.promoted[1].depth, p.depth);
    EXPECT_TRUE(region_intersection(pocket_area(r.promoted[0]), pocket_area(r.promoted[1])).empty());
    const double before = area(pocket_area(p)) + 100.0 + 400.0;
    const double after = area(pocket_area(r.parent));
    EXPECT_NEAR(after, before, 1e-6);
    EXPECT_NEAR(area(pocket_area(r.promoted[0])) + area(pocket_area(r.promoted[1])), 500.0, 1e-6);
}

TEST(Promote, DeepNegativeIslandNeedsDepth)
{
    const Pocket p = with_islands({IslandInfo{true, {}, true}});
    EXPECT_THROW(promote_negative_islands(p), ValidationError);
}

TEST(Mask, NoEntities)
{
    const MaskResult m = mask_specific_entities(rectangle_pocket());
    EXPECT_NEAR(area(m.machinable), 5000.0, 1e-9);
    EXPECT_TRUE(m.reserved.empty());
}

TEST(Mask, ThinWallBandMatchesRaster)
{
    Pocket p = rectangle_pocket();
    p.boundary.outer = {{0, 0}, {100, 0}, {100, 80}, {0, 80}};
    p.entities.push_back({EntityKind::thin_wall, make_rectangle(49, 20, 51, 60), 3.0});
    const MaskResult m = mask_specific_entities(p);
    const double band = 8.0 * 46.0 - (4.0 - std::numbers::pi) * 9.0;
    // flattened fillets lose at most tol x arc length
    EXPECT_NEAR(area(m.reserved), band, kDefaultTolerance * 2.0 * std::numbers::pi * 3.0);
    EXPECT_NEAR(area(m.machinable) + area(m.reserved), 8000.0, 0.01);

    const auto g = raster::frame(pocket_area(p), 0.05, 1.0);
    const auto wall = raster::rasterize(make_rectangle(49, 20, 51, 60), g);
    const auto oracle = raster::dilate(wall, 3.0 + 0.5 * g.h);
    EXPECT_LT(raster::xor_area(raster::rasterize(m.reserved, g), oracle), 0.01 * band);
}

TEST(Mask, StiffenerTouchingWallIsClipped)
{
    Pocket p = rectangle_pocket();
    p.entities.push_back({EntityKind::raidisseur, make_rectangle(-5, 20, 10, 30), 2.0});
    const MaskResult m = mask_specific_entities(p);
    const auto b = bounding_box(m.reserved);
    EXPECT_NEAR(b.min_x, 0.0, 1e-9);
    // the part outside the pocket is dropped: (10 + 2) x 14 minus two corner fillets
    const double expected = 12.0 * 14.0 - (1.0 - std::numbers::pi / 4.0) * 4.0 * 2.0;
    EXPECT_NEAR(area(m.reserved), expected, 0.05);
    EXPECT_NEAR(area(m.machinable) + area(m.reserved), 5000.0, 0.01);
}

TEST(Mask, DefaultMarginApplies)
{
    Pocket p = rectangle_pocket();
    p.entities.push_back({EntityKind::thin_wall, make_rectangle(49, 10, 51, 40), std::nullopt});
    const double a0 = area(mask_specific_entities(p, 0.0).reserved);
    const double a3 = area(mask_specific_entities(p, 3.0).reserved);
    EXPECT_NEAR(a0, 60.0, 1e-9);
    EXPECT_GT(a3, a0 + 100.0);
}

TEST(Mask, FullyReserved)
{
    Pocket p = rectangle_pocket();
    p.entities.push_back({EntityKind::thin_wall, make_rectangle(0, 0, 100, 50), 1.0});
    EXPECT_TRUE(mask_specific_entities(p).fully_reserved);
}
