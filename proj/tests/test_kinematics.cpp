#include "pocketforge/errors.hpp"
#include "pocketforge/kinematics.hpp"

#include "support/corpus.hpp"
#include "support/raster.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace pocketforge;

namespace {

constexpr double kPi = std::numbers::pi;

MachineParams machine(double a_max, AccelMode mode = AccelMode::brisk)
{
    MachineParams m;
    m.a_max = a_max;
    m.mode = mode;
    return m;
}

Toolpath polyline(const std::vector<Point>& pts)
{
    Toolpath p;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) p.moves.push_back(line_move(pts[k], pts[k + 1]));
    return p;
}

// Lead-in line, full circle of radius r, lead-out line.
Toolpath circle_path(double r)
{
    Toolpath p;
    p.moves.push_back(line_move({-20, -r}, {0, -r}));
    p.moves.push_back(arc_move({0, -r}, {0, -r}, {0, 0}, true));
    p.moves.push_back(line_move({0, -r}, {20, -r}));
    return p;
}

double move_cap(const Move& m, double v_f, const MachineParams& mp)
{
    return m.is_arc() ? arc_feed_limit(m.radius(), v_f, mp.a_max) : v_f;
}

} // namespace

TEST(ArcFeedLimit, Examples)
{
    EXPECT_NEAR(arc_feed_limit(10.0, 166.67, 5000.0), 166.67, 1e-12);
    const double boundary = 166.67 * 166.67 / 5000.0;
    EXPECT_NEAR(arc_feed_limit(boundary, 166.67, 5000.0), 166.67, 1e-6 * 166.67);
    EXPECT_NEAR(arc_feed_limit(1.0, 166.67, 5000.0), std::sqrt(5000.0), 1e-9);
    EXPECT_THROW(arc_feed_limit(0.0, 166.67, 5000.0), ValidationError);
}

TEST(CornerSpeedLimit, Examples)
{
    const MachineParams m = machine(5000);
    EXPECT_DOUBLE_EQ(corner_speed_limit({1, 0}, {1, 0}, 166.67, m), 166.67);
    EXPECT_NEAR(corner_speed_limit({1, 0}, {-1, 0}, 166.67, m), 10.0, 1e-12);
    EXPECT_NEAR(corner_speed_limit({1, 0}, {0, 1}, 166.67, m), 20.0, 1e-12);
    // never above the programmed speed
    EXPECT_DOUBLE_EQ(corner_speed_limit({1, 0}, {0, 1}, 5.0, m), 5.0);
}

TEST(ClosedForm, TrapezoidLine)
{
    const MachineParams m = machine(1000);
    const double t = plan_profile(polyline({{0, 0}, {100, 0}}), m, 50.0).time;
    EXPECT_NEAR(t, 100.0 / 50.0 + 50.0 / 1000.0, 1e-4);
    EXPECT_NEAR(t, raster::integrate_line(100.0, 50.0, 1000.0), 1e-4);
}

TEST(ClosedForm, TriangleLine)
{
    const MachineParams m = machine(1000);
    const SimResult r = plan_profile(polyline({{0, 0}, {1, 0}}), m, 50.0);
    EXPECT_NEAR(r.time, 2.0 * std::sqrt(1.0 / 1000.0), 1e-4);
    EXPECT_NEAR(r.time, raster::integrate_line(1.0, 50.0, 1000.0), 1e-4);
    ASSERT_EQ(r.blocks.size(), 1u);
    EXPECT_NEAR(r.blocks[0].v_peak, std::sqrt(1000.0), 1e-9);
}

TEST(ClosedForm, SoftLineMatchesSCurve)
{
    // jerk-limited rest-to-rest: each transition takes V/a + a/j
    MachineParams m = machine(1000, AccelMode::soft);
    m.jerk = 20000;
    const double t = plan_profile(polyline({{0, 0}, {100, 0}}), m, 50.0).time;
    EXPECT_NEAR(t, 100.0 / 50.0 + 50.0 / 1000.0 + 1000.0 / 20000.0, 1e-4);
}

TEST(Plan, CollinearSplitIsTransparent)
{
    const MachineParams m = machine(1000);
    const double one = plan_profile(polyline({{0, 0}, {100, 0}}), m, 50.0).time;
    const double two = plan_profile(polyline({{0, 0}, {50, 0}, {100, 0}}), m, 50.0).time;
    EXPECT_NEAR(one, two, 1e-9);
}

TEST(Plan, NonContiguousRejected)
{
    Toolpath p;
    p.moves = {line_move({0, 0}, {10, 0}), line_move({11, 0}, {20, 0})};
    try {
        plan_profile(p, machine(1000), 50.0);
        FAIL() << "expected validation error";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.code(), "non_contiguous");
    }
}

TEST(Plan, BadMachineRejected)
{
    EXPECT_THROW(plan_profile(polyline({{0, 0}, {1, 0}}), machine(0), 50.0), ValidationError);
    MachineParams m = machine(1000);
    m.lookahead = 0;
    EXPECT_THROW(plan_profile(polyline({{0, 0}, {1, 0}}), m, 50.0), ValidationError);
    EXPECT_THROW(plan_profile(polyline({{0, 0}, {1, 0}}), machine(1000), 0.0), ValidationError);
}

TEST(Plan, EmptyPath)
{
    const SimResult r = plan_profile(Toolpath{}, machine(1000), 50.0);
    EXPECT_EQ(r.time, 0.0);
    EXPECT_TRUE(r.profile.empty());
}

TEST(Plan, ExactStopWithoutAnticipation)
{
    MachineParams m = machine(1000);
    const Toolpath p = polyline({{0, 0}, {50, 0}, {100, 0}});
    const double with = plan_profile(p, m, 50.0).time;
    m.anticipation = false;
    const SimResult r = plan_profile(p, m, 50.0);
    EXPECT_NEAR(r.time, 2.0 * (50.0 / 50.0 + 50.0 / 1000.0), 1e-9);
    EXPECT_GT(r.time, with);
    EXPECT_NEAR(speed_at(r, 50.0), 0.0, 1e-6);
}

TEST(Plan, BlockTimeCapsShortMoves)
{
    MachineParams m = machine(1e9);
    m.block_time = 0.012;
    const SimResult r = plan_profile(polyline({{0, 0}, {1, 0}, {2, 0}, {3, 0}}), m, 166.67);
    ASSERT_EQ(r.blocks.size(), 3u);
    for (const BlockPlan& b : r.blocks) EXPECT_NEAR(b.cap, 1.0 / 0.012, 1e-9);
    EXPECT_GE(r.time, 3.0 * 0.012 - 1e-9);
}

TEST(Simulate, LongSegmentsApproachCamTime)
{
    const MachineParams m = machine(5000);
    const double v_f = 166.67;
    const double threshold = v_f * v_f / m.a_max;
    double previous = std::numeric_limits<double>::infinity();
    for (double k : {1.0, 3.0, 10.0}) {
        const double l = k * threshold;
        const SimResult r = simulate(polyline({{0, 0}, {l, 0}, {l, l}, {0, l}, {0, 0}}), m, v_f);
        const double ratio = r.time / r.cam_time;
        EXPECT_LT(ratio, previous);
        previous = ratio;
        if (k == 10.0) EXPECT_LT(ratio, 1.1);
    }
}

TEST(Simulate, DiscretizedArcsSlower)
{
    // short blocks only cost time once the controller has a block cycle
    MachineParams m = machine(5000);
    m.block_time = 0.012;
    const Toolpath native = circle_path(5.0);
    const Toolpath flat = discretize_arcs(native, 0.01);
    // chords of about 0.6 mm
    EXPECT_NEAR(flat.moves[1].length(), 0.63, 0.01);
    const double tn = simulate(native, m, 166.67).time;
    const double td = simulate(flat, m, 166.67).time;
    EXPECT_GT(td, tn);
}

TEST(Simulate, CamTimeAndHistogram)
{
    Toolpath p = polyline({{0, 0}, {100, 0}, {100, 0.3}});
    p.axial_plunge = 5.0;
    const MachineParams m = machine(1000);
    const SimResult r = simulate(p, m, 50.0);
    EXPECT_NEAR(r.cam_time, (100.3 + 5.0) / 50.0, 1e-12);
    EXPECT_NEAR(r.plunge_time, straight_move_time(5.0, m, 50.0), 1e-12);
    ASSERT_EQ(r.histogram.size(), r.histogram_edges.size() + 1);
    EXPECT_EQ(r.histogram[1], 1u);
    EXPECT_EQ(r.histogram.back(), 1u);
}

TEST(Corpus, SoftNeverFasterThanBrisk)
{
    for (const Toolpath& p : corpus::path_corpus(20, 42)) {
        const double brisk = plan_profile(p, machine(5000), p.feed).time;
        const double soft = plan_profile(p, machine(5000, AccelMode::soft), p.feed).time;
        EXPECT_GE(soft, brisk - 1e-9);
    }
}

TEST(Corpus, MonotoneInAccelerationAndLookahead)
{
    for (const Toolpath& p : corpus::path_corpus(20, 42)) {
        for (AccelMode mode : {AccelMode::brisk, AccelMode::soft}) {
            double previous = std::numeric_limits<double>::infinity();
            for (double a : {500.0, 1000.0, 2500.0, 5000.0, 20000.0}) {
                const double t = plan_profile(p, machine(a, mode), p.feed).time;
                EXPECT_LE(t, previous + 1e-9);
                previous = t;
            }
            previous = std::numeric_limits<double>::infinity();
            for (int look : {1, 2, 5, 20, 200}) {
                MachineParams m = machine(1000, mode);
                m.lookahead = look;
                const double t = plan_profile(p, m, p.feed).time;
                EXPECT_LE(t, previous + 1e-9);
                previous = t;
            }
        }
    }
}

TEST(Corpus, TimeLowerBound)
{
    for (const Toolpath& p : corpus::path_corpus(20, 42)) {
        const MachineParams m = machine(2000);
        const SimResult r = simulate(p, m, p.feed);
        double capped = 0.0;
        for (const Move& mv : p.moves) capped += mv.length() / move_cap(mv, p.feed, m);
        EXPECT_GE(r.time, std::max(r.cam_time, capped) - 1e-9);
    }
}

TEST(Corpus, ProfileRespectsCapsAndAcceleration)
{
    for (const Toolpath& p : corpus::path_corpus(20, 42)) {
        const MachineParams m = machine(2000);
        const SimResult r = plan_profile(p, m, p.feed);
        ASSERT_GE(r.profile.size(), 200u);
        EXPECT_NEAR(r.profile.front().v, 0.0, 1e-9);
        EXPECT_NEAR(r.profile.back().v, 0.0, 1e-6);
        for (std::size_t k = 0; k < r.profile.size(); ++k) {
            const ProfileSample& q = r.profile[k];
            EXPECT_GE(q.v, 0.0);
            EXPECT_LE(q.v, p.feed + 1e-9);
            if (k == 0) continue;
            // |d(v^2)| <= 2 a ds: speed is continuous and acceleration bounded
            const ProfileSample& o = r.profile[k - 1];
            EXPECT_LE(std::abs(q.v * q.v - o.v * o.v), 2.0 * m.a_max * (q.s - o.s) * (1 + 1e-9) + 1e-6);
        }
        // per-move and junction caps at their positions
        double s = 0.0;
        for (std::size_t k = 0; k < p.moves.size(); ++k) {
            const Move& mv = p.moves[k];
            const double cap = move_cap(mv, p.feed, m);
            for (double f : {0.25, 0.5, 0.75}) EXPECT_LE(speed_at(r, s + f * mv.length()), cap + 1e-6);
            if (k > 0) {
                const double corner = corner_speed_limit(p.moves[k - 1].end_tangent(), mv.start_tangent(), p.feed, m);
                EXPECT_LE(speed_at(r, s), corner + 1e-6);
            }
            s += mv.length();
        }
    }
}

TEST(Corpus, SoftAccelerationContinuous)
{
    MachineParams m = machine(2000, AccelMode::soft);
    m.jerk = 50000;
    for (const Toolpath& p : corpus::path_corpus(20, 42)) {
        const SimResult r = plan_profile(p, m, p.feed);
        double a_prev = 0.0, v_prev = 0.0;
        for (const BlockPlan& b : r.blocks) {
            EXPECT_NEAR(b.v_entry, v_prev, 1e-9);
            for (const Phase& ph : b.phases) {
                EXPECT_NEAR(ph.a0, a_prev, 1e-6 * m.a_max);
                EXPECT_NEAR(ph.v0, v_prev, 1e-6 * p.feed);
                EXPECT_LE(std::abs(ph.accel_at(ph.duration)), m.a_max * (1 + 1e-9));
                a_prev = ph.accel_at(ph.duration);
                v_prev = ph.speed_at(ph.duration);
            }
            v_prev = b.v_exit;
        }
        EXPECT_NEAR(a_prev, 0.0, 1e-6 * m.a_max);
    }
}

TEST(Corpus, LargeJerkApproachesBrisk)
{
    MachineParams soft = machine(2000, AccelMode::soft);
    soft.jerk = 1e9;
    for (const Toolpath& p : corpus::path_corpus(5, 9)) {
        const double tb = plan_profile(p, machine(2000), p.feed).time;
        const double ts = plan_profile(p, soft, p.feed).time;
        EXPECT_NEAR(ts, tb, 1e-3 * tb);
    }
}

TEST(SpeedAt, ReadsTrapezoid)
{
    const SimResult r = plan_profile(polyline({{0, 0}, {100, 0}}), machine(1000), 50.0);
    EXPECT_NEAR(speed_at(r, 50.0), 50.0, 1e-9);
    EXPECT_NEAR(speed_at(r, 0.25), std::sqrt(2.0 * 1000.0 * 0.25), 1e-6);
    EXPECT_NEAR(accel_at(r, 0.25), 1000.0, 1e-9);
    EXPECT_NEAR(accel_at(r, 99.9), -1000.0, 1e-9);
}
