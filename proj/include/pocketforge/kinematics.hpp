#pragma once

#include "pocketforge/toolpath.hpp"

#include <cstddef>
#include <vector>

namespace pocketforge {

enum class AccelMode { brisk, soft };

struct MachineParams {
    double a_max = 5000.0;     // mm/s^2
    double jerk = 100000.0;    // mm/s^3, soft mode only
    AccelMode mode = AccelMode::brisk;
    int lookahead = 50;        // blocks of forward visibility
    bool anticipation = true;  // false: exact stop at every block boundary
    double corner_dv = 20.0;   // per-axis velocity jump allowed at a junction, mm/s
    /// Minimum execution time of one block (interpolator cycle), s; 0 disables.
    double block_time = 0.0;

    friend bool operator==(const MachineParams&, const MachineParams&) = default;
};

/// Constant-jerk piece of a velocity profile.
struct Phase {
    double duration = 0.0;
    double v0 = 0.0;
    double a0 = 0.0;
    double jerk = 0.0;

    double distance() const;
    double speed_at(double t) const { return v0 + a0 * t + 0.5 * jerk * t * t; }
    double accel_at(double t) const { return a0 + jerk * t; }
    double distance_at(double t) const { return v0 * t + 0.5 * a0 * t * t + jerk * t * t * t / 6.0; }
};

struct BlockPlan {
    double length = 0.0;
    double cap = 0.0;     // per-move speed cap
    double v_entry = 0.0;
    double v_exit = 0.0;
    double v_peak = 0.0;
    double time = 0.0;
    std::vector<Phase> phases;
};

struct ProfileSample {
    double s = 0.0; // mm
    double v = 0.0; // mm/s
};

struct SimResult {
    double time = 0.0;       // s, XY path plus axial plunge
    double cam_time = 0.0;   // path length / V_f
    double plunge_time = 0.0;
    double min_speed = 0.0;  // over interior junctions, mm/s
    double length = 0.0;
    std::vector<ProfileSample> profile;
    std::vector<double> histogram_edges;
    std::vector<std::size_t> histogram;
    std::vector<BlockPlan> blocks;
};

double arc_feed_limit(double r, double v_f, double a_max);

/// Largest junction speed keeping every per-axis velocity jump within corner_dv.
double corner_speed_limit(Point dir_in, Point dir_out, double v, const MachineParams& machine);

/// Distance and duration of a speed change v0 -> v1 under the machine's
/// acceleration mode (trapezoid for brisk, S-curve with zero end
/// acceleration for soft).
double transition_distance(double v0, double v1, const MachineParams& machine);
double transition_time(double v0, double v1, const MachineParams& machine);

/// Highest speed reachable from v0 within distance d.
double reachable_speed(double v0, double d, const MachineParams& machine);

SimResult plan_profile(const Toolpath& path, const MachineParams& machine, double v_f);

/// plan_profile plus histogram, CAM time and the axial plunge.
SimResult simulate(const Toolpath& path, const MachineParams& machine, double v_f);

/// Rest-to-rest time of a single straight move.
double straight_move_time(double length, const MachineParams& machine, double v_f);

double speed_at(const SimResult& result, double s);
double accel_at(const SimResult& result, double s);

/// Default histogram bin edges in mm.
const std::vector<double>& default_histogram_edges();

const char* to_string(AccelMode m);

} // namespace pocketforge
