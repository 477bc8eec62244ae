#include "pocketforge/kinematics.hpp"

#include "pocketforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pocketforge {

namespace {

constexpr double kContinuityTol = 1e-3;

bool is_soft(const MachineParams& m) { return m.mode == AccelMode::soft; }

void check_machine(const MachineParams& m)
{
    if (!(m.a_max > 0.0)) throw ValidationError("bad_machine", "a_max must be > 0");
    if (is_soft(m) && !(m.jerk > 0.0)) throw ValidationError("bad_machine", "jerk must be > 0 in soft mode");
    if (m.lookahead < 1) throw ValidationError("bad_machine", "lookahead must be >= 1");
    if (m.corner_dv < 0.0) throw ValidationError("bad_machine", "corner_dv must be >= 0");
    if (m.block_time < 0.0) throw ValidationError("bad_machine", "block_time must be >= 0");
}

// Highest speed <= cap reachable from v0 within d.
double reach(double v0, double d, double cap, const MachineParams& m)
{
    if (cap <= v0) return cap;
    if (transition_distance(v0, cap, m) <= d) return cap;
    if (!is_soft(m)) return std::sqrt(v0 * v0 + 2.0 * m.a_max * d);
    double lo = v0, hi = cap;
    for (int i = 0; i < 60 && hi - lo > 1e-9 * (1.0 + hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (transition_distance(v0, mid, m) <= d)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

void append_transition(std::vector<Phase>& out, double v0, double v1, const MachineParams& m)
{
    const double dv = std::abs(v1 - v0);
    if (dv <= 0.0) return;
    const double sign = v1 > v0 ? 1.0 : -1.0;
    const double a = m.a_max;
    if (!is_soft(m)) {
        out.push_back({dv / a, v0, sign * a, 0.0});
        return;
    }
    const double j = m.jerk;
    if (dv >= a * a / j) {
        const double t1 = a / j;
        const double t2 = dv / a - a / j;
        Phase up{t1, v0, 0.0, sign * j};
        Phase hold{t2, up.speed_at(t1), sign * a, 0.0};
        Phase down{t1, hold.speed_at(t2), sign * a, -sign * j};
        out.push_back(up);
        if (t2 > 0.0) out.push_back(hold);
        out.push_back(down);
    } else {
        const double ap = std::sqrt(dv * j);
        const double t1 = ap / j;
        Phase up{t1, v0, 0.0, sign * j};
        Phase down{t1, up.speed_at(t1), sign * ap, -sign * j};
        out.push_back(up);
        out.push_back(down);
    }
}

BlockPlan plan_block(double length, double cap, double va, double vb, const MachineParams& m)
{
    BlockPlan b;
    b.length = length;
    b.cap = cap;
    b.v_entry = va;
    b.v_exit = vb;
    const double base = std::max(va, vb);
    auto fits = [&](double vp) {
        return transition_distance(va, vp, m) + transition_distance(vp, vb, m) <= length * (1.0 + 1e-12);
    };
    double vp = base;
    if (fits(cap)) {
        vp = cap;
    } else if (!is_soft(m)) {
        vp = std::clamp(std::sqrt(0.5 * (2.0 * m.a_max * length + va * va + vb * vb)), base, cap);
    } else {
        double lo = base, hi = cap;
        for (int i = 0; i < 60 && hi - lo > 1e-9 * (1.0 + hi); ++i) {
            const double mid = 0.5 * (lo + hi);
            if (fits(mid))
                lo = mid;
            else
                hi = mid;
        }
        vp = lo;
    }
    b.v_peak = vp;
    append_transition(b.phases, va, vp, m);
    const double cruise = length - transition_distance(va, vp, m) - transition_distance(vp, vb, m);
    if (cruise > 0.0 && vp > 0.0) b.phases.push_back({cruise / vp, vp, 0.0, 0.0});
    append_transition(b.phases, vp, vb, m);
    for (const Phase& p : b.phases) b.time += p.duration;
    return b;
}

double phase_time_at_distance(const Phase& p, double d)
{
    double lo = 0.0, hi = p.duration;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (p.distance_at(mid) < d)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct Located {
    const Phase* phase = nullptr;
    double t = 0.0;
    double v = 0.0;
};

Located locate(const SimResult& r, double s)
{
    Located out;
    if (r.blocks.empty()) return out;
    s = std::clamp(s, 0.0, r.length);
    double start = 0.0;
    for (const BlockPlan& b : r.blocks) {
        if (s <= start + b.length || &b == &r.blocks.back()) {
            double local = s - start;
            for (const Phase& p : b.phases) {
                const double d = p.distance();
                if (local <= d || &p == &b.phases.back()) {
                    out.phase = &p;
                    out.t = phase_time_at_distance(p, std::min(local, d));
                    out.v = p.speed_at(out.t);
                    return out;
                }
                local -= d;
            }
            out.v = b.v_exit;
            return out;
        }
        start += b.length;
    }
    return out;
}

} // namespace

double Phase::distance() const { return distance_at(duration); }

const char* to_string(AccelMode m) { return m == AccelMode::brisk ? "brisk" : "soft"; }

const std::vector<double>& default_histogram_edges()
{
    static const std::vector<double> edges{0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
    return edges;
}

double arc_feed_limit(double r, double v_f, double a_max)
{
    if (!(r > 0.0)) throw ValidationError("bad_radius", "arc radius must be > 0");
    return std::min(v_f, std::sqrt(r * a_max));
}

double corner_speed_limit(Point dir_in, Point dir_out, double v, const MachineParams& machine)
{
    const Point jump = dir_out - dir_in;
    const double worst = std::max(std::abs(jump.x), std::abs(jump.y));
    if (worst <= 1e-12) return v;
    return std::min(v, machine.corner_dv / worst);
}

double transition_time(double v0, double v1, const MachineParams& machine)
{
    const double dv = std::abs(v1 - v0);
    const double a = machine.a_max;
    if (!is_soft(machine)) return dv / a;
    const double j = machine.jerk;
    if (dv >= a * a / j) return dv / a + a / j;
    return 2.0 * std::sqrt(dv / j);
}

double transition_distance(double v0, double v1, const MachineParams& machine)
{
    return 0.5 * (v0 + v1) * transition_time(v0, v1, machine);
}

double reachable_speed(double v0, double d, const MachineParams& machine)
{
    return reach(v0, d, std::numeric_limits<double>::max(), machine);
}

SimResult plan_profile(const Toolpath& path, const MachineParams& machine, double v_f)
{
    check_machine(machine);
    if (!(v_f > 0.0)) throw ValidationError("bad_feed", "programmed feed must be > 0");

    std::vector<const Move*> moves;
    for (std::size_t i = 0; i < path.moves.size(); ++i) {
        const Move& m = path.moves[i];
        if (!moves.empty() && distance(moves.back()->end, m.start) > kContinuityTol)
            throw ValidationError("non_contiguous", "move " + std::to_string(i) + " does not start where the previous ends");
        if (m.length() > kSnapEpsilon) moves.push_back(&m);
    }

    SimResult out;
    const std::size_t n = moves.size();
    if (n == 0) return out;

    std::vector<double> len(n), cap(n);
    for (std::size_t k = 0; k < n; ++k) {
        len[k] = moves[k]->length();
        cap[k] = v_f;
        if (moves[k]->is_arc()) cap[k] = arc_feed_limit(moves[k]->radius(), v_f, machine.a_max);
        if (machine.block_time > 0.0) cap[k] = std::min(cap[k], len[k] / machine.block_time);
        out.length += len[k];
    }

    // junction k sits at the start of block k; junction n is the path end
    std::vector<double> v(n + 1, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        if (!machine.anticipation) continue;
        const double corner = corner_speed_limit(moves[k - 1]->end_tangent(), moves[k]->start_tangent(), v_f, machine);
        v[k] = std::min({corner, cap[k - 1], cap[k]});
    }

    if (machine.anticipation) {
        // the controller only sees `lookahead` blocks: entering block k it must
        // be able to stop by the end of block k + lookahead - 1
        const std::size_t window = static_cast<std::size_t>(machine.lookahead);
        if (window < n) {
            std::vector<double> limit(n + 1, 0.0);
            for (std::size_t k = 1; k < n; ++k) {
                const std::size_t end = std::min(n, k + window);
                double w = 0.0;
                for (std::size_t m = end; m-- > k;) {
                    w = reach(w, len[m], cap[m], machine);
                    if (m > k) w = std::min(w, v[m]);
                }
                limit[k] = w;
            }
            for (std::size_t k = 1; k < n; ++k) v[k] = std::min(v[k], limit[k]);
        }
    }

    for (std::size_t k = n; k-- > 0;) v[k] = std::min(v[k], reach(v[k + 1], len[k], cap[k], machine));
    for (std::size_t k = 0; k < n; ++k) v[k + 1] = std::min(v[k + 1], reach(v[k], len[k], cap[k], machine));

    out.blocks.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.blocks.push_back(plan_block(len[k], cap[k], v[k], v[k + 1], machine));
        out.time += out.blocks.back().time;
    }
    out.min_speed = 0.0;
    if (n > 1) out.min_speed = *std::min_element(v.begin() + 1, v.end() - 1);

    const std::size_t samples = std::max<std::size_t>(200, static_cast<std::size_t>(std::ceil(out.length)) + 1);
    out.profile.reserve(samples);
    // walk blocks and phases once instead of locating every sample from scratch
    std::size_t bi = 0, pi = 0;
    double block_start = 0.0, phase_start = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double s = out.length * static_cast<double>(i) / static_cast<double>(samples - 1);
        while (bi + 1 < n && s > block_start + out.blocks[bi].length) {
            block_start += out.blocks[bi].length;
            ++bi;
            pi = 0;
            phase_start = 0.0;
        }
        const BlockPlan& b = out.blocks[bi];
        double local = s - block_start;
        while (pi + 1 < b.phases.size() && local > phase_start + b.phases[pi].distance()) {
            phase_start += b.phases[pi].distance();
            ++pi;
        }
        double speed = b.v_exit;
        if (!b.phases.empty()) {
            const Phase& p = b.phases[pi];
            const double d = std::clamp(local - phase_start, 0.0, p.distance());
            speed = p.speed_at(phase_time_at_distance(p, d));
        }
        if (i + 1 == samples) speed = out.blocks.back().v_exit;
        out.profile.push_back({s, std::max(0.0, speed)});
    }
    return out;
}

double straight_move_time(double length, const MachineParams& machine, double v_f)
{
    if (!(length > 0.0)) return 0.0;
    Toolpath p;
    p.moves.push_back(line_move({0.0, 0.0}, {length, 0.0}));
    return plan_profile(p, machine, v_f).time;
}

SimResult simulate(const Toolpath& path, const MachineParams& machine, double v_f)
{
    SimResult out = plan_profile(path, machine, v_f);
    out.plunge_time = straight_move_time(path.axial_plunge, machine, v_f);
    out.time += out.plunge_time;
    out.cam_time = (path_length(path).total + path.axial_plunge) / v_f;
    out.histogram_edges = default_histogram_edges();
    out.histogram = segment_histogram(path, out.histogram_edges);
    return out;
}

double speed_at(const SimResult& result, double s) { return locate(result, s).v; }

double accel_at(const SimResult& result, double s)
{
    const Located l = locate(result, s);
    return l.phase ? l.phase->accel_at(l.t) : 0.0;
}

} // namespace pocketforge
