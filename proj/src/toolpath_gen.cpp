#include "pocketforge/toolpath.hpp"

#include "pocketforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pocketforge {

namespace {

struct Pass {
    std::vector<Point> pts;
    bool closed = true;
};

void check_params(const Tool& tool, const StrategyParams& params)
{
    if (!(tool.diameter > 0.0)) throw ValidationError("bad_tool", "tool diameter must be > 0");
    if (!(params.stepover > 0.0)) throw ValidationError("bad_stepover", "stepover must be > 0");
    if (params.stepover > tool.diameter + kSnapEpsilon)
        throw ValidationError("stepover_exceeds_diameter",
                              "stepover larger than the tool diameter leaves uncut ridges");
    if (!(params.chord_tol > 0.0)) throw ValidationError("bad_tolerance", "chord tolerance must be > 0");
}

double segment_param(Point p, Point a, Point b)
{
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    return len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
}

/// Rotates a closed loop so it starts at the point of the loop nearest to p.
/// A vertex within `snap` of that point is used instead, so that joins do not
/// leave sliver segments behind.
Loop rotate_to_nearest(const Loop& loop, Point p, double snap = kSnapEpsilon)
{
    const std::size_t n = loop.size();
    std::size_t best_edge = 0;
    double best_t = 0.0, best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = loop[i], b = loop[(i + 1) % n];
        const double t = segment_param(p, a, b);
        const double d = distance(p, a + (b - a) * t);
        if (d < best_d) {
            best_d = d;
            best_edge = i;
            best_t = t;
        }
    }
    const Point a = loop[best_edge], b = loop[(best_edge + 1) % n];
    const Point q = a + (b - a) * best_t;
    Loop out;
    out.reserve(n + 1);
    std::size_t first = (best_edge + 1) % n;
    const double da = distance(q, a), db = distance(q, b);
    if (da <= snap && da <= db) {
        first = best_edge;
    } else if (db > snap) {
        out.push_back(q);
    }
    for (std::size_t k = 0; k < n; ++k) out.push_back(loop[(first + k) % n]);
    return out;
}

/// Re-starts a closed loop `dist` further along its travel direction.
Loop advance_start(const Loop& loop, double dist, double snap)
{
    const std::size_t n = loop.size();
    const double perimeter = loop_length(loop);
    if (n < 2 || perimeter <= 0.0) return loop;
    dist = std::fmod(dist, perimeter);
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = loop[i], b = loop[(i + 1) % n];
        const double len = distance(a, b);
        if (dist < len) {
            const Point q = a + (b - a) * (dist / len);
            return rotate_to_nearest(loop, q, snap);
        }
        dist -= len;
    }
    return loop;
}

double distance_to_loop(const Loop& loop, Point p)
{
    double best = std::numeric_limits<double>::infinity();
    for (const Point& v : loop) best = std::min(best, distance(v, p));
    return best;
}

class PathBuilder {
public:
    PathBuilder(Toolpath& path, LinkStyle links, double stepover)
        : path_(path), links_(links), stepover_(stepover)
    {
    }

    bool started() const { return started_; }
    Point position() const { return pos_; }
    void set_position(Point p) { pos_ = p; }

    void cut_loop(const Loop& loop)
    {
        if (loop.size() < 2) return;
        const double snap = 0.25 * stepover_;
        Loop ring = rotate_to_nearest(loop, pos_, snap);
        // HSM blends need run-in: start two stepovers further along the loop
        if (started_ && links_ == LinkStyle::hsm && distance(pos_, ring.front()) <= 1.5 * stepover_)
            ring = advance_start(ring, 2.0 * stepover_, snap);
        link_to(ring.front());
        for (std::size_t i = 0; i < ring.size(); ++i) cut_to(ring[(i + 1) % ring.size()]);
    }

    void cut_polyline(std::vector<Point> pts)
    {
        if (pts.empty()) return;
        if (distance(pts.back(), pos_) < distance(pts.front(), pos_)) std::reverse(pts.begin(), pts.end());
        link_to(pts.front());
        for (std::size_t i = 1; i < pts.size(); ++i) cut_to(pts[i]);
    }

    void link_to(Point p)
    {
        if (started_ && distance(pos_, p) > kSnapEpsilon)
            path_.moves.push_back(line_move(pos_, p, MoveIntent::link));
        pos_ = p;
        started_ = true;
    }

    void cut_to(Point p)
    {
        if (distance(pos_, p) > kSnapEpsilon) path_.moves.push_back(line_move(pos_, p, MoveIntent::cut));
        pos_ = p;
    }

private:
    Toolpath& path_;
    LinkStyle links_;
    double stepover_;
    Point pos_{};
    bool started_ = false;
};

std::vector<Loop> region_loops(const Region& region, double tol)
{
    std::vector<Loop> loops;
    for (const auto& part : region.parts) {
        loops.push_back(simplify_loop(part.outer, tol));
        for (const Loop& h : part.holes) loops.push_back(simplify_loop(h, tol));
    }
    return loops;
}

/// Cuts every loop, choosing the nearest remaining loop each time.
void cut_loops_nearest(PathBuilder& builder, std::vector<Loop> loops)
{
    while (!loops.empty()) {
        auto best = loops.begin();
        double best_d = std::numeric_limits<double>::infinity();
        for (auto it = loops.begin(); it != loops.end(); ++it) {
            const double d = distance_to_loop(*it, builder.position());
            if (d < best_d) {
                best_d = d;
                best = it;
            }
        }
        builder.cut_loop(*best);
        loops.erase(best);
    }
}

/// Medial pass of a thin region: the long axis of its minimum-area rectangle.
std::vector<Point> medial_segment(const Region& core)
{
    const OrientedRect rect = min_area_rect(core);
    const auto& c = rect.corner;
    const double side01 = distance(c[0], c[1]);
    const double side12 = distance(c[1], c[2]);
    if (side01 >= side12) return {(c[0] + c[3]) * 0.5, (c[1] + c[2]) * 0.5};
    return {(c[0] + c[1]) * 0.5, (c[2] + c[3]) * 0.5};
}

/// Innermost pass of a ring family whose next offset vanished.
std::optional<Pass> core_pass(const Region& leaf, double stepover, double tol)
{
    const double rho = max_inscribed_radius(leaf, tol);
    if (rho <= 0.5 * stepover) return std::nullopt;
    const double delta = std::min(0.1 * stepover, 0.5 * rho);
    const Region core = offset_region(leaf, -(rho - delta), tol);
    if (core.empty()) return std::nullopt;
    const OrientedRect rect = min_area_rect(core);
    const double short_side = std::min(distance(rect.corner[0], rect.corner[1]),
                                       distance(rect.corner[1], rect.corner[2]));
    if (short_side < 4.0 * delta || core.parts.size() > 1) return Pass{medial_segment(core), false};
    Pass pass;
    pass.pts = simplify_loop(core.parts.front().outer, tol);
    return pass;
}

struct RingNode {
    Region region;
    int parent = -1;
    std::vector<int> children;
    std::optional<Pass> core;
};

Point rotate(Point p, double c, double s) { return {p.x * c - p.y * s, p.x * s + p.y * c}; }

struct Interval {
    double y = 0.0;
    double x0 = 0.0;
    double x1 = 0.0;
};

std::vector<Interval> scan_line(const std::vector<Loop>& loops, double y)
{
    std::vector<double> xs;
    for (const Loop& loop : loops) {
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Point a = loop[i], b = loop[(i + 1) % loop.size()];
            if ((a.y <= y && y < b.y) || (b.y <= y && y < a.y))
                xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
        }
    }
    std::sort(xs.begin(), xs.end());
    std::vector<Interval> out;
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2)
        if (xs[i + 1] - xs[i] > kSnapEpsilon) out.push_back({y, xs[i], xs[i + 1]});
    return out;
}

using Chain = std::vector<Interval>;

std::vector<Chain> build_chains(const std::vector<std::vector<Interval>>& lines)
{
    std::vector<Chain> chains;
    std::vector<int> open; // chain indices extended on the previous line
    for (const auto& line : lines) {
        std::vector<int> next_open;
        std::vector<bool> taken(chains.size(), false);
        for (const Interval& iv : line) {
            int target = -1;
            for (int c : open) {
                if (taken[static_cast<std::size_t>(c)]) continue;
                const Interval& last = chains[static_cast<std::size_t>(c)].back();
                if (iv.x0 <= last.x1 && last.x0 <= iv.x1) {
                    target = c;
                    break;
                }
            }
            if (target < 0) {
                chains.push_back({iv});
                taken.push_back(true);
                next_open.push_back(static_cast<int>(chains.size()) - 1);
            } else {
                chains[static_cast<std::size_t>(target)].push_back(iv);
                taken[static_cast<std::size_t>(target)] = true;
                next_open.push_back(target);
            }
        }
        open = std::move(next_open);
    }
    return chains;
}

} // namespace

Toolpath spiral_path(const Region& zone, const Tool& tool, const StrategyParams& params,
                     std::optional<Point> start_near)
{
    check_params(tool, params);
    Toolpath path;
    path.tool = tool;
    if (zone.empty()) return path;

    // same slack as opening(), so a channel exactly one tool wide keeps its pass
    const double r = tool.radius() - 0.5 * params.chord_tol;
    const double s = params.stepover;
    const double tol = params.chord_tol;

    std::vector<RingNode> nodes;
    std::vector<int> previous;
    for (int level = 0;; ++level) {
        const Region eroded = offset_region(zone, -(r + level * s), tol);
        if (eroded.empty()) break;
        std::vector<int> current;
        for (Region& comp : components(eroded)) {
            RingNode node;
            const Point probe = comp.parts.front().outer.front();
            for (int p : previous)
                if (contains(nodes[static_cast<std::size_t>(p)].region, probe)) {
                    node.parent = p;
                    break;
                }
            if (level > 0 && node.parent < 0 && !previous.empty()) node.parent = previous.front();
            node.region = std::move(comp);
            nodes.push_back(std::move(node));
            const int id = static_cast<int>(nodes.size()) - 1;
            if (nodes.back().parent >= 0) nodes[static_cast<std::size_t>(nodes.back().parent)].children.push_back(id);
            current.push_back(id);
        }
        previous = std::move(current);
    }
    if (nodes.empty()) return path;
    for (RingNode& node : nodes)
        if (node.children.empty()) node.core = core_pass(node.region, s, tol);

    const bool inside_out = params.entry == EntryKind::spiral_plunge;
    PathBuilder builder(path, params.links, s);
    if (start_near) {
        builder.set_position(*start_near);
    } else {
        // deepest ring family first
        const RingNode& deepest = nodes.back();
        builder.set_position(deepest.core && !deepest.core->pts.empty() ? deepest.core->pts.front()
                                                                        : deepest.region.parts.front().outer.front());
    }

    auto nearest_first = [&](std::vector<int> ids) {
        std::vector<int> order;
        Point from = builder.position();
        while (!ids.empty()) {
            auto best = std::min_element(ids.begin(), ids.end(), [&](int a, int b) {
                const auto& ra = nodes[static_cast<std::size_t>(a)].region.parts.front().outer;
                const auto& rb = nodes[static_cast<std::size_t>(b)].region.parts.front().outer;
                return distance_to_loop(ra, from) < distance_to_loop(rb, from);
            });
            order.push_back(*best);
            ids.erase(best);
        }
        return order;
    };

    auto cut_core = [&](const RingNode& node) {
        if (!node.core) return;
        if (node.core->closed)
            builder.cut_loop(node.core->pts);
        else
            builder.cut_polyline(node.core->pts);
    };

    auto visit = [&](auto&& self, int id) -> void {
        const RingNode& node = nodes[static_cast<std::size_t>(id)];
        if (inside_out) {
            for (int child : nearest_first(node.children)) self(self, child);
            cut_core(node);
            cut_loops_nearest(builder, region_loops(node.region, tol));
        } else {
            cut_loops_nearest(builder, region_loops(node.region, tol));
            cut_core(node);
            for (int child : nearest_first(node.children)) self(self, child);
        }
    };

    std::vector<int> roots;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].parent < 0) roots.push_back(static_cast<int>(i));
    if (inside_out) {
        // greedy order by the deepest descendant so the plunge lands in the largest family
        for (int root : nearest_first(roots)) visit(visit, root);
    } else {
        for (int root : nearest_first(roots)) visit(visit, root);
    }

    path = fit_arcs(path, tol);
    if (params.links == LinkStyle::hsm) {
        const Region centre = offset_region(zone, -(r - tol), tol);
        path = hsm_links(path, LinkStyle::hsm, s, &centre);
    }
    return path;
}

Toolpath zigzag_path(const Region& zone, const Tool& tool, const StrategyParams& params,
                     std::optional<Point> start_near)
{
    check_params(tool, params);
    Toolpath path;
    path.tool = tool;
    if (zone.empty()) return path;

    const double r = tool.radius() - 0.5 * params.chord_tol;
    const double s = params.stepover;
    const double tol = params.chord_tol;
    const double c = std::cos(params.zigzag_direction);
    const double sn = std::sin(params.zigzag_direction);

    PathBuilder builder(path, params.links, s);
    const Region centre = offset_region(zone, -r, tol);
    if (centre.empty()) {
        // band degenerates: a single pass along the medial line
        const double rho = max_inscribed_radius(zone, tol);
        const Region core = offset_region(zone, -std::max(0.0, rho - std::min(0.1 * s, 0.5 * rho)), tol);
        if (core.empty()) return path;
        builder.set_position(start_near.value_or(core.parts.front().outer.front()));
        builder.cut_polyline(medial_segment(core));
        return path;
    }

    // work in a frame where passes run along +x
    std::vector<Loop> frame_loops = region_loops(centre, tol);
    for (Loop& loop : frame_loops)
        for (Point& p : loop) p = rotate(p, c, -sn);
    double y_min = std::numeric_limits<double>::infinity(), y_max = -y_min;
    for (const Loop& loop : frame_loops)
        for (const Point& p : loop) {
            y_min = std::min(y_min, p.y);
            y_max = std::max(y_max, p.y);
        }
    const double band = y_max - y_min;
    const int pass_count = static_cast<int>(std::floor(band / s + 1e-9)) + 1;
    const double nudge = std::min(1e-3, 0.25 * band);
    // centred in the band so that opposite directions give mirrored passes
    const double first = y_min + 0.5 * (band - (pass_count - 1) * s);
    std::vector<std::vector<Interval>> lines;
    for (int k = 0; k < pass_count; ++k) {
        const double y = std::clamp(first + k * s, y_min + nudge, y_max - nudge);
        lines.push_back(scan_line(frame_loops, y));
    }
    std::vector<Chain> chains = build_chains(lines);

    const bool hsm = params.links == LinkStyle::hsm;
    const double trim = hsm ? 0.5 * s : 0.0;
    auto to_world = [&](Point p) { return rotate(p, c, sn); };
    builder.set_position(start_near.value_or(to_world({frame_loops.front().front().x, y_min})));

    std::vector<bool> done(chains.size(), false);
    for (std::size_t remaining = chains.size(); remaining > 0; --remaining) {
        // nearest chain end; candidates: {first/last line} x {left/right start}
        const Point here = rotate(builder.position(), c, -sn);
        std::size_t best_chain = 0;
        bool best_reverse = false, best_left = true;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t ci = 0; ci < chains.size(); ++ci) {
            if (done[ci]) continue;
            for (int rev = 0; rev < 2; ++rev) {
                const Interval& iv = rev ? chains[ci].back() : chains[ci].front();
                for (int left = 0; left < 2; ++left) {
                    const Point p{left ? iv.x0 : iv.x1, iv.y};
                    const double d = distance(p, here);
                    if (d < best_d) {
                        best_d = d;
                        best_chain = ci;
                        best_reverse = rev != 0;
                        best_left = left != 0;
                    }
                }
            }
        }
        done[best_chain] = true;
        Chain chain = chains[best_chain];
        if (best_reverse) std::reverse(chain.begin(), chain.end());
        bool left_to_right = best_left;
        for (std::size_t j = 0; j < chain.size(); ++j) {
            const Interval& iv = chain[j];
            double a = left_to_right ? iv.x0 : iv.x1;
            double b = left_to_right ? iv.x1 : iv.x0;
            const double dir = left_to_right ? 1.0 : -1.0;
            const double length = iv.x1 - iv.x0;
            // pull pass ends back so the HSM blend stays inside the band
            if (trim > 0.0 && length > 4.0 * trim) {
                if (j > 0) a += dir * trim;
                if (j + 1 < chain.size()) b -= dir * trim;
            }
            builder.link_to(to_world({a, iv.y}));
            builder.cut_to(to_world({b, iv.y}));
            left_to_right = !left_to_right;
        }
    }

    // finishing contour on the tool-centre boundary
    cut_loops_nearest(builder, region_loops(centre, tol));

    path = fit_arcs(path, tol);
    if (hsm) {
        const Region check = offset_region(zone, -(r - tol), tol);
        path = hsm_links(path, LinkStyle::hsm, s, &check);
    }
    return path;
}

std::vector<Move> entry_path(const Region& zone, const PocketClass& cls, const Tool& tool,
                             const StrategyParams& params, const Toolpath& body, double depth)
{
    (void)params;
    std::vector<Move> entry;
    if (zone.empty()) return entry;
    const double r = tool.radius();

    if (cls.closure != Closure::closed) {
        if (body.moves.empty()) return entry;
        const Move& first = body.moves.front();
        // quarter circle of tool radius arriving tangent to the first move,
        // from the side lying outside the zone when possible
        const Point p = first.start;
        const Point t = first.start_tangent();
        const Point left = p + perp(t) * r - t * r;
        const Point right = p - perp(t) * r - t * r;
        auto depth_inside = [&](Point q) {
            const double d = distance_to_boundary(zone, q);
            return contains(zone, q) ? d : -d;
        };
        const bool use_left = depth_inside(left) <= depth_inside(right);
        const Point start = use_left ? left : right;
        const Point centre = p + perp(t) * (use_left ? r : -r);
        entry.push_back(arc_move(start, p, centre, use_left, MoveIntent::entry));
        return entry;
    }

    if (tool.plunge == PlungeStyle::axial) return entry;

    const InscribedDisk disk = deepest_point(zone, 0.01);
    const double room = disk.radius - r;
    const double min_helix = std::max(0.1 * r, 2.0 * kDefaultTolerance);
    if (room < min_helix)
        throw InfeasibleError("no_plunge_room", "closed zone too small for a helical plunge (clearance " +
                                                    std::to_string(room) + " mm)");
    const double helix = std::min(r, room);
    const double ramp_deg = tool.plunge == PlungeStyle::ramp ? 5.0 : 3.0;
    const double pitch = 2.0 * std::numbers::pi * helix * std::tan(ramp_deg * std::numbers::pi / 180.0);
    const int turns = std::max(1, static_cast<int>(std::ceil(depth / pitch - 1e-9)));
    const Point c = disk.center;
    const Point a{c.x + helix, c.y};
    const Point b{c.x - helix, c.y};
    for (int k = 0; k < turns; ++k) {
        entry.push_back(arc_move(a, b, c, true, MoveIntent::entry));
        entry.push_back(arc_move(b, a, c, true, MoveIntent::entry));
    }
    if (body.moves.empty()) return entry;
    const Point target = body.moves.front().start;
    if (distance(a, target) > kSnapEpsilon) entry.push_back(line_move(a, target, MoveIntent::entry));
    return entry;
}

Toolpath generate_toolpath(const Region& zone, const PocketClass& cls, const Tool& tool,
                           const StrategyParams& params, double depth, double feed,
                           std::optional<Point> start_near)
{
    Toolpath body = params.mode == PathMode::spiral ? spiral_path(zone, tool, params, start_near)
                                                    : zigzag_path(zone, tool, params, start_near);
    if (params.corner_radius > 0.0) body = cornerize(body, params.corner_radius);
    Toolpath path = body;
    path.moves = entry_path(zone, cls, tool, params, body, depth);
    path.moves.insert(path.moves.end(), body.moves.begin(), body.moves.end());
    path.feed = feed;
    if (cls.closure == Closure::closed && tool.plunge == PlungeStyle::axial) path.axial_plunge = depth;
    return path;
}

} // namespace pocketforge
