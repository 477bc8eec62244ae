#include "pocketforge/toolpath.hpp"

#include "pocketforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace pocketforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAngleEps = 1e-9;

Move reversed(const Move& m)
{
    Move r = m;
    std::swap(r.start, r.end);
    if (m.kind == MoveKind::arc_ccw) r.kind = MoveKind::arc_cw;
    if (m.kind == MoveKind::arc_cw) r.kind = MoveKind::arc_ccw;
    return r;
}

// Circular arc leaving p with unit tangent t and ending at q; a line when q
// lies on the tangent.
Move arc_from_tangent(Point p, Point t, Point q, MoveIntent intent)
{
    const Point n = perp(t);
    const Point w = q - p;
    const double denom = 2.0 * dot(n, w);
    if (std::abs(denom) <= 1e-12 * std::max(1.0, norm(w))) return line_move(p, q, intent);
    const double lambda = dot(w, w) / denom;
    if (std::abs(lambda) > 1e3 * norm(w)) return line_move(p, q, intent);
    return arc_move(p, q, p + n * lambda, lambda > 0.0, intent);
}

// Biarc blend between (p1, t1) and (p2, t2); empty when no forward solution exists.
std::vector<Move> biarc(Point p1, Point t1, Point p2, Point t2, MoveIntent intent)
{
    const Point v = p2 - p1;
    if (norm(v) < kSnapEpsilon) return {};
    const Point t = t1 + t2;
    const double vt = dot(v, t);
    const double denom = 2.0 * (1.0 - dot(t1, t2));
    double d = 0.0;
    if (denom < 1e-9) {
        const double vt2 = dot(v, t2);
        if (vt2 <= 1e-9 * norm(v)) return {};
        d = dot(v, v) / (4.0 * vt2);
    } else {
        d = (-vt + std::sqrt(vt * vt + denom * dot(v, v))) / denom;
    }
    if (!(d > 0.0)) return {};
    const Point pm = (p1 + p2 + (t1 - t2) * d) * 0.5;
    std::vector<Move> out;
    if (distance(p1, pm) > kSnapEpsilon) out.push_back(arc_from_tangent(p1, t1, pm, intent));
    if (distance(pm, p2) > kSnapEpsilon) out.push_back(reversed(arc_from_tangent(p2, t2 * -1.0, pm, intent)));
    return out;
}

bool inside_with_tol(const Region& region, Point p, double tol)
{
    return contains(region, p) || distance_to_boundary(region, p) <= tol;
}

Point point_on_arc(const Move& m, double fraction)
{
    const double r = m.radius();
    const double a0 = std::atan2(m.start.y - m.center.y, m.start.x - m.center.x);
    const double sign = m.kind == MoveKind::arc_ccw ? 1.0 : -1.0;
    const double a = a0 + sign * fraction * m.sweep();
    return {m.center.x + r * std::cos(a), m.center.y + r * std::sin(a)};
}

bool moves_inside(const std::vector<Move>& moves, const Region& region, double tol)
{
    for (const Move& m : moves) {
        const int samples = std::max(2, static_cast<int>(std::ceil(m.length() / 0.25)));
        for (int i = 0; i <= samples; ++i) {
            const double f = static_cast<double>(i) / samples;
            const Point p = m.is_arc() ? point_on_arc(m, f) : m.start + (m.end - m.start) * f;
            if (!inside_with_tol(region, p, tol)) return false;
        }
    }
    return true;
}

bool cornerable(const Move& a, const Move& b)
{
    if (a.kind != MoveKind::line || b.kind != MoveKind::line) return false;
    if (a.intent != MoveIntent::cut || b.intent != MoveIntent::cut) return false;
    if (distance(a.end, b.start) > kSnapEpsilon) return false;
    if (a.length() < kSnapEpsilon || b.length() < kSnapEpsilon) return false;
    const double turn = std::acos(std::clamp(dot(a.start_tangent(), b.start_tangent()), -1.0, 1.0));
    return turn > kAngleEps && turn < std::numbers::pi - 1e-6;
}

} // namespace

const char* to_string(PlungeStyle p)
{
    switch (p) {
    case PlungeStyle::helical: return "helical";
    case PlungeStyle::ramp: return "ramp";
    case PlungeStyle::axial: return "axial";
    }
    return "helical";
}

const char* to_string(MoveKind k)
{
    switch (k) {
    case MoveKind::line: return "line";
    case MoveKind::arc_cw: return "arc_cw";
    case MoveKind::arc_ccw: return "arc_ccw";
    }
    return "line";
}

const char* to_string(MoveIntent i)
{
    switch (i) {
    case MoveIntent::cut: return "cut";
    case MoveIntent::entry: return "entry";
    case MoveIntent::link: return "link";
    case MoveIntent::exit: return "exit";
    }
    return "cut";
}

const char* to_string(PathMode m) { return m == PathMode::spiral ? "spiral" : "zigzag"; }
const char* to_string(LinkStyle l) { return l == LinkStyle::classic ? "classic" : "hsm"; }
const char* to_string(EntryKind e)
{
    return e == EntryKind::tangential_flank ? "tangential_flank" : "spiral_plunge";
}

double Move::radius() const { return is_arc() ? distance(start, center) : 0.0; }

double Move::sweep() const
{
    if (!is_arc()) return 0.0;
    const double a0 = std::atan2(start.y - center.y, start.x - center.x);
    const double a1 = std::atan2(end.y - center.y, end.x - center.x);
    double s = kind == MoveKind::arc_ccw ? a1 - a0 : a0 - a1;
    s = std::fmod(s, kTwoPi);
    if (s < 0.0) s += kTwoPi;
    if (s < kAngleEps) s = kTwoPi;
    return s;
}

double Move::length() const { return is_arc() ? radius() * sweep() : distance(start, end); }

Point Move::start_tangent() const
{
    if (!is_arc()) return normalized(end - start);
    const Point t = normalized(perp(start - center));
    return kind == MoveKind::arc_ccw ? t : t * -1.0;
}

Point Move::end_tangent() const
{
    if (!is_arc()) return normalized(end - start);
    const Point t = normalized(perp(end - center));
    return kind == MoveKind::arc_ccw ? t : t * -1.0;
}

Move line_move(Point a, Point b, MoveIntent intent) { return Move{MoveKind::line, a, b, {}, intent}; }

Move arc_move(Point a, Point b, Point center, bool ccw, MoveIntent intent)
{
    return Move{ccw ? MoveKind::arc_ccw : MoveKind::arc_cw, a, b, center, intent};
}

Toolpath cornerize(const Toolpath& path, double r)
{
    if (r < 0.0) throw ValidationError("bad_radius", "corner radius must be >= 0");
    if (r == 0.0 || path.moves.size() < 2) return path;

    const std::vector<Move>& in = path.moves;
    const std::size_t n = in.size();
    // corner[i] describes the junction between move i and move i+1
    std::vector<bool> corner(n, false);
    for (std::size_t i = 0; i + 1 < n; ++i) corner[i] = cornerable(in[i], in[i + 1]);

    std::vector<double> trim_start(n, 0.0), trim_end(n, 0.0);
    std::vector<std::optional<Move>> arc_after(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!corner[i]) continue;
        const Move& a = in[i];
        const Move& b = in[i + 1];
        const Point da = a.start_tangent(), db = b.start_tangent();
        const double turn = std::acos(std::clamp(dot(da, db), -1.0, 1.0));
        const double half_tan = std::tan(0.5 * turn);
        const double avail_a = (i > 0 && corner[i - 1]) ? 0.5 * a.length() : a.length();
        const double avail_b = (i + 2 < n && corner[i + 1]) ? 0.5 * b.length() : b.length();
        const double rho = std::min(r, std::min(avail_a, avail_b) / half_tan);
        const double tangent = rho * half_tan;
        if (rho <= kSnapEpsilon || tangent <= kSnapEpsilon) continue;
        trim_end[i] = tangent;
        trim_start[i + 1] = tangent;
        const Point p0 = a.end - da * tangent;
        const Point p1 = b.start + db * tangent;
        const bool left = cross(da, db) > 0.0;
        const Point centre = p0 + perp(da) * (left ? rho : -rho);
        arc_after[i] = arc_move(p0, p1, centre, left, MoveIntent::cut);
    }

    Toolpath out = path;
    out.moves.clear();
    out.moves.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        Move m = in[i];
        if (trim_start[i] > 0.0 || trim_end[i] > 0.0) {
            const Point d = m.start_tangent();
            const Point s = m.start + d * trim_start[i];
            const Point e = m.end - d * trim_end[i];
            if (dot(e - s, d) > kSnapEpsilon) {
                m.start = s;
                m.end = e;
                out.moves.push_back(m);
            }
        } else {
            out.moves.push_back(m);
        }
        if (arc_after[i]) out.moves.push_back(*arc_after[i]);
    }
    // keep exact C0 where a fully consumed leg left two arcs adjacent
    for (std::size_t i = 1; i < out.moves.size(); ++i)
        if (distance(out.moves[i - 1].end, out.moves[i].start) <= 10.0 * kSnapEpsilon)
            out.moves[i].start = out.moves[i - 1].end;
    return out;
}

Toolpath hsm_links(const Toolpath& path, LinkStyle style, double stepover, const Region* centre_region)
{
    if (style == LinkStyle::classic) return path;
    Toolpath out = path;
    out.moves.clear();
    const std::vector<Move>& in = path.moves;
    for (std::size_t i = 0; i < in.size(); ++i) {
        const Move& link = in[i];
        const bool blendable = link.intent == MoveIntent::link && link.kind == MoveKind::line && i > 0 &&
                               i + 1 < in.size() && link.length() > kSnapEpsilon &&
                               link.length() <= 3.0 * stepover + kSnapEpsilon;
        if (!blendable) {
            out.moves.push_back(link);
            continue;
        }
        const Point t0 = in[i - 1].end_tangent();
        const Point t1 = in[i + 1].start_tangent();
        const Point chord = link.end - link.start;
        std::vector<Move> blend;
        if (dot(t0, t1) < -1.0 + 1e-6 && std::abs(dot(normalized(chord), t0)) < 1e-6) {
            const bool ccw = dot(perp(link.start - link.end), t0) > 0.0;
            blend.push_back(arc_move(link.start, link.end, (link.start + link.end) * 0.5, ccw, MoveIntent::link));
        } else {
            blend = biarc(link.start, t0, link.end, t1, MoveIntent::link);
        }
        const double tol = kDefaultTolerance;
        if (blend.empty() || (centre_region && !moves_inside(blend, *centre_region, tol))) {
            out.flags.push_back("hsm_link_fallback:" + std::to_string(i));
            out.moves.push_back(link);
            continue;
        }
        blend.front().start = link.start;
        blend.back().end = link.end;
        out.moves.insert(out.moves.end(), blend.begin(), blend.end());
    }
    return out;
}

Toolpath discretize_arcs(const Toolpath& path, double chord_tol)
{
    if (!(chord_tol > 0.0)) throw ValidationError("bad_tolerance", "chord tolerance must be positive");
    Toolpath out = path;
    out.moves.clear();
    out.moves.reserve(path.moves.size());
    for (const Move& m : path.moves) {
        if (!m.is_arc()) {
            out.moves.push_back(m);
            continue;
        }
        const double r = m.radius();
        const double sweep = m.sweep();
        std::size_t count = static_cast<std::size_t>(std::ceil(sweep / std::numbers::pi - 1e-12));
        if (chord_tol < r) {
            const double step = 2.0 * std::acos(1.0 - chord_tol / r);
            count = std::max(count, static_cast<std::size_t>(std::ceil(sweep / step - 1e-12)));
        }
        count = std::max<std::size_t>(count, 1);
        Point prev = m.start;
        for (std::size_t k = 1; k <= count; ++k) {
            const Point next = k == count ? m.end : point_on_arc(m, static_cast<double>(k) / count);
            out.moves.push_back(line_move(prev, next, m.intent));
            prev = next;
        }
    }
    return out;
}

namespace {

std::optional<Point> circumcenter(Point a, Point b, Point c)
{
    const double d = 2.0 * cross(b - a, c - a);
    if (std::abs(d) < 1e-12) return std::nullopt;
    const double ab = dot(b - a, b - a), ac = dot(c - a, c - a);
    const Point ba = b - a, ca = c - a;
    return a + Point{(ca.y * ab - ba.y * ac) / d, (ba.x * ac - ca.x * ab) / d};
}

bool fittable(const Move& m) { return m.kind == MoveKind::line && m.intent == MoveIntent::cut; }

// Arc through the vertices of moves [first, last] when they all lie within
// tol of one circle and turn the same way by at most 45 degrees each.
std::optional<Move> fit_run(const std::vector<Move>& moves, std::size_t first, std::size_t last, double tol)
{
    const std::size_t mid = (first + last + 1) / 2;
    const auto c = circumcenter(moves[first].start, moves[mid].start, moves[last].end);
    if (!c) return std::nullopt;
    const double r = distance(*c, moves[first].start);
    double turn_sign = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
        if (std::abs(distance(*c, moves[i].end) - r) > tol) return std::nullopt;
        if (moves[i].length() > 0.5 * std::numbers::pi / 2.0 * r) return std::nullopt;
        if (i > first) {
            const double turn = cross(moves[i - 1].end_tangent(), moves[i].start_tangent());
            if (std::abs(turn) < 1e-9) return std::nullopt;
            if (turn_sign == 0.0) turn_sign = turn;
            if (turn * turn_sign < 0.0) return std::nullopt;
        }
    }
    const bool ccw = cross(moves[first].end - moves[first].start, *c - moves[first].start) > 0.0;
    Move arc = arc_move(moves[first].start, moves[last].end, *c, ccw, MoveIntent::cut);
    if (arc.sweep() > 1.9 * std::numbers::pi) return std::nullopt;
    return arc;
}

} // namespace

Toolpath fit_arcs(const Toolpath& path, double tol, std::size_t min_segments)
{
    Toolpath out = path;
    out.moves.clear();
    const std::vector<Move>& in = path.moves;
    std::size_t i = 0;
    while (i < in.size()) {
        std::optional<Move> best;
        std::size_t best_last = i;
        if (fittable(in[i])) {
            for (std::size_t j = i + 1; j < in.size() && fittable(in[j]); ++j) {
                if (distance(in[j - 1].end, in[j].start) > kSnapEpsilon) break;
                if (j + 1 - i < min_segments) continue;
                auto arc = fit_run(in, i, j, tol);
                if (!arc) break;
                best = arc;
                best_last = j;
            }
        }
        if (best) {
            out.moves.push_back(*best);
            i = best_last + 1;
        } else {
            out.moves.push_back(in[i]);
            ++i;
        }
    }
    return out;
}

PathLength path_length(const Toolpath& path)
{
    PathLength len;
    for (const Move& m : path.moves) {
        const double l = m.length();
        len.total += l;
        if (m.intent == MoveIntent::cut) len.cut += l;
    }
    return len;
}

std::vector<std::size_t> segment_histogram(const Toolpath& path, const std::vector<double>& bin_edges)
{
    std::vector<std::size_t> counts(bin_edges.size() + 1, 0);
    for (const Move& m : path.moves) {
        if (m.is_arc()) continue;
        const double l = m.length();
        const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), l);
        ++counts[static_cast<std::size_t>(it - bin_edges.begin())];
    }
    return counts;
}

double max_continuity_gap(const Toolpath& path)
{
    double gap = 0.0;
    for (std::size_t i = 1; i < path.moves.size(); ++i)
        gap = std::max(gap, distance(path.moves[i - 1].end, path.moves[i].start));
    return gap;
}

} // namespace pocketforge
