#pragma once

// Seeded random inputs shared by the property tests and the acceptance run.

#include "pocketforge/geometry.hpp"
#include "pocketforge/toolpath.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace corpus {

using namespace pocketforge;

/// Rectilinear skyline polygon with at most 20 vertices, integer mm coordinates.
inline Region rectilinear_polygon(std::mt19937& rng)
{
    std::uniform_int_distribution<int> width(8, 30), top(25, 70), bottom(0, 20), coin(0, 1);
    const bool both = coin(rng) == 1;
    const int columns = both ? std::uniform_int_distribution<int>(2, 5)(rng) : std::uniform_int_distribution<int>(2, 9)(rng);
    std::vector<int> xs{0}, tops, bottoms;
    for (int c = 0; c < columns; ++c) {
        xs.push_back(xs.back() + width(rng));
        tops.push_back(top(rng));
        bottoms.push_back(both ? bottom(rng) : 0);
    }
    Loop loop;
    // bottom edge left to right, then top edge right to left
    for (int c = 0; c < columns; ++c) {
        loop.push_back({double(xs[c]), double(bottoms[c])});
        loop.push_back({double(xs[c + 1]), double(bottoms[c])});
    }
    for (int c = columns - 1; c >= 0; --c) {
        loop.push_back({double(xs[c + 1]), double(tops[c])});
        loop.push_back({double(xs[c]), double(tops[c])});
    }
    return normalize(make_region(loop));
}

inline std::vector<Region> rectilinear_corpus(int n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::vector<Region> out;
    for (int k = 0; k < n; ++k) out.push_back(rectilinear_polygon(rng));
    return out;
}

/// Contiguous random walk of lines and arcs with a spread of segment lengths.
inline Toolpath random_path(std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Toolpath p;
    p.tool = {10.0, 2, 166.67, PlungeStyle::helical};
    p.feed = 166.67;
    Point at{0, 0};
    double heading = 0.0;
    const int n = 20 + static_cast<int>(u(rng) * 60);
    for (int k = 0; k < n; ++k) {
        const double turn = (u(rng) - 0.5) * std::numbers::pi * (u(rng) < 0.3 ? 2.0 : 0.6);
        heading += turn;
        const Point dir{std::cos(heading), std::sin(heading)};
        if (u(rng) < 0.25) {
            const double r = 0.5 + 20.0 * u(rng);
            const double sweep = (0.2 + 2.5 * u(rng)) * (u(rng) < 0.5 ? 1.0 : -1.0);
            const Point c = at + perp(dir) * (sweep > 0 ? r : -r);
            const double a0 = std::atan2(at.y - c.y, at.x - c.x) + sweep;
            const Point end = c + Point{std::cos(a0), std::sin(a0)} * r;
            p.moves.push_back(arc_move(at, end, c, sweep > 0));
            heading += sweep;
            at = end;
        } else {
            const double len = u(rng) < 0.5 ? 0.1 + 2.0 * u(rng) : 2.0 + 40.0 * u(rng);
            const Point end = at + dir * len;
            p.moves.push_back(line_move(at, end));
            at = end;
        }
    }
    return p;
}

inline std::vector<Toolpath> path_corpus(int n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::vector<Toolpath> out;
    for (int k = 0; k < n; ++k) out.push_back(random_path(rng));
    return out;
}

/// Multi-lobe pocket with a central island, 160 x 110 overall.
inline Region lobed_pocket()
{
    Loop outer{{0, 0},    {120, 0},  {120, 15}, {160, 15}, {160, 65}, {120, 65},
               {120, 80}, {85, 80},  {85, 110}, {45, 110}, {45, 80},  {0, 80}};
    Loop hole{{50, 30}, {50, 45}, {70, 45}, {70, 30}};
    return make_region(outer, {hole});
}

/// Two 40 x 40 squares joined by a 30 mm long, 10 mm wide channel.
inline Region dumbbell()
{
    return region_union({make_rectangle(0, 0, 40, 40), make_rectangle(40, 15, 70, 25), make_rectangle(70, 0, 110, 40)});
}

} // namespace corpus
