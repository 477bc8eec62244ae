#pragma once

// Grid oracles for the polygon kernel and the planners. Cells are sampled at
// their centres; distances are measured between centres.

#include "pocketforge/geometry.hpp"
#include "pocketforge/toolpath.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace raster {

using pocketforge::Point;
using pocketforge::Region;

struct Grid {
    double x0 = 0.0, y0 = 0.0, h = 0.05;
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> cell;

    Grid() = default;
    Grid(double x0_, double y0_, double h_, int nx_, int ny_)
        : x0(x0_), y0(y0_), h(h_), nx(nx_), ny(ny_), cell(static_cast<std::size_t>(nx_) * ny_, 0) {}

    std::uint8_t& at(int i, int j) { return cell[static_cast<std::size_t>(j) * nx + i]; }
    std::uint8_t at(int i, int j) const { return cell[static_cast<std::size_t>(j) * nx + i]; }
    Point centre(int i, int j) const { return {x0 + (i + 0.5) * h, y0 + (j + 0.5) * h}; }
    std::size_t count() const { return static_cast<std::size_t>(std::count(cell.begin(), cell.end(), 1)); }
    double area() const { return static_cast<double>(count()) * h * h; }
    Grid blank() const { return Grid(x0, y0, h, nx, ny); }
};

/// Grid covering the bounding box of `r` plus `pad` on every side.
inline Grid frame(const Region& r, double h, double pad)
{
    const auto b = pocketforge::bounding_box(r);
    const int nx = static_cast<int>(std::ceil((b.width() + 2 * pad) / h));
    const int ny = static_cast<int>(std::ceil((b.height() + 2 * pad) / h));
    return Grid(b.min_x - pad, b.min_y - pad, h, nx, ny);
}

/// Even-odd scanline fill of every loop; valid regions make this the set itself.
inline Grid rasterize(const Region& r, const Grid& like)
{
    Grid g = like.blank();
    std::vector<double> xs;
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.y0 + (j + 0.5) * g.h;
        xs.clear();
        auto scan = [&](const pocketforge::Loop& l) {
            for (std::size_t k = 0; k < l.size(); ++k) {
                const Point a = l[k], b = l[(k + 1) % l.size()];
                if ((a.y <= y) != (b.y <= y)) xs.push_back(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
            }
        };
        for (const auto& p : r.parts) {
            scan(p.outer);
            for (const auto& hole : p.holes) scan(hole);
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            const int i0 = std::max(0, static_cast<int>(std::ceil((xs[k] - g.x0) / g.h - 0.5)));
            const int i1 = std::min(g.nx - 1, static_cast<int>(std::floor((xs[k + 1] - g.x0) / g.h - 0.5)));
            for (int i = i0; i <= i1; ++i) g.at(i, j) = 1;
        }
    }
    return g;
}

namespace detail {

// One-dimensional squared distance transform (lower envelope of parabolas).
inline void edt_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    int k = 0;
    v[0] = 0;
    z[0] = -inf;
    z[1] = inf;
    for (int q = 1; q < n; ++q) {
        if (f[q] == inf) continue;
        if (f[v[0]] == inf) {
            v[0] = q;
            continue;
        }
        double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    if (f[v[0]] == inf) {
        for (int q = 0; q < n; ++q) d[q] = inf;
        return;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        d[q] = (q - v[k]) * static_cast<double>(q - v[k]) + f[v[k]];
    }
}

} // namespace detail

/// Exact Euclidean distance (mm) from each cell centre to the nearest cell with value `target`.
inline std::vector<double> distance_to(const Grid& g, std::uint8_t target)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    const int n = std::max(g.nx, g.ny);
    std::vector<double> f(static_cast<std::size_t>(g.nx) * g.ny);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = g.cell[k] == target ? 0.0 : inf;
    std::vector<double> in(n), out(n), z(n + 1);
    std::vector<int> v(n);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) in[j] = f[static_cast<std::size_t>(j) * g.nx + i];
        detail::edt_1d(in.data(), out.data(), g.ny, v, z);
        for (int j = 0; j < g.ny; ++j) f[static_cast<std::size_t>(j) * g.nx + i] = out[j];
    }
    for (int j = 0; j < g.ny; ++j) {
        double* row = &f[static_cast<std::size_t>(j) * g.nx];
        std::copy(row, row + g.nx, in.begin());
        detail::edt_1d(in.data(), out.data(), g.nx, v, z);
        for (int i = 0; i < g.nx; ++i) row[i] = std::sqrt(out[i]) * g.h;
    }
    return f;
}

/// Disk erosion. The set boundary is taken halfway between inside and outside centres.
inline Grid erode(const Grid& g, double r)
{
    const auto d = distance_to(g, 0);
    Grid out = g.blank();
    for (std::size_t k = 0; k < d.size(); ++k) out.cell[k] = g.cell[k] && d[k] - 0.5 * g.h >= r ? 1 : 0;
    return out;
}

/// Disk dilation of the centre set; pass r + h/2 to dilate the cell squares.
inline Grid dilate(const Grid& g, double r)
{
    const auto d = distance_to(g, 1);
    Grid out = g.blank();
    for (std::size_t k = 0; k < d.size(); ++k) out.cell[k] = d[k] <= r ? 1 : 0;
    return out;
}

inline Grid opening(const Grid& g, double diameter)
{
    return dilate(erode(g, 0.5 * diameter), 0.5 * (diameter + g.h));
}

inline double xor_area(const Grid& a, const Grid& b)
{
    std::size_t n = 0;
    for (std::size_t k = 0; k < a.cell.size(); ++k) n += a.cell[k] != b.cell[k];
    return static_cast<double>(n) * a.h * a.h;
}

/// Area of a \ b.
inline double minus_area(const Grid& a, const Grid& b)
{
    std::size_t n = 0;
    for (std::size_t k = 0; k < a.cell.size(); ++k) n += a.cell[k] && !b.cell[k];
    return static_cast<double>(n) * a.h * a.h;
}

/// 8-connected component count of the set cells.
inline int components(const Grid& g)
{
    std::vector<int> label(g.cell.size(), 0);
    std::vector<std::pair<int, int>> stack;
    int count = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!g.at(i, j) || label[static_cast<std::size_t>(j) * g.nx + i]) continue;
            ++count;
            stack.push_back({i, j});
            label[static_cast<std::size_t>(j) * g.nx + i] = count;
            while (!stack.empty()) {
                auto [ci, cj] = stack.back();
                stack.pop_back();
                for (int dj = -1; dj <= 1; ++dj)
                    for (int di = -1; di <= 1; ++di) {
                        const int ni = ci + di, nj = cj + dj;
                        if (ni < 0 || nj < 0 || ni >= g.nx || nj >= g.ny || !g.at(ni, nj)) continue;
                        int& l = label[static_cast<std::size_t>(nj) * g.nx + ni];
                        if (l) continue;
                        l = count;
                        stack.push_back({ni, nj});
                    }
            }
        }
    return count;
}

/// Cells swept by a disk of radius r whose centre follows the cut moves.
inline Grid swept(const pocketforge::Toolpath& path, double r, const Grid& like,
                  bool cut_only = true)
{
    Grid seeds = like.blank();
    auto mark = [&](Point p) {
        const int i = static_cast<int>(std::floor((p.x - seeds.x0) / seeds.h));
        const int j = static_cast<int>(std::floor((p.y - seeds.y0) / seeds.h));
        if (i >= 0 && j >= 0 && i < seeds.nx && j < seeds.ny) seeds.at(i, j) = 1;
    };
    const auto flat = pocketforge::discretize_arcs(path, 0.002);
    for (const auto& m : flat.moves) {
        if (cut_only && m.intent != pocketforge::MoveIntent::cut) continue;
        const double len = pocketforge::distance(m.start, m.end);
        const int n = std::max(1, static_cast<int>(std::ceil(len / (0.25 * like.h))));
        for (int k = 0; k <= n; ++k) mark(m.start + (m.end - m.start) * (static_cast<double>(k) / n));
    }
    // seeds sit within h/sqrt(2) of the centre line, on either side
    return dilate(seeds, r);
}

/// Rest-to-rest straight move integrated with explicit time steps: accelerate
/// at a until v_max, brake as late as possible. The braking switch and the
/// stop are located inside their step so the result does not carry a step bias.
inline double integrate_line(double length, double v_max, double a, double dt = 1e-6)
{
    double s = 0.0, v = 0.0, t = 0.0;
    auto late = [&](double s1, double v1) { return s1 + v1 * v1 / (2.0 * a) >= length; };
    while (true) {
        const double acc = v < v_max ? a : 0.0;
        const double vn = std::min(v_max, v + acc * dt);
        const double sn = s + 0.5 * (v + vn) * dt;
        if (!late(sn, vn)) {
            s = sn;
            v = vn;
            t += dt;
            continue;
        }
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 60; ++i) {
            const double f = 0.5 * (lo + hi);
            const double vf = std::min(v_max, v + acc * f * dt);
            (late(s + 0.5 * (v + vf) * f * dt, vf) ? hi : lo) = f;
        }
        const double vf = std::min(v_max, v + acc * lo * dt);
        s += 0.5 * (v + vf) * lo * dt;
        v = vf;
        t += lo * dt;
        break;
    }
    while (v > 0.0) {
        const double step = std::min(dt, v / a);
        s += (v - 0.5 * a * step) * step;
        v -= a * step;
        t += step;
    }
    return t;
}

} // namespace raster
