#pragma once

// Exact Euclidean distance transform via the per-axis lower-envelope
// (parabola) method, generalized to anisotropic spacing. For every foreground
// voxel the result is the distance from its center to the nearest background
// voxel center, in physical units; background voxels carry 0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "midsurf/scalar_field.hpp"
#include "midsurf/volume.hpp"

namespace midsurf {

namespace detail {

// One 1D pass: d[p] = min_q ((p-q)^2 * s^2 + f[q]). Entries may be +inf.
inline void dt_lower_envelope(const std::vector<double>& f, double s, std::vector<double>& d,
                              std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    const double inf = std::numeric_limits<double>::infinity();
    const double s2 = s * s;
    v.assign(n, 0);
    z.assign(n + 1, 0.0);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == inf) continue;
        double x;
        while (true) {
            if (k < 0) break;
            const int p = v[k];
            // Intersection of parabolas rooted at p and q (q > p).
            x = ((f[q] - f[p]) / s2 + static_cast<double>(q) * q - static_cast<double>(p) * p) /
                (2.0 * (q - p));
            if (x > z[k]) break;
            --k;
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -inf;
            z[1] = inf;
        } else {
            ++k;
            v[k] = q;
            z[k] = x;
            z[k + 1] = inf;
        }
    }
    if (k < 0) {
        d.assign(n, inf);
        return;
    }
    d.resize(n);
    int j = 0;
    for (int p = 0; p < n; ++p) {
        while (z[j + 1] < p) ++j;
        const double dq = static_cast<double>(p) - v[j];
        d[p] = dq * dq * s2 + f[v[j]];
    }
}

}  // namespace detail

// Exact unsigned distance-to-background field of a binary mask.
inline ScalarField3D compute_sdf(const BinaryMask3D& mask) {
    const GridInfo& g = mask.grid;
    const double inf = std::numeric_limits<double>::infinity();
    bool has_background = false;
    ScalarField3D out;
    out.grid = g;
    out.values.resize(g.voxel_count());
    for (std::size_t v = 0; v < g.voxel_count(); ++v) {
        const bool fg = mask.voxels[v] != 0;
        has_background = has_background || !fg;
        out.values[v] = fg ? inf : 0.0;
    }
    if (!has_background)
        throw std::invalid_argument("compute_sdf: mask has no background voxel");

    const int nmax = std::max({g.nx, g.ny, g.nz});
    std::vector<double> line(nmax), dist(nmax);
    std::vector<int> v(nmax);
    std::vector<double> z(nmax + 1);

    // x pass
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j) {
            line.assign(out.values.begin() + g.index(0, j, k),
                        out.values.begin() + g.index(0, j, k) + g.nx);
            detail::dt_lower_envelope(line, g.sx, dist, v, z);
            std::copy(dist.begin(), dist.begin() + g.nx, out.values.begin() + g.index(0, j, k));
        }
    // y pass
    line.resize(g.ny);
    for (int k = 0; k < g.nz; ++k)
        for (int i = 0; i < g.nx; ++i) {
            for (int j = 0; j < g.ny; ++j) line[j] = out.at(i, j, k);
            detail::dt_lower_envelope(line, g.sy, dist, v, z);
            for (int j = 0; j < g.ny; ++j) out.at(i, j, k) = dist[j];
        }
    // z pass
    line.resize(g.nz);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            for (int k = 0; k < g.nz; ++k) line[k] = out.at(i, j, k);
            detail::dt_lower_envelope(line, g.sz, dist, v, z);
            for (int k = 0; k < g.nz; ++k) out.at(i, j, k) = std::sqrt(dist[k]);
        }
    return out;
}

inline double max_value(const ScalarField3D& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, v);
    return m;
}

}  // namespace midsurf
