#pragma once

// Dense scalar fields over the voxel/pixel grids plus bilinear sampling.
// Sample positions are physical coordinates; the valid sampling domain is the
// convex hull of pixel centers. Outside it sampling reports failure, which
// the tracer interprets as "left the field".

#include <optional>
#include <stdexcept>
#include <vector>

#include "midsurf/geometry.hpp"
#include "midsurf/volume.hpp"

namespace midsurf {

struct ScalarField3D {
    GridInfo grid;
    std::vector<double> values;

    double at(int i, int j, int k) const { return values[grid.index(i, j, k)]; }
    double& at(int i, int j, int k) { return values[grid.index(i, j, k)]; }
};

struct ScalarField2D {
    int nx = 0, ny = 0;
    double sx = 1.0, sy = 1.0;
    double origin_x = 0.0, origin_y = 0.0;
    int slice_index = 0;
    std::vector<double> values;

    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(j) * nx + i]; }

    Vec2 pixel_center(int i, int j) const { return {origin_x + i * sx, origin_y + j * sy}; }

    // Continuous pixel coordinates of a physical point.
    Vec2 to_pixel(const Vec2& p) const { return {(p.x - origin_x) / sx, (p.y - origin_y) / sy}; }

    bool in_bounds(const Vec2& p) const {
        const Vec2 q = to_pixel(p);
        return q.x >= 0.0 && q.x <= nx - 1 && q.y >= 0.0 && q.y <= ny - 1;
    }
};

// Copies the z = slice_index plane of a 3D field.
inline ScalarField2D extract_slice(const ScalarField3D& field, int slice_index) {
    const GridInfo& g = field.grid;
    if (slice_index < 0 || slice_index >= g.nz)
        throw std::out_of_range("extract_slice: slice index out of range");
    ScalarField2D s;
    s.nx = g.nx;
    s.ny = g.ny;
    s.sx = g.sx;
    s.sy = g.sy;
    s.origin_x = g.origin.x;
    s.origin_y = g.origin.y;
    s.slice_index = slice_index;
    s.values.assign(field.values.begin() + g.index(0, 0, slice_index),
                    field.values.begin() + g.index(0, 0, slice_index) +
                        static_cast<std::size_t>(g.nx) * g.ny);
    return s;
}

// Bilinear interpolation; nullopt when p is outside the pixel-center hull.
inline std::optional<double> sample_field(const ScalarField2D& f, const Vec2& p) {
    const Vec2 q = f.to_pixel(p);
    if (!(q.x >= 0.0 && q.x <= f.nx - 1 && q.y >= 0.0 && q.y <= f.ny - 1)) return std::nullopt;
    int i0 = static_cast<int>(q.x);
    int j0 = static_cast<int>(q.y);
    if (i0 > f.nx - 2) i0 = f.nx - 2;
    if (j0 > f.ny - 2) j0 = f.ny - 2;
    if (f.nx == 1) i0 = 0;
    if (f.ny == 1) j0 = 0;
    const int i1 = f.nx == 1 ? i0 : i0 + 1;
    const int j1 = f.ny == 1 ? j0 : j0 + 1;
    const double fx = q.x - i0, fy = q.y - j0;
    const double a = f.at(i0, j0) * (1.0 - fx) + f.at(i1, j0) * fx;
    const double b = f.at(i0, j1) * (1.0 - fx) + f.at(i1, j1) * fx;
    return a * (1.0 - fy) + b * fy;
}

}  // namespace midsurf
