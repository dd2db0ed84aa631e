#pragma once

// Separable Gaussian smoothing of the distance field. The smoothing scale is
// derived from the field itself (sigma = max/2, truncation radius 2*sigma+1
// in physical units), which is what makes the pipeline parameter-free.

#include <cmath>
#include <vector>

#include "midsurf/distance_transform.hpp"
#include "midsurf/scalar_field.hpp"

namespace midsurf {

namespace detail {

// Truncated sampled Gaussian, renormalized to unit sum. radius_phys is the
// half-width of the truncation box in physical units.
inline std::vector<double> gaussian_kernel(double sigma, double radius_phys, double spacing) {
    const int r = static_cast<int>(std::ceil(radius_phys / spacing));
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (int t = -r; t <= r; ++t) {
        const double x = t * spacing;
        k[t + r] = std::exp(-x * x / (2.0 * sigma * sigma));
        sum += k[t + r];
    }
    for (double& w : k) w /= sum;
    return k;
}

// In-place separable convolution along one axis with zero extension outside
// the grid. stride selects the axis; count is the grid size along it.
inline void convolve_axis(ScalarField3D& f, const std::vector<double>& kernel, int axis) {
    const GridInfo& g = f.grid;
    const int n[3] = {g.nx, g.ny, g.nz};
    const int count = n[axis];
    const int r = static_cast<int>(kernel.size() / 2);
    std::vector<double> line(count);
    const int ai = axis == 0 ? 1 : 0;
    const int aj = axis == 0 ? 2 : (axis == 1 ? 2 : 1);

    auto idx = [&](int a, int b, int c) {
        int ijk[3];
        ijk[axis] = a;
        ijk[ai] = b;
        ijk[aj] = c;
        return g.index(ijk[0], ijk[1], ijk[2]);
    };
    for (int c = 0; c < n[aj]; ++c) {
        for (int b = 0; b < n[ai]; ++b) {
            for (int a = 0; a < count; ++a) line[a] = f.values[idx(a, b, c)];
            for (int a = 0; a < count; ++a) {
                // Symmetric-pair accumulation: line[a-t] + line[a+t] first.
                // This keeps the convolution exactly equivariant under grid
                // mirroring (addition is commutative in floating point).
                double acc = kernel[r] * line[a];
                for (int t = 1; t <= r; ++t) {
                    const double left = a - t >= 0 ? line[a - t] : 0.0;
                    const double right = a + t < count ? line[a + t] : 0.0;
                    acc += kernel[r + t] * (left + right);
                }
                f.values[idx(a, b, c)] = acc;
            }
        }
    }
}

}  // namespace detail

// Smooths a field with an isotropic Gaussian of the given sigma (physical
// units), truncated at radius_phys and renormalized. Borders use zero
// extension.
inline ScalarField3D gaussian_smooth(const ScalarField3D& field, double sigma,
                                     double radius_phys) {
    ScalarField3D out = field;
    if (sigma <= 0.0) return out;
    const GridInfo& g = field.grid;
    detail::convolve_axis(out, detail::gaussian_kernel(sigma, radius_phys, g.sx), 0);
    detail::convolve_axis(out, detail::gaussian_kernel(sigma, radius_phys, g.sy), 1);
    detail::convolve_axis(out, detail::gaussian_kernel(sigma, radius_phys, g.sz), 2);
    return out;
}

// Self-parameterized smoothing of a distance field: sigma = max/2. A field
// with zero maximum is returned unchanged (linearity).
inline ScalarField3D smooth_sdf(const ScalarField3D& sdf) {
    const double m = max_value(sdf);
    if (m <= 0.0) return sdf;
    const double sigma = 0.5 * m;
    return gaussian_smooth(sdf, sigma, 2.0 * sigma + 1.0);
}

}  // namespace midsurf
