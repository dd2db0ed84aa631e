#pragma once

// Per-slice 2x2 Hessian of the smoothed field plus its eigen decomposition.
// The eigenvector of the smaller-|lambda| eigenvalue runs along the ridge
// (trace direction); the other one is the correction direction.

#include <cmath>
#include <optional>

#include "midsurf/scalar_field.hpp"

namespace midsurf {

struct SymMat2 {
    double xx = 0.0, xy = 0.0, yy = 0.0;
};

struct HessianField2D {
    int nx = 0, ny = 0;
    double sx = 1.0, sy = 1.0;
    double origin_x = 0.0, origin_y = 0.0;
    int slice_index = 0;
    std::vector<double> fxx, fxy, fyy;

    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
};

// Central differences; borders fall back to replicated-edge (clamped index)
// stencils, which degrade to one-sided differences there.
inline HessianField2D compute_hessian(const ScalarField2D& f) {
    HessianField2D h;
    h.nx = f.nx;
    h.ny = f.ny;
    h.sx = f.sx;
    h.sy = f.sy;
    h.origin_x = f.origin_x;
    h.origin_y = f.origin_y;
    h.slice_index = f.slice_index;
    const std::size_t n = static_cast<std::size_t>(f.nx) * f.ny;
    h.fxx.resize(n);
    h.fxy.resize(n);
    h.fyy.resize(n);
    auto clamp = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };
    for (int j = 0; j < f.ny; ++j) {
        for (int i = 0; i < f.nx; ++i) {
            const int im = clamp(i - 1, f.nx - 1), ip = clamp(i + 1, f.nx - 1);
            const int jm = clamp(j - 1, f.ny - 1), jp = clamp(j + 1, f.ny - 1);
            const std::size_t at = h.idx(i, j);
            // Stencil neighbours are summed in mirror-symmetric pairs so the
            // Hessian of a mirrored field is exactly the mirrored Hessian.
            h.fxx[at] = ((f.at(ip, j) + f.at(im, j)) - 2.0 * f.at(i, j)) / (f.sx * f.sx);
            h.fyy[at] = ((f.at(i, jp) + f.at(i, jm)) - 2.0 * f.at(i, j)) / (f.sy * f.sy);
            h.fxy[at] = ((f.at(ip, jp) + f.at(im, jm)) - (f.at(ip, jm) + f.at(im, jp))) /
                        (4.0 * f.sx * f.sy);
        }
    }
    return h;
}

// Bilinear interpolation of each Hessian entry independently; nullopt outside
// the pixel-center hull (same domain rule as sample_field).
inline std::optional<SymMat2> sample_hessian(const HessianField2D& h, const Vec2& p) {
    const double qx = (p.x - h.origin_x) / h.sx;
    const double qy = (p.y - h.origin_y) / h.sy;
    if (!(qx >= 0.0 && qx <= h.nx - 1 && qy >= 0.0 && qy <= h.ny - 1)) return std::nullopt;
    int i0 = static_cast<int>(qx);
    int j0 = static_cast<int>(qy);
    if (i0 > h.nx - 2) i0 = h.nx - 2;
    if (j0 > h.ny - 2) j0 = h.ny - 2;
    if (h.nx == 1) i0 = 0;
    if (h.ny == 1) j0 = 0;
    const int i1 = h.nx == 1 ? i0 : i0 + 1;
    const int j1 = h.ny == 1 ? j0 : j0 + 1;
    const double fx = qx - i0, fy = qy - j0;
    auto lerp2 = [&](const std::vector<double>& v) {
        const double a = v[h.idx(i0, j0)] * (1.0 - fx) + v[h.idx(i1, j0)] * fx;
        const double b = v[h.idx(i0, j1)] * (1.0 - fx) + v[h.idx(i1, j1)] * fx;
        return a * (1.0 - fy) + b * fy;
    };
    return SymMat2{lerp2(h.fxx), lerp2(h.fxy), lerp2(h.fyy)};
}

struct EigenPair2D {
    double lambda_trace = 0.0;    // smaller |lambda|
    double lambda_correct = 0.0;  // larger |lambda|
    Vec2 v_trace{1.0, 0.0};
    Vec2 v_correct{0.0, 1.0};
};

namespace detail {

// Sign convention: first nonzero coordinate >= 0.
inline Vec2 canonical_sign(const Vec2& v) {
    if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) return -v;
    return v;
}

}  // namespace detail

// Eigen decomposition of a symmetric 2x2 matrix via a single Jacobi rotation.
// Ties in |lambda| resolve toward the eigenvector closer to the +x axis.
inline EigenPair2D eigen2x2(const SymMat2& m) {
    double l1, l2;
    Vec2 v1, v2;
    if (m.xy == 0.0) {
        l1 = m.xx;
        v1 = {1.0, 0.0};
        l2 = m.yy;
        v2 = {0.0, 1.0};
    } else {
        const double theta = 0.5 * std::atan2(2.0 * m.xy, m.xx - m.yy);
        const double c = std::cos(theta), s = std::sin(theta);
        l1 = m.xx * c * c + 2.0 * m.xy * c * s + m.yy * s * s;
        v1 = {c, s};
        l2 = m.xx * s * s - 2.0 * m.xy * c * s + m.yy * c * c;
        v2 = {-s, c};
    }
    EigenPair2D e;
    bool first_is_trace;
    if (std::abs(l1) != std::abs(l2)) {
        first_is_trace = std::abs(l1) < std::abs(l2);
    } else {
        first_is_trace = std::abs(v1.x) >= std::abs(v2.x);
    }
    if (first_is_trace) {
        e.lambda_trace = l1;
        e.v_trace = detail::canonical_sign(v1);
        e.lambda_correct = l2;
        e.v_correct = detail::canonical_sign(v2);
    } else {
        e.lambda_trace = l2;
        e.v_trace = detail::canonical_sign(v2);
        e.lambda_correct = l1;
        e.v_correct = detail::canonical_sign(v1);
    }
    return e;
}

}  // namespace midsurf
