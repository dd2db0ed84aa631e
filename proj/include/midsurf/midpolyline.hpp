#pragma once

// Per-slice mid-polyline tracing. A polyline follows the crest of the
// smoothed distance field: Euler steps of length h = sqrt(2)*sz along the
// small-|lambda| Hessian eigenvector, each followed by a golden-section
// re-centering along the orthogonal (correction) eigenvector. Tracing stops
// when the loop closes or the point leaves the component's dilated pixel set.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "midsurf/distance_transform.hpp"
#include "midsurf/hessian.hpp"
#include "midsurf/scalar_field.hpp"
#include "midsurf/volume.hpp"

namespace midsurf {

struct MidPolyline {
    std::vector<Vec2> points;  // physical in-slice coordinates
    int slice_index = 0;
    int component_id = 0;
    bool closed = false;       // closing segment last->first is implicit
    bool truncated = false;    // step budget ran out before closure/exit
    double step = 0.0;         // nominal inter-point spacing h

    double arc_length() const {
        double len = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i)
            len += distance(points[i - 1], points[i]);
        if (closed && points.size() > 2) len += distance(points.back(), points.front());
        return len;
    }
};

struct PolylineStack {
    GridInfo grid;
    double step_h = 0.0;
    std::vector<std::vector<MidPolyline>> slices;  // indexed by slice 0..nz-1

    std::size_t polyline_count() const {
        std::size_t n = 0;
        for (const auto& s : slices) n += s.size();
        return n;
    }
};

// Pixel center of the component pixel with the maximal field value; ties
// break toward the smallest (y, x).
inline Vec2 find_seed(const SliceComponent& comp, const ScalarField2D& field) {
    if (comp.pixels.empty()) throw std::invalid_argument("find_seed: empty component");
    uint32_t best = comp.pixels.front();
    double best_val = field.values[best];
    for (uint32_t p : comp.pixels) {
        if (field.values[p] > best_val) {
            best_val = field.values[p];
            best = p;
        }
    }
    return field.pixel_center(static_cast<int>(best % field.nx),
                              static_cast<int>(best / field.nx));
}

// 1D golden-section maximizer on [a, b]; interval shrinks below tol.
template <class F>
double golden_section_max(F&& f, double a, double b, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

// Re-centers p on the crest by maximizing the evaluator along dir over
// t in [-w, +w].
template <class F>
Vec2 golden_correct_eval(F&& f, const Vec2& p, const Vec2& dir, double w, double tol) {
    const double t = golden_section_max([&](double s) { return f(p + dir * s); }, -w, w, tol);
    return p + dir * t;
}

// Sampled-field version: the search window is one in-plane voxel, clipped to
// the field bounds; a window entirely outside returns p unchanged.
inline Vec2 golden_correct(const ScalarField2D& field, const Vec2& p, const Vec2& dir) {
    const double w = std::min(field.sx, field.sy);
    const double tol = 1e-3 * w;
    double tlo = -w, thi = w;
    const double lo[2] = {field.origin_x, field.origin_y};
    const double hi[2] = {field.origin_x + (field.nx - 1) * field.sx,
                          field.origin_y + (field.ny - 1) * field.sy};
    const double pc[2] = {p.x, p.y};
    const double d[2] = {dir.x, dir.y};
    for (int a = 0; a < 2; ++a) {
        if (std::abs(d[a]) < 1e-300) {
            if (pc[a] < lo[a] || pc[a] > hi[a]) return p;
            continue;
        }
        double t1 = (lo[a] - pc[a]) / d[a];
        double t2 = (hi[a] - pc[a]) / d[a];
        if (t1 > t2) std::swap(t1, t2);
        tlo = std::max(tlo, t1);
        thi = std::min(thi, t2);
    }
    if (tlo > thi) return p;
    const double t = golden_section_max(
        [&](double s) {
            const auto v = sample_field(field, p + dir * s);
            return v ? *v : -std::numeric_limits<double>::infinity();
        },
        tlo, thi, tol);
    return p + dir * t;
}

struct StepResult {
    Vec2 point;
    Vec2 direction;
    bool exited_field = false;
};

// One Euler step along the flip-corrected trace direction, followed by crest
// correction at the candidate point.
inline StepResult step(const ScalarField2D& field, const HessianField2D& hess, const Vec2& r,
                       const Vec2& v_prev, double h) {
    StepResult out;
    const auto m = sample_hessian(hess, r);
    if (!m) {
        out.exited_field = true;
        return out;
    }
    const EigenPair2D e = eigen2x2(*m);
    Vec2 v = e.v_trace;
    if (dot(v, v_prev) < 0.0) v = -v;
    const Vec2 candidate = r + v * h;
    const auto mc = sample_hessian(hess, candidate);
    if (!mc) {
        out.exited_field = true;
        return out;
    }
    const EigenPair2D ec = eigen2x2(*mc);
    out.point = golden_correct(field, candidate, ec.v_correct);
    out.direction = v;
    return out;
}

enum class TraceKind { Closed, Open, CapSkipped };

struct TraceResult {
    TraceKind kind = TraceKind::CapSkipped;
    MidPolyline polyline;
};

namespace detail {

inline bool point_in_dilated(const SliceComponent& comp, const ScalarField2D& field,
                             const Vec2& p) {
    const Vec2 q = field.to_pixel(p);
    const int i = static_cast<int>(std::lround(q.x));
    const int j = static_cast<int>(std::lround(q.y));
    return comp.dilated_contains(i, j);
}

// Mirror-covariant orientation for the initial trace direction: positive y
// wins, then positive x. (Mirroring the volume across x flips the x component
// only, so the oriented direction mirrors along with the field.)
inline Vec2 orient_start(const Vec2& v) {
    if (v.y < 0.0 || (v.y == 0.0 && v.x < 0.0)) return -v;
    return v;
}

struct HalfTrace {
    std::vector<Vec2> points;  // excludes the start point
    bool closed = false;
    bool truncated = false;
};

inline HalfTrace trace_half(const SliceComponent& comp, const ScalarField2D& field,
                            const HessianField2D& hess, const Vec2& start, Vec2 v, double h,
                            long budget) {
    HalfTrace out;
    Vec2 r = start;
    for (long n = 1;; ++n) {
        if (n > budget) {
            out.truncated = true;
            return out;
        }
        const StepResult s = step(field, hess, r, v, h);
        if (s.exited_field) return out;
        if (!point_in_dilated(comp, field, s.point)) return out;
        // Closure tests the whole step segment, not just its endpoint: a step
        // that passes the start within the closure radius has come back
        // around, and an unlucky circumference-to-step ratio would otherwise
        // lap the ring twice before the endpoint test fires.
        if (n >= 3) {
            const Vec2 d = s.point - r;
            const double len2 = dot(d, d);
            const double t =
                len2 > 0.0 ? std::clamp(dot(start - r, d) / len2, 0.0, 1.0) : 0.0;
            const Vec2 nearest{r.x + t * d.x, r.y + t * d.y};
            if (distance(nearest, start) < 0.5 * h) {
                out.closed = true;
                return out;
            }
        }
        // A ridge that terminates inside the component ends in a rounded tip
        // where curvature turns isotropic; without this cut the trace would
        // orbit the tip dome until the budget runs out.
        const auto mp = sample_hessian(hess, s.point);
        if (!mp) return out;
        const EigenPair2D ep = eigen2x2(*mp);
        if (std::abs(ep.lambda_trace) > 0.5 * std::abs(ep.lambda_correct)) return out;
        out.points.push_back(s.point);
        r = s.point;
        v = s.direction;
    }
}

}  // namespace detail

// Traces the component's mid-polyline. max_sdf_phys is the maximum of the
// (unsmoothed) distance field over the component pixels; it scales both the
// cap test and the residue threshold.
inline TraceResult trace(const SliceComponent& comp, const ScalarField2D& field,
                         const HessianField2D& hess, double max_sdf_phys, double h) {
    TraceResult res;
    const Vec2 seed = find_seed(comp, field);
    const auto m0 = sample_hessian(hess, seed);
    if (!m0) return res;

    Vec2 start = golden_correct(field, seed, eigen2x2(*m0).v_correct);
    if (!detail::point_in_dilated(comp, field, start) || !field.in_bounds(start)) start = seed;

    // Disk-like caps carry no crest: the component maximum is a dome apex
    // where both principal curvatures are comparable, whereas on a genuine
    // ridge the along-crest curvature nearly vanishes. Traces started on a
    // dome wander across it (orbits or diameter chords), so such components
    // are skipped outright.
    {
        const auto ms = sample_hessian(hess, start);
        if (!ms) return res;
        const EigenPair2D es = eigen2x2(*ms);
        if (std::abs(es.lambda_trace) > 0.5 * std::abs(es.lambda_correct)) return res;
    }

    // Initial direction, then a deterministic quarter-step stagger on odd
    // slices so that stacked polylines from z-invariant shapes interlock
    // instead of forming degenerate phase-locked quads.
    auto start_direction = [&](const Vec2& p) -> std::optional<Vec2> {
        const auto m = sample_hessian(hess, p);
        if (!m) return std::nullopt;
        return detail::orient_start(eigen2x2(*m).v_trace);
    };
    auto v0opt = start_direction(start);
    if (!v0opt) return res;
    Vec2 v0 = *v0opt;
    if (comp.slice_index % 2 != 0) {
        const Vec2 cand = start + v0 * (0.25 * h);
        if (field.in_bounds(cand) && detail::point_in_dilated(comp, field, cand)) {
            const auto mc = sample_hessian(hess, cand);
            if (mc) {
                const Vec2 staggered = golden_correct(field, cand, eigen2x2(*mc).v_correct);
                if (field.in_bounds(staggered) &&
                    detail::point_in_dilated(comp, field, staggered)) {
                    start = staggered;
                    if (auto v = start_direction(start)) v0 = *v;
                }
            }
        }
    }

    const double in_plane = std::min(field.sx, field.sy);
    const long budget =
        std::max<long>(16, std::lround(8.0 * static_cast<double>(comp.pixel_count()) /
                                       (h / in_plane)));

    const detail::HalfTrace fwd = detail::trace_half(comp, field, hess, start, v0, h, budget);

    MidPolyline line;
    line.slice_index = comp.slice_index;
    line.step = h;
    if (fwd.closed) {
        line.closed = true;
        line.truncated = fwd.truncated;
        line.points.push_back(start);
        line.points.insert(line.points.end(), fwd.points.begin(), fwd.points.end());
    } else {
        const detail::HalfTrace bwd =
            detail::trace_half(comp, field, hess, start, -v0, h, budget);
        line.truncated = fwd.truncated || bwd.truncated;
        line.points.assign(bwd.points.rbegin(), bwd.points.rend());
        line.points.push_back(start);
        line.points.insert(line.points.end(), fwd.points.begin(), fwd.points.end());
    }

    // Cap test: disk-like components without an in-plane ridge produce traces
    // that are short or never escape the wall-thickness scale around the
    // seed. Both signals are compared against 4 * max SDF.
    const double cap_scale = 4.0 * max_sdf_phys;
    double min_x = start.x, max_x = start.x, min_y = start.y, max_y = start.y;
    for (const Vec2& p : line.points) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double bbox_diag = std::hypot(max_x - min_x, max_y - min_y);
    const bool too_short = line.arc_length() < cap_scale || bbox_diag < cap_scale;
    const std::size_t min_points = line.closed ? 3 : 2;
    if (too_short || line.points.size() < min_points) {
        res.kind = TraceKind::CapSkipped;
        return res;
    }
    // Canonical orientation: closed loops run counterclockwise, open lines
    // start at the lexicographically smaller (y, x) endpoint. Adjacent slices
    // then traverse matching geometry in the same sense, which keeps the
    // winding of the zipped strips consistent.
    bool flip = false;
    if (line.closed) {
        double area2 = 0.0;
        for (std::size_t i = 0; i < line.points.size(); ++i)
            area2 += cross(line.points[i], line.points[(i + 1) % line.points.size()]);
        flip = area2 < 0.0;
    } else {
        const Vec2& f = line.points.front();
        const Vec2& b = line.points.back();
        flip = b.y < f.y || (b.y == f.y && b.x < f.x);
    }
    if (flip) std::reverse(line.points.begin(), line.points.end());

    res.kind = line.closed ? TraceKind::Closed : TraceKind::Open;
    res.polyline = std::move(line);
    return res;
}

// Uncovered-pixel components after tracing: pixels farther than 1.5 in-plane
// voxels from every polyline segment, split 8-connected, keeping only
// components larger than 4 * (component max SDF in pixels).
namespace detail {

inline double seg_dist2(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 q = a + ab * t;
    return dot(p - q, p - q);
}

inline bool point_covered(const std::vector<MidPolyline>& polylines, const Vec2& p, double r2) {
    for (const MidPolyline& line : polylines) {
        for (std::size_t i = 1; i < line.points.size(); ++i)
            if (seg_dist2(p, line.points[i - 1], line.points[i]) <= r2) return true;
        if (line.closed && line.points.size() > 2 &&
            seg_dist2(p, line.points.back(), line.points.front()) <= r2)
            return true;
    }
    return false;
}

}  // namespace detail

inline std::vector<SliceComponent> coverage_residue(const SliceComponent& comp,
                                                    const std::vector<MidPolyline>& polylines,
                                                    const ScalarField2D& field,
                                                    double max_sdf_pixels) {
    const double radius = 1.5 * std::max(field.sx, field.sy);
    const double r2 = radius * radius;
    auto covered = [&](const Vec2& p) { return detail::point_covered(polylines, p, r2); };

    std::vector<uint8_t> residual(comp.in_component.size(), 0);
    for (uint32_t p : comp.pixels) {
        const int i = static_cast<int>(p % comp.nx);
        const int j = static_cast<int>(p / comp.nx);
        if (!covered(field.pixel_center(i, j))) residual[p] = 1;
    }

    // 8-connected split of the residual set, in (y, x) scan order.
    std::vector<SliceComponent> out;
    std::vector<uint32_t> stack;
    const std::size_t plane = residual.size();
    std::vector<uint8_t> visited(plane, 0);
    for (std::size_t s = 0; s < plane; ++s) {
        if (!residual[s] || visited[s]) continue;
        SliceComponent rc;
        rc.slice_index = comp.slice_index;
        rc.nx = comp.nx;
        rc.ny = comp.ny;
        rc.in_component.assign(plane, 0);
        stack.clear();
        stack.push_back(static_cast<uint32_t>(s));
        visited[s] = 1;
        while (!stack.empty()) {
            const uint32_t cur = stack.back();
            stack.pop_back();
            rc.in_component[cur] = 1;
            const int i = static_cast<int>(cur % comp.nx);
            const int j = static_cast<int>(cur / comp.nx);
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    const int ii = i + di, jj = j + dj;
                    if (ii < 0 || ii >= comp.nx || jj < 0 || jj >= comp.ny) continue;
                    const std::size_t n = static_cast<std::size_t>(jj) * comp.nx + ii;
                    if (visited[n] || !residual[n]) continue;
                    visited[n] = 1;
                    stack.push_back(static_cast<uint32_t>(n));
                }
        }
        for (std::size_t p = 0; p < plane; ++p)
            if (rc.in_component[p]) rc.pixels.push_back(static_cast<uint32_t>(p));
        if (static_cast<double>(rc.pixels.size()) > 4.0 * max_sdf_pixels) {
            dilate(rc);
            out.push_back(std::move(rc));
        }
    }
    return out;
}

namespace detail {

inline double component_max(const SliceComponent& comp, const ScalarField2D& field) {
    double m = 0.0;
    for (uint32_t p : comp.pixels) m = std::max(m, field.values[p]);
    return m;
}

constexpr int kMaxResidueDepth = 8;

inline void trace_component_tree(const SliceComponent& comp, const ScalarField2D& field,
                                 const HessianField2D& hess, const ScalarField2D& sdf_slice,
                                 double h, int component_id, int depth,
                                 std::vector<MidPolyline>& out) {
    const double max_sdf = component_max(comp, sdf_slice);
    if (max_sdf <= 0.0) return;
    TraceResult tr = trace(comp, field, hess, max_sdf, h);
    if (tr.kind == TraceKind::CapSkipped) return;

    // A residue re-trace that immediately escapes back onto an already-traced
    // crest contributes no coverage; emitting it would duplicate (and slightly
    // offset) existing geometry. Require at least one uncovered point.
    if (depth > 0) {
        const double radius = 1.5 * std::max(field.sx, field.sy);
        bool adds_coverage = false;
        for (const Vec2& p : tr.polyline.points)
            if (!detail::point_covered(out, p, radius * radius)) {
                adds_coverage = true;
                break;
            }
        if (!adds_coverage) return;
    }
    tr.polyline.component_id = component_id;
    out.push_back(tr.polyline);

    const double in_plane = std::min(field.sx, field.sy);
    const auto residues =
        coverage_residue(comp, {tr.polyline}, field, max_sdf / in_plane);
    for (const SliceComponent& rc : residues) {
        if (depth + 1 > kMaxResidueDepth) {
            std::fprintf(stderr,
                         "midsurf: warning: residue recursion limit reached on slice %d; "
                         "dropping a %zu-pixel residue\n",
                         comp.slice_index, rc.pixels.size());
            continue;
        }
        trace_component_tree(rc, field, hess, sdf_slice, h, component_id, depth + 1, out);
    }
}

}  // namespace detail

// Full per-slice extraction: every slice's 8-connected components are traced
// (caps skipped), followed by residue re-tracing, in deterministic order.
inline PolylineStack extract_stack(const BinaryMask3D& mask, const ScalarField3D& smoothed) {
    PolylineStack stack;
    stack.grid = mask.grid;
    stack.step_h = std::numbers::sqrt2 * mask.grid.sz;
    stack.slices.resize(mask.grid.nz);

    const ScalarField3D sdf = compute_sdf(mask);
    for (int z = 0; z < mask.grid.nz; ++z) {
        const auto comps = slice_components(mask, z);
        if (comps.empty()) continue;
        const ScalarField2D field = extract_slice(smoothed, z);
        const ScalarField2D sdf_slice = extract_slice(sdf, z);
        const HessianField2D hess = compute_hessian(field);
        for (std::size_t c = 0; c < comps.size(); ++c)
            detail::trace_component_tree(comps[c], field, hess, sdf_slice, stack.step_h,
                                         static_cast<int>(c), 0, stack.slices[z]);
    }
    return stack;
}

}  // namespace midsurf
