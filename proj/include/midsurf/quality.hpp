#pragma once

// Mesh quality metrics: per-triangle quality Q = (6/sqrt(3)) * A / (p * h)
// (A area, p half-perimeter, h longest edge), angle statistics with a
// 1-degree histogram, and the share of vertices with valence 5, 6 or 7.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "midsurf/mesh.hpp"

namespace midsurf {

inline double triangle_quality(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double la = distance(b, c), lb = distance(a, c), lc = distance(a, b);
    const double h = std::max({la, lb, lc});
    const double p = 0.5 * (la + lb + lc);
    if (h <= 0.0 || p <= 0.0) return 0.0;
    const double area = triangle_area(a, b, c);
    return (6.0 / std::sqrt(3.0)) * area / (p * h);
}

// Interior angles in degrees; degenerate triangles report {0, 0, 180}.
inline std::array<double, 3> triangle_angles(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double la = distance(b, c), lb = distance(a, c), lc = distance(a, b);
    if (triangle_area(a, b, c) <= 0.0 || la <= 0.0 || lb <= 0.0 || lc <= 0.0)
        return {0.0, 0.0, 180.0};
    auto ang = [](double opp, double s1, double s2) {
        double v = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
        v = std::clamp(v, -1.0, 1.0);
        return std::acos(v) * 180.0 / std::numbers::pi;
    };
    return {ang(la, lb, lc), ang(lb, la, lc), ang(lc, la, lb)};
}

struct QualityReport {
    std::size_t vertex_count = 0;
    std::size_t triangle_count = 0;
    double q_min = 0.0;
    double q_avg = 0.0;
    double theta_min_avg = 0.0;        // average per-triangle minimal angle, degrees
    double angles_below_30_pct = 0.0;  // share of all 3n angles
    double angles_above_120_pct = 0.0;
    double v567_pct = 0.0;             // valence 5/6/7 share over all vertices
    std::array<std::size_t, 180> angle_histogram{};  // 1-degree bins over [0, 180]
};

// Valence = number of distinct mesh edges incident to the vertex. Isolated
// vertices (valence 0) stay in the denominator.
inline std::vector<int> vertex_valences(const MidSurfaceMesh& mesh) {
    std::vector<std::set<int>> nbrs(mesh.vertices.size());
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            const int a = t[e], b = t[(e + 1) % 3];
            nbrs[a].insert(b);
            nbrs[b].insert(a);
        }
    }
    std::vector<int> val(mesh.vertices.size());
    for (std::size_t v = 0; v < nbrs.size(); ++v) val[v] = static_cast<int>(nbrs[v].size());
    return val;
}

inline QualityReport compute_quality_report(const MidSurfaceMesh& mesh) {
    QualityReport r;
    r.vertex_count = mesh.vertices.size();
    r.triangle_count = mesh.triangles.size();
    if (!mesh.triangles.empty()) {
        double q_sum = 0.0, tmin_sum = 0.0;
        double q_min = std::numeric_limits<double>::infinity();
        std::size_t below = 0, above = 0;
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            const auto p = mesh.triangle_points(t);
            const double q = triangle_quality(p[0], p[1], p[2]);
            q_sum += q;
            q_min = std::min(q_min, q);
            const auto angles = triangle_angles(p[0], p[1], p[2]);
            tmin_sum += std::min({angles[0], angles[1], angles[2]});
            for (double a : angles) {
                if (a < 30.0) ++below;
                if (a > 120.0) ++above;
                const int bin = std::min(179, static_cast<int>(a));
                ++r.angle_histogram[bin];
            }
        }
        const double n = static_cast<double>(mesh.triangles.size());
        r.q_min = q_min;
        r.q_avg = q_sum / n;
        r.theta_min_avg = tmin_sum / n;
        r.angles_below_30_pct = 100.0 * static_cast<double>(below) / (3.0 * n);
        r.angles_above_120_pct = 100.0 * static_cast<double>(above) / (3.0 * n);
    }
    if (!mesh.vertices.empty()) {
        const auto val = vertex_valences(mesh);
        std::size_t good = 0;
        for (int v : val)
            if (v >= 5 && v <= 7) ++good;
        r.v567_pct = 100.0 * static_cast<double>(good) / static_cast<double>(val.size());
    }
    return r;
}

namespace detail {

inline std::string format_metric(const char* name, double value, int name_width) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-*s = %.4f\n", name_width, name, value);
    return buf;
}

}  // namespace detail

// One metric per line as "name = value" (reals with 4 decimal places).
// aligned=true pads the names for human-readable output; aligned=false is the
// flat machine form.
inline std::string format_report(const QualityReport& r, bool aligned = true) {
    const int w = aligned ? 21 : 0;
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-*s = %zu\n", w, "vertices", r.vertex_count);
    out += buf;
    std::snprintf(buf, sizeof(buf), "%-*s = %zu\n", w, "triangles", r.triangle_count);
    out += buf;
    out += detail::format_metric("q_min", r.q_min, w);
    out += detail::format_metric("q_avg", r.q_avg, w);
    out += detail::format_metric("theta_min_avg_deg", r.theta_min_avg, w);
    out += detail::format_metric("angles_below_30_pct", r.angles_below_30_pct, w);
    out += detail::format_metric("angles_above_120_pct", r.angles_above_120_pct, w);
    out += detail::format_metric("v567_pct", r.v567_pct, w);
    std::snprintf(buf, sizeof(buf), "%-*s =", w, "angle_histogram");
    out += buf;
    for (std::size_t b = 0; b < r.angle_histogram.size(); ++b) {
        std::snprintf(buf, sizeof(buf), " %zu", r.angle_histogram[b]);
        out += buf;
    }
    out += "\n";
    return out;
}

}  // namespace midsurf
