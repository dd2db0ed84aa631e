#pragma once

// Zipper triangulation: adjacent slices' polyline edges are matched by a
// mutual-unique-nearest rule on edge centers, matched pairs become quads
// (split along the better diagonal), unmatched edges within reach contribute
// a single triangle, and anything farther than the hole threshold stays open.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "midsurf/mesh.hpp"
#include "midsurf/midpolyline.hpp"

namespace midsurf {

struct ZipEdge {
    int v0 = 0, v1 = 0;  // global vertex indices, polyline order
    Vec3 p0, p1;
    Vec3 center;
    int slice_index = 0;
    int polyline_id = 0;
};

struct PairingResult {
    // (index into lower set, index into upper set)
    std::vector<std::pair<int, int>> pairs;
    struct NonPair {
        int edge = 0;       // index within its own set
        bool upper = false; // which set the edge belongs to
        int nearest = 0;    // index of the nearest edge in the opposite set
    };
    std::vector<NonPair> non_pairs;
    std::vector<std::pair<int, bool>> skipped;  // (edge index, is_upper)
};

namespace detail {

struct NearestInfo {
    int nearest = -1;
    double d = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
};

// Nearest and second-nearest opposite-set edge centers within the threshold,
// found through a uniform grid with cell size = threshold. Centers within the
// threshold of each other differ by at most one cell per axis, so the 3x3
// neighborhood is exhaustive and the result matches a brute-force scan;
// anything farther than the threshold is classified "skipped" anyway.
// Distance ties keep the smaller index as the recorded nearest and force
// second == nearest distance so that uniqueness fails.
inline std::vector<NearestInfo> nearest_within(const std::vector<ZipEdge>& from,
                                               const std::vector<ZipEdge>& to,
                                               double threshold) {
    std::unordered_map<uint64_t, std::vector<int>> grid;
    const double cell = threshold > 0.0 ? threshold : 1.0;
    auto cell_key = [](int64_t cx, int64_t cy) {
        return static_cast<uint64_t>(cx) * 0x9E3779B97F4A7C15ull ^
               (static_cast<uint64_t>(cy) << 1);
    };
    for (std::size_t j = 0; j < to.size(); ++j) {
        const auto cx = static_cast<int64_t>(std::floor(to[j].center.x / cell));
        const auto cy = static_cast<int64_t>(std::floor(to[j].center.y / cell));
        grid[cell_key(cx, cy)].push_back(static_cast<int>(j));
    }

    std::vector<NearestInfo> out(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) {
        NearestInfo& info = out[i];
        const Vec3& c = from[i].center;
        const auto cx = static_cast<int64_t>(std::floor(c.x / cell));
        const auto cy = static_cast<int64_t>(std::floor(c.y / cell));
        for (int64_t dy = -1; dy <= 1; ++dy) {
            for (int64_t dx = -1; dx <= 1; ++dx) {
                const auto it = grid.find(cell_key(cx + dx, cy + dy));
                if (it == grid.end()) continue;
                for (int j : it->second) {
                    const double d = distance(c, to[j].center);
                    if (d > threshold) continue;
                    if (d < info.d) {
                        info.second = info.d;
                        info.d = d;
                        info.nearest = j;
                    } else if (d == info.d && j != info.nearest) {
                        info.second = d;
                        if (j < info.nearest) info.nearest = j;
                    } else if (d > info.d && d < info.second) {
                        info.second = d;
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace detail

// Classifies every edge of both sets: mutual unique nearest within the
// threshold -> pair; nearest within threshold but mutuality fails -> non-pair;
// otherwise skipped.
inline PairingResult pair_edges(const std::vector<ZipEdge>& lower,
                                const std::vector<ZipEdge>& upper, double threshold) {
    PairingResult res;
    const auto lo = detail::nearest_within(lower, upper, threshold);
    const auto up = detail::nearest_within(upper, lower, threshold);

    auto unique_nearest = [](const detail::NearestInfo& n) {
        return n.nearest >= 0 && n.d < n.second;
    };
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (lo[i].nearest < 0) {
            res.skipped.push_back({static_cast<int>(i), false});
            continue;
        }
        const int j = lo[i].nearest;
        if (unique_nearest(lo[i]) && unique_nearest(up[j]) &&
            up[j].nearest == static_cast<int>(i)) {
            res.pairs.push_back({static_cast<int>(i), j});
        } else {
            res.non_pairs.push_back({static_cast<int>(i), false, j});
        }
    }
    for (std::size_t j = 0; j < upper.size(); ++j) {
        if (up[j].nearest < 0) {
            res.skipped.push_back({static_cast<int>(j), true});
            continue;
        }
        const int i = up[j].nearest;
        const bool paired = unique_nearest(up[j]) && unique_nearest(lo[i]) &&
                            lo[i].nearest == static_cast<int>(j);
        if (!paired) res.non_pairs.push_back({static_cast<int>(j), true, i});
    }
    return res;
}

namespace detail {

inline double min_interior_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double la = distance(b, c), lb = distance(a, c), lc = distance(a, b);
    if (la <= 0.0 || lb <= 0.0 || lc <= 0.0) return 0.0;
    auto ang = [](double opp, double s1, double s2) {
        double v = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
        v = std::clamp(v, -1.0, 1.0);
        return std::acos(v);
    };
    return std::min({ang(la, lb, lc), ang(lb, la, lc), ang(lc, la, lb)});
}

inline bool nondegenerate(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double scale = std::max({distance(a, b), distance(b, c), distance(a, c)});
    return triangle_area(a, b, c) > 1e-12 * scale * scale;
}

}  // namespace detail

namespace detail {

// Both diagonal splits of a matched quad, ordered by the minimum interior
// angle they leave. Winding follows the lower edge forward and the upper edge
// backward, so strip triangles share edges in opposite directions.
struct PairSplits {
    std::vector<std::array<int, 3>> best;  // angle-preferred diagonal
    std::vector<std::array<int, 3>> alt;   // the other diagonal
};

inline PairSplits pair_splits(const ZipEdge& ei, const ZipEdge& ej) {
    int v1 = ei.v0, v2 = ei.v1, v3 = ej.v0, v4 = ej.v1;
    Vec3 p1 = ei.p0, p2 = ei.p1, p3 = ej.p0, p4 = ej.p1;
    // Quad sides are v1-v3 and v2-v4; swap the upper endpoints if the other
    // correspondence is shorter (crossing diagonals / opposite winding).
    if (distance(p1, p3) + distance(p2, p4) > distance(p1, p4) + distance(p2, p3)) {
        std::swap(v3, v4);
        std::swap(p3, p4);
    }
    const double min_a = std::min(detail::min_interior_angle(p1, p2, p3),
                                  detail::min_interior_angle(p2, p4, p3));
    const double min_b = std::min(detail::min_interior_angle(p1, p2, p4),
                                  detail::min_interior_angle(p1, p4, p3));
    std::vector<std::array<int, 3>> a, b;  // diagonals (v2,v3) and (v1,v4)
    if (detail::nondegenerate(p1, p2, p3)) a.push_back({v1, v2, v3});
    if (detail::nondegenerate(p2, p4, p3)) a.push_back({v2, v4, v3});
    if (detail::nondegenerate(p1, p2, p4)) b.push_back({v1, v2, v4});
    if (detail::nondegenerate(p1, p4, p3)) b.push_back({v1, v4, v3});
    // Tie resolves to the (v2,v3) diagonal.
    if (min_a >= min_b) return {std::move(a), std::move(b)};
    return {std::move(b), std::move(a)};
}

}  // namespace detail

// Quad triangulation of a matched edge pair along the diagonal that leaves
// the larger minimum interior angle. Degenerate corners collapse to a single
// triangle.
inline std::vector<std::array<int, 3>> triangulate_pair(const ZipEdge& ei, const ZipEdge& ej) {
    return detail::pair_splits(ei, ej).best;
}

// Single triangle for an unmatched edge: both endpoints connect to the
// nearest endpoint of the recorded nearest edge. Upper edges are traversed
// backward to keep strip winding consistent.
inline std::array<int, 3> triangulate_nonpair(const ZipEdge& e, const ZipEdge& nearest,
                                              bool e_is_upper) {
    const double d0 = distance(e.center, nearest.p0);
    const double d1 = distance(e.center, nearest.p1);
    const int w = d1 < d0 ? nearest.v1 : nearest.v0;
    if (e_is_upper) return {w, e.v1, e.v0};
    return {e.v0, e.v1, w};
}

namespace detail {

inline std::vector<std::vector<ZipEdge>> build_slice_edges(const PolylineStack& stack,
                                                           std::vector<Vec3>& vertices) {
    std::vector<std::vector<ZipEdge>> edges(stack.slices.size());
    for (std::size_t z = 0; z < stack.slices.size(); ++z) {
        const double zc = stack.grid.origin.z + static_cast<double>(z) * stack.grid.sz;
        for (std::size_t li = 0; li < stack.slices[z].size(); ++li) {
            const MidPolyline& line = stack.slices[z][li];
            const int base = static_cast<int>(vertices.size());
            for (const Vec2& p : line.points) vertices.push_back({p.x, p.y, zc});
            const int n = static_cast<int>(line.points.size());
            auto add_edge = [&](int a, int b) {
                ZipEdge e;
                e.v0 = base + a;
                e.v1 = base + b;
                e.p0 = vertices[e.v0];
                e.p1 = vertices[e.v1];
                e.center = (e.p0 + e.p1) * 0.5;
                e.slice_index = static_cast<int>(z);
                e.polyline_id = static_cast<int>(li);
                edges[z].push_back(e);
            };
            for (int a = 0; a + 1 < n; ++a) add_edge(a, a + 1);
            if (line.closed && n > 2) add_edge(n - 1, 0);
        }
    }
    return edges;
}

}  // namespace detail

// Zips a polyline stack into a triangle mesh. The hole threshold is
// 2*sqrt(h^2 + sz^2): anything farther apart than a worst-case matched pair
// stays unconnected so that genuine holes survive.
inline MidSurfaceMesh zip(const PolylineStack& stack) {
    MidSurfaceMesh mesh;
    int slices_with_lines = 0;
    for (const auto& s : stack.slices)
        if (!s.empty()) ++slices_with_lines;
    if (slices_with_lines == 0) throw std::invalid_argument("zip: empty polyline stack");

    const auto edges = detail::build_slice_edges(stack, mesh.vertices);
    if (slices_with_lines == 1) {
        mesh.single_slice = true;
        return mesh;
    }

    const double h = stack.step_h, sz = stack.grid.sz;
    const double hole_threshold = 2.0 * std::sqrt(h * h + sz * sz);

    std::set<std::array<int, 3>> seen;             // sorted vertex triples
    std::map<std::pair<int, int>, int> edge_load;  // manifold guard for extras
    std::set<std::pair<int, int>> strip_dir;       // directed edges, this strip
    auto tri_conflicts = [&](const std::array<int, 3>& t) {
        for (int e = 0; e < 3; ++e)
            if (strip_dir.count({t[e], t[(e + 1) % 3]})) return true;
        return false;
    };
    auto push_triangle = [&](const std::array<int, 3>& t, bool guarded) {
        std::array<int, 3> k = t;
        std::sort(k.begin(), k.end());
        if (seen.count(k)) return;
        // Winding must stay coherent within the strip: a directed edge that
        // is already taken means the candidate would face against an
        // already-emitted neighbor, so it is dropped.
        if (tri_conflicts(t)) return;
        if (guarded) {
            for (int e = 0; e < 3; ++e) {
                int a = t[e], b = t[(e + 1) % 3];
                if (a > b) std::swap(a, b);
                const auto it = edge_load.find({a, b});
                if (it != edge_load.end() && it->second >= 2) return;
            }
        }
        seen.insert(k);
        mesh.triangles.push_back(t);
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            strip_dir.insert({t[e], t[(e + 1) % 3]});
            if (a > b) std::swap(a, b);
            ++edge_load[{a, b}];
        }
    };

    for (std::size_t z = 0; z + 1 < edges.size(); ++z) {
        const auto& lower = edges[z];
        const auto& upper = edges[z + 1];
        if (lower.empty() || upper.empty()) continue;
        strip_dir.clear();
        const PairingResult pr = pair_edges(lower, upper, hole_threshold);
        for (const auto& [i, j] : pr.pairs) {
            // Crossed pairings near ragged rims can make the angle-preferred
            // diagonal run against a neighboring quad's winding; the other
            // diagonal usually restores coherence and beats dropping a face.
            const auto splits = detail::pair_splits(lower[i], upper[j]);
            auto any_conflict = [&](const std::vector<std::array<int, 3>>& ts) {
                return std::any_of(ts.begin(), ts.end(), tri_conflicts);
            };
            const bool use_alt =
                !splits.alt.empty() && any_conflict(splits.best) && !any_conflict(splits.alt);
            for (const auto& t : use_alt ? splits.alt : splits.best) push_triangle(t, false);
        }
        // Close fans first: once an edge carries two triangles the load guard
        // rejects further candidates, so processing non-pairs by ascending
        // center distance keeps the well-shaped triangles and prunes the
        // distant slivers that would otherwise claim shared edges.
        std::vector<PairingResult::NonPair> fans = pr.non_pairs;
        auto np_dist = [&](const PairingResult::NonPair& np) {
            const ZipEdge& e = np.upper ? upper[np.edge] : lower[np.edge];
            const ZipEdge& near = np.upper ? lower[np.nearest] : upper[np.nearest];
            return distance(e.center, near.center);
        };
        std::sort(fans.begin(), fans.end(),
                  [&](const PairingResult::NonPair& a, const PairingResult::NonPair& b) {
                      const double da = np_dist(a), db = np_dist(b);
                      if (da != db) return da < db;
                      if (a.upper != b.upper) return !a.upper;
                      return a.edge < b.edge;
                  });
        for (const auto& np : fans) {
            const ZipEdge& e = np.upper ? upper[np.edge] : lower[np.edge];
            const ZipEdge& near = np.upper ? lower[np.nearest] : upper[np.nearest];
            const auto t = triangulate_nonpair(e, near, np.upper);
            if (detail::nondegenerate(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                      mesh.vertices[t[2]]))
                push_triangle(t, true);
        }
    }
    return mesh;
}

}  // namespace midsurf
