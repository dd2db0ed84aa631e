#pragma once

// Triangle mesh produced by zipping stacked polylines, plus the edge/boundary
// utilities the quality metrics and tests build on.

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "midsurf/geometry.hpp"

namespace midsurf {

struct MidSurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    bool single_slice = false;  // stack had polylines on one slice only

    std::array<Vec3, 3> triangle_points(std::size_t t) const {
        const auto& tri = triangles[t];
        return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
    }
};

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * norm(cross(b - a, c - a));
}

// Undirected edge -> number of incident triangles.
inline std::map<std::pair<int, int>, int> edge_incidence(const MidSurfaceMesh& mesh) {
    std::map<std::pair<int, int>, int> counts;
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            ++counts[{a, b}];
        }
    }
    return counts;
}

// Number of connected components of the boundary-edge graph (edges with
// exactly one incident triangle). For a manifold-with-boundary mesh this is
// the number of boundary loops.
inline int boundary_loop_count(const MidSurfaceMesh& mesh) {
    const auto counts = edge_incidence(mesh);
    std::map<int, std::vector<int>> adj;  // vertex -> boundary neighbors
    for (const auto& [edge, n] : counts) {
        if (n != 1) continue;
        adj[edge.first].push_back(edge.second);
        adj[edge.second].push_back(edge.first);
    }
    std::map<int, int> state;  // vertex -> visited
    int loops = 0;
    for (const auto& [v, _] : adj) {
        if (state.count(v)) continue;
        ++loops;
        std::vector<int> stack{v};
        state[v] = 1;
        while (!stack.empty()) {
            const int cur = stack.back();
            stack.pop_back();
            for (int n : adj[cur]) {
                if (state.count(n)) continue;
                state[n] = 1;
                stack.push_back(n);
            }
        }
    }
    return loops;
}

}  // namespace midsurf
