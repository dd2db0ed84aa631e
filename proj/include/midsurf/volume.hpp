#pragma once

// Voxel containers and connected-component bookkeeping.
//
// Conventions used throughout:
//  - volumes are stored row-major with x fastest: index = (k*ny + j)*nx + i
//  - voxel (i,j,k) has its physical center at origin + (i*sx, j*sy, k*sz)
//  - 3D objects are 26-connected, in-slice components are 8-connected
//  - slicing always happens along z

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "midsurf/geometry.hpp"

namespace midsurf {

struct GridInfo {
    int nx = 0, ny = 0, nz = 0;
    double sx = 1.0, sy = 1.0, sz = 1.0;
    Vec3 origin{0.0, 0.0, 0.0};

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;
    }
    bool inside(int i, int j, int k) const {
        return i >= 0 && i < nx && j >= 0 && j < ny && k >= 0 && k < nz;
    }
};

// Integer-labeled segmentation volume (label 0 = background).
struct LabeledVolume {
    GridInfo grid;
    std::vector<int32_t> labels;

    int32_t at(int i, int j, int k) const { return labels[grid.index(i, j, k)]; }
};

// Single-object binary mask; 1 = foreground.
struct BinaryMask3D {
    GridInfo grid;
    std::vector<uint8_t> voxels;

    uint8_t at(int i, int j, int k) const { return voxels[grid.index(i, j, k)]; }
    bool foreground(int i, int j, int k) const {
        return grid.inside(i, j, k) && at(i, j, k) != 0;
    }
};

// One 8-connected foreground component of a single z-slice, together with its
// 1-pixel (8-neighborhood) dilation. The dilation exists purely as the trace
// termination region; field values are never read from it.
struct SliceComponent {
    int slice_index = 0;
    int nx = 0, ny = 0;
    std::vector<uint32_t> pixels;        // linear in-slice indices j*nx+i, ascending
    std::vector<uint8_t> in_component;   // nx*ny occupancy
    std::vector<uint8_t> in_dilated;     // nx*ny occupancy of the dilated set

    bool contains(int i, int j) const {
        if (i < 0 || i >= nx || j < 0 || j >= ny) return false;
        return in_component[static_cast<std::size_t>(j) * nx + i] != 0;
    }
    bool dilated_contains(int i, int j) const {
        if (i < 0 || i >= nx || j < 0 || j >= ny) return false;
        return in_dilated[static_cast<std::size_t>(j) * nx + i] != 0;
    }
    std::size_t pixel_count() const { return pixels.size(); }
};

// Fills in_dilated as the 1-pixel 8-neighborhood dilation of in_component,
// clipped to the slice bounds.
inline void dilate(SliceComponent& comp) {
    comp.in_dilated.assign(comp.in_component.size(), 0);
    for (uint32_t p : comp.pixels) {
        const int i = static_cast<int>(p % comp.nx);
        const int j = static_cast<int>(p / comp.nx);
        for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
                const int ii = i + di, jj = j + dj;
                if (ii < 0 || ii >= comp.nx || jj < 0 || jj >= comp.ny) continue;
                comp.in_dilated[static_cast<std::size_t>(jj) * comp.nx + ii] = 1;
            }
        }
    }
}

// Splits the voxels carrying `label` into 26-connected objects, each returned
// as a standalone binary mask over the full grid. Objects are ordered by their
// smallest linear voxel index. An absent label yields an empty list.
inline std::vector<BinaryMask3D> extract_objects(const LabeledVolume& vol, int32_t label) {
    if (label <= 0) throw std::invalid_argument("extract_objects: label must be positive");
    const GridInfo& g = vol.grid;
    std::vector<uint8_t> visited(g.voxel_count(), 0);
    std::vector<BinaryMask3D> objects;
    std::vector<std::size_t> stack;

    for (std::size_t start = 0; start < g.voxel_count(); ++start) {
        if (visited[start] || vol.labels[start] != label) continue;
        BinaryMask3D mask;
        mask.grid = g;
        mask.voxels.assign(g.voxel_count(), 0);
        stack.clear();
        stack.push_back(start);
        visited[start] = 1;
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            mask.voxels[cur] = 1;
            const int i = static_cast<int>(cur % g.nx);
            const int j = static_cast<int>((cur / g.nx) % g.ny);
            const int k = static_cast<int>(cur / (static_cast<std::size_t>(g.nx) * g.ny));
            for (int dk = -1; dk <= 1; ++dk) {
                for (int dj = -1; dj <= 1; ++dj) {
                    for (int di = -1; di <= 1; ++di) {
                        if (di == 0 && dj == 0 && dk == 0) continue;
                        const int ii = i + di, jj = j + dj, kk = k + dk;
                        if (!g.inside(ii, jj, kk)) continue;
                        const std::size_t n = g.index(ii, jj, kk);
                        if (visited[n] || vol.labels[n] != label) continue;
                        visited[n] = 1;
                        stack.push_back(n);
                    }
                }
            }
        }
        objects.push_back(std::move(mask));
    }
    return objects;
}

// 8-connected foreground components of slice z of a binary mask, ordered by
// smallest (y, x) pixel, each with its dilation precomputed.
inline std::vector<SliceComponent> slice_components(const BinaryMask3D& mask, int z) {
    const GridInfo& g = mask.grid;
    if (z < 0 || z >= g.nz) throw std::out_of_range("slice_components: slice index out of range");
    const std::size_t plane = static_cast<std::size_t>(g.nx) * g.ny;
    std::vector<uint8_t> visited(plane, 0);
    std::vector<SliceComponent> comps;
    std::vector<uint32_t> stack;

    for (std::size_t start = 0; start < plane; ++start) {
        if (visited[start]) continue;
        if (mask.voxels[plane * z + start] == 0) continue;
        SliceComponent comp;
        comp.slice_index = z;
        comp.nx = g.nx;
        comp.ny = g.ny;
        comp.in_component.assign(plane, 0);
        stack.clear();
        stack.push_back(static_cast<uint32_t>(start));
        visited[start] = 1;
        while (!stack.empty()) {
            const uint32_t cur = stack.back();
            stack.pop_back();
            comp.in_component[cur] = 1;
            const int i = static_cast<int>(cur % g.nx);
            const int j = static_cast<int>(cur / g.nx);
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    const int ii = i + di, jj = j + dj;
                    if (ii < 0 || ii >= g.nx || jj < 0 || jj >= g.ny) continue;
                    const std::size_t n = static_cast<std::size_t>(jj) * g.nx + ii;
                    if (visited[n] || mask.voxels[plane * z + n] == 0) continue;
                    visited[n] = 1;
                    stack.push_back(static_cast<uint32_t>(n));
                }
            }
        }
        for (std::size_t p = 0; p < plane; ++p)
            if (comp.in_component[p]) comp.pixels.push_back(static_cast<uint32_t>(p));
        dilate(comp);
        comps.push_back(std::move(comp));
    }
    return comps;
}

}  // namespace midsurf
