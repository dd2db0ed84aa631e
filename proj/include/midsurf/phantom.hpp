#pragma once

// Synthetic thin-shell volumes with a known analytic mid-surface. These are
// the ground-truth inputs for tests and for the --phantom CLI path.

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "midsurf/volume.hpp"

namespace midsurf {

enum class PhantomShape { CylinderShell, SphereShell, TorusShell, Slab };

// Axis-aligned voxel box forced to background; bounds are half-open
// ([x0,x1) etc.) so a 10-voxel window has x1 - x0 == 10.
struct HoleWindow {
    int x0 = 0, x1 = 0, y0 = 0, y1 = 0, z0 = 0, z1 = 0;
};

struct PhantomSpec {
    PhantomShape shape = PhantomShape::CylinderShell;
    int nx = 64, ny = 64, nz = 64;
    double r_inner = 10.0;   // shell inner radius (cylinder/sphere/torus)
    double r_outer = 14.0;   // shell outer radius
    double ring_radius = 18.0;  // torus ring radius
    char ring_axis = 'z';    // torus ring symmetry axis; 'z' puts the ring in xy
    int thickness = 5;       // slab thickness in voxels
    std::vector<HoleWindow> holes;
};

namespace detail {

// Distance from the offset (dx,dy,dz) to the torus ring circle of radius R
// whose symmetry axis is `axis`; the ring lies in the plane orthogonal to it.
inline double torus_ring_distance(double dx, double dy, double dz, double R, char axis) {
    double u = dx, v = dy, w = dz;  // ring plane (u,v), symmetry axis w
    if (axis == 'y') {
        u = dx;
        v = dz;
        w = dy;
    } else if (axis == 'x') {
        u = dy;
        v = dz;
        w = dx;
    }
    return std::hypot(std::hypot(u, v) - R, w);
}

}  // namespace detail

struct Phantom {
    LabeledVolume volume;
    PhantomSpec spec;

    Vec3 center() const {
        const GridInfo& g = volume.grid;
        return {g.origin.x + 0.5 * (g.nx - 1) * g.sx,
                g.origin.y + 0.5 * (g.ny - 1) * g.sy,
                g.origin.z + 0.5 * (g.nz - 1) * g.sz};
    }

    // Distance from a physical point to the analytic mid-surface.
    double mid_surface_distance(const Vec3& p) const {
        const Vec3 c = center();
        const double mid = 0.5 * (spec.r_inner + spec.r_outer);
        switch (spec.shape) {
            case PhantomShape::CylinderShell: {
                const double rho = std::hypot(p.x - c.x, p.y - c.y);
                return std::abs(rho - mid);
            }
            case PhantomShape::SphereShell:
                return std::abs(distance(p, c) - mid);
            case PhantomShape::TorusShell: {
                const double d = detail::torus_ring_distance(
                    p.x - c.x, p.y - c.y, p.z - c.z, spec.ring_radius, spec.ring_axis);
                return std::abs(d - mid);
            }
            case PhantomShape::Slab: {
                const GridInfo& g = volume.grid;
                const int z0 = (g.nz - spec.thickness) / 2;
                const double zmid = g.origin.z + (z0 + 0.5 * (spec.thickness - 1)) * g.sz;
                return std::abs(p.z - zmid);
            }
        }
        return 0.0;
    }
};

namespace detail {

inline bool in_hole(const PhantomSpec& spec, int i, int j, int k) {
    for (const HoleWindow& h : spec.holes)
        if (i >= h.x0 && i < h.x1 && j >= h.y0 && j < h.y1 && k >= h.z0 && k < h.z1)
            return true;
    return false;
}

}  // namespace detail

// Builds the labeled volume (label 1, spacing 1, origin 0) for a phantom
// spec. A voxel is foreground iff its center lies inside the shell. The shell
// must fit inside the grid with at least a 2-voxel margin.
inline Phantom generate_phantom(const PhantomSpec& spec) {
    if (spec.nx < 4 || spec.ny < 4 || spec.nz < 4)
        throw std::invalid_argument("phantom: dims too small");
    if (spec.shape != PhantomShape::Slab && !(spec.r_inner < spec.r_outer))
        throw std::invalid_argument("phantom: requires r_inner < r_outer");
    for (const HoleWindow& h : spec.holes) {
        if (h.x0 < 0 || h.x1 > spec.nx || h.y0 < 0 || h.y1 > spec.ny || h.z0 < 0 ||
            h.z1 > spec.nz || h.x0 >= h.x1 || h.y0 >= h.y1 || h.z0 >= h.z1)
            throw std::invalid_argument("phantom: hole window outside volume");
    }

    Phantom ph;
    ph.spec = spec;
    GridInfo& g = ph.volume.grid;
    g.nx = spec.nx;
    g.ny = spec.ny;
    g.nz = spec.nz;
    const double cx = 0.5 * (g.nx - 1), cy = 0.5 * (g.ny - 1), cz = 0.5 * (g.nz - 1);
    const double margin = 2.0;

    switch (spec.shape) {
        case PhantomShape::CylinderShell:
        case PhantomShape::SphereShell:
            if (spec.r_outer > std::min(cx, cy) - margin ||
                (spec.shape == PhantomShape::SphereShell && spec.r_outer > cz - margin))
                throw std::invalid_argument("phantom: shell does not fit with 2-voxel margin");
            break;
        case PhantomShape::TorusShell: {
            const double reach = spec.ring_radius + spec.r_outer;
            const double cu = spec.ring_axis == 'x' ? cy : cx;
            const double cv = spec.ring_axis == 'z' ? cy : cz;
            const double cw = spec.ring_axis == 'x' ? cx : (spec.ring_axis == 'y' ? cy : cz);
            if (reach > std::min(cu, cv) - margin || spec.r_outer > cw - margin)
                throw std::invalid_argument("phantom: shell does not fit with 2-voxel margin");
            break;
        }
        case PhantomShape::Slab:
            if (spec.thickness < 1 || spec.thickness > spec.nz - 4)
                throw std::invalid_argument("phantom: slab does not fit with 2-voxel margin");
            break;
    }

    ph.volume.labels.assign(g.voxel_count(), 0);
    const int zlo = 2, zhi = g.nz - 3;  // axial extent for the cylinder
    const int slab_z0 = (g.nz - spec.thickness) / 2;

    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                bool fg = false;
                const double dx = i - cx, dy = j - cy, dz = k - cz;
                switch (spec.shape) {
                    case PhantomShape::CylinderShell: {
                        const double rho = std::hypot(dx, dy);
                        fg = k >= zlo && k <= zhi && rho >= spec.r_inner && rho <= spec.r_outer;
                        break;
                    }
                    case PhantomShape::SphereShell: {
                        const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
                        fg = r >= spec.r_inner && r <= spec.r_outer;
                        break;
                    }
                    case PhantomShape::TorusShell: {
                        const double d = detail::torus_ring_distance(dx, dy, dz,
                                                                     spec.ring_radius,
                                                                     spec.ring_axis);
                        fg = d >= spec.r_inner && d <= spec.r_outer;
                        break;
                    }
                    case PhantomShape::Slab:
                        fg = k >= slab_z0 && k < slab_z0 + spec.thickness;
                        break;
                }
                if (fg && !detail::in_hole(spec, i, j, k)) ph.volume.labels[g.index(i, j, k)] = 1;
            }
        }
    }
    return ph;
}

// Parses a phantom description of the form
//   shape:key=value,key=value,...
// e.g. "cylinder:r_in=10,r_out=14,dims=64" with optional repeated
// hole=x0:x1:y0:y1:z0:z1 windows. Shapes: cylinder, sphere, torus, slab.
// Torus only: axis=x|y|z selects the ring symmetry axis (default z).
inline PhantomSpec parse_phantom_spec(const std::string& text) {
    PhantomSpec spec;
    const auto colon = text.find(':');
    const std::string shape = text.substr(0, colon);
    if (shape == "cylinder")
        spec.shape = PhantomShape::CylinderShell;
    else if (shape == "sphere")
        spec.shape = PhantomShape::SphereShell;
    else if (shape == "torus")
        spec.shape = PhantomShape::TorusShell;
    else if (shape == "slab")
        spec.shape = PhantomShape::Slab;
    else
        throw std::invalid_argument("phantom spec: unknown shape '" + shape + "'");
    if (colon == std::string::npos) return spec;

    std::string rest = text.substr(colon + 1);
    std::size_t pos = 0;
    auto parse_ints = [](const std::string& s, char sep) {
        std::vector<int> out;
        std::size_t p = 0;
        while (p <= s.size()) {
            const auto e = s.find(sep, p);
            const std::string tok = s.substr(p, e == std::string::npos ? e : e - p);
            int v = 0;
            const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
                throw std::invalid_argument("phantom spec: bad integer '" + tok + "'");
            out.push_back(v);
            if (e == std::string::npos) break;
            p = e + 1;
        }
        return out;
    };
    while (pos < rest.size()) {
        auto comma = rest.find(',', pos);
        if (comma == std::string::npos) comma = rest.size();
        const std::string item = rest.substr(pos, comma - pos);
        pos = comma + 1;
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("phantom spec: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        if (key == "r_in")
            spec.r_inner = std::stod(val);
        else if (key == "r_out")
            spec.r_outer = std::stod(val);
        else if (key == "ring_r")
            spec.ring_radius = std::stod(val);
        else if (key == "axis") {
            if (spec.shape != PhantomShape::TorusShell)
                throw std::invalid_argument("phantom spec: axis only applies to torus");
            if (val != "x" && val != "y" && val != "z")
                throw std::invalid_argument("phantom spec: axis must be x, y, or z");
            spec.ring_axis = val[0];
        } else if (key == "thickness")
            spec.thickness = std::stoi(val);
        else if (key == "dims") {
            const auto d = parse_ints(val, 'x');
            if (d.size() == 1) {
                spec.nx = spec.ny = spec.nz = d[0];
            } else if (d.size() == 3) {
                spec.nx = d[0];
                spec.ny = d[1];
                spec.nz = d[2];
            } else {
                throw std::invalid_argument("phantom spec: dims must be N or NXxNYxNZ");
            }
        } else if (key == "hole") {
            const auto b = parse_ints(val, ':');
            if (b.size() != 6)
                throw std::invalid_argument("phantom spec: hole needs x0:x1:y0:y1:z0:z1");
            spec.holes.push_back({b[0], b[1], b[2], b[3], b[4], b[5]});
        } else {
            throw std::invalid_argument("phantom spec: unknown key '" + key + "'");
        }
    }
    return spec;
}

}  // namespace midsurf
