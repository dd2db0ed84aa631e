#pragma once

// Mesh and polyline writers. All numeric output is printed with 6 significant
// decimals through a fixed format string, so identical inputs produce
// byte-identical files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "midsurf/mesh.hpp"
#include "midsurf/midpolyline.hpp"

namespace midsurf {

enum class MeshFormat { Obj, PlyAscii };

namespace detail {

inline std::string fmt_coord(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace detail

// OBJ: "v x y z" lines followed by 1-based "f a b c" lines.
// PLY: ascii 1.0 with the standard vertex/face elements.
inline void write_mesh(const MidSurfaceMesh& mesh, const std::filesystem::path& path,
                       MeshFormat format) {
    auto out = detail::open_out(path);
    if (format == MeshFormat::Obj) {
        for (const Vec3& v : mesh.vertices)
            out << "v " << detail::fmt_coord(v.x) << ' ' << detail::fmt_coord(v.y) << ' '
                << detail::fmt_coord(v.z) << '\n';
        for (const auto& t : mesh.triangles)
            out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    } else {
        out << "ply\nformat ascii 1.0\n";
        out << "element vertex " << mesh.vertices.size() << '\n';
        out << "property float x\nproperty float y\nproperty float z\n";
        out << "element face " << mesh.triangles.size() << '\n';
        out << "property list uchar int vertex_indices\nend_header\n";
        for (const Vec3& v : mesh.vertices)
            out << detail::fmt_coord(v.x) << ' ' << detail::fmt_coord(v.y) << ' '
                << detail::fmt_coord(v.z) << '\n';
        for (const auto& t : mesh.triangles)
            out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
}

// OBJ line elements: one "l i1 i2 ... [i1]" per polyline (closed polylines
// repeat the first index to close the loop).
inline void write_polylines(const PolylineStack& stack, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    int base = 1;
    for (std::size_t z = 0; z < stack.slices.size(); ++z) {
        const double zc = stack.grid.origin.z + static_cast<double>(z) * stack.grid.sz;
        for (const MidPolyline& line : stack.slices[z]) {
            for (const Vec2& p : line.points)
                out << "v " << detail::fmt_coord(p.x) << ' ' << detail::fmt_coord(p.y) << ' '
                    << detail::fmt_coord(zc) << '\n';
            out << 'l';
            for (std::size_t i = 0; i < line.points.size(); ++i)
                out << ' ' << base + static_cast<int>(i);
            if (line.closed) out << ' ' << base;
            out << '\n';
            base += static_cast<int>(line.points.size());
        }
    }
}

}  // namespace midsurf
