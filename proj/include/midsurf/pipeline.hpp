#pragma once

// End-to-end pipeline: label -> objects -> ridge field -> per-slice
// mid-polylines -> zipped mesh, plus the CLI driver used by tools/midsurf.
// The pipeline has no tunable parameters; everything derives from the data.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "midsurf/distance_transform.hpp"
#include "midsurf/mesh_io.hpp"
#include "midsurf/midpolyline.hpp"
#include "midsurf/phantom.hpp"
#include "midsurf/quality.hpp"
#include "midsurf/smoothing.hpp"
#include "midsurf/volume.hpp"
#include "midsurf/volume_io.hpp"
#include "midsurf/zipper.hpp"

namespace midsurf {

struct PipelineTimings {
    double ridge_field_s = 0.0;  // distance transform + smoothing
    double tracing_s = 0.0;      // per-slice polyline extraction
    double meshing_s = 0.0;      // zipping
};

struct ExtractedObject {
    BinaryMask3D mask;
    PolylineStack stack;
    MidSurfaceMesh mesh;
    bool has_mesh = false;
    bool ok = true;
    std::string error;
};

// Runs the full pipeline for every 26-connected object carrying the label.
// Failures are recorded per object; the remaining objects still run.
inline std::vector<ExtractedObject> extract_all(const LabeledVolume& volume, int32_t label,
                                                PipelineTimings* timings = nullptr) {
    using clock = std::chrono::steady_clock;
    auto seconds = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double>(b - a).count();
    };
    std::vector<ExtractedObject> out;
    for (BinaryMask3D& mask : extract_objects(volume, label)) {
        ExtractedObject obj;
        obj.mask = std::move(mask);
        try {
            const auto t0 = clock::now();
            const ScalarField3D smoothed = smooth_sdf(compute_sdf(obj.mask));
            const auto t1 = clock::now();
            obj.stack = extract_stack(obj.mask, smoothed);
            const auto t2 = clock::now();
            if (obj.stack.polyline_count() > 0) {
                obj.mesh = zip(obj.stack);
                obj.has_mesh = true;
            }
            const auto t3 = clock::now();
            if (timings) {
                timings->ridge_field_s += seconds(t0, t1);
                timings->tracing_s += seconds(t1, t2);
                timings->meshing_s += seconds(t2, t3);
            }
        } catch (const std::exception& e) {
            obj.ok = false;
            obj.error = e.what();
        }
        out.push_back(std::move(obj));
    }
    return out;
}

struct CliOptions {
    std::string input;    // volume file; mutually exclusive with phantom
    std::string phantom;  // phantom spec string
    int label = 1;
    std::string output;   // output directory
    bool dump_polylines = false;
    bool report = false;
};

// Exit codes of the CLI pipeline.
enum CliExit : int {
    kExitOk = 0,
    kExitFailure = 1,   // I/O or per-object pipeline failure
    kExitUsage = 2,     // bad invocation
    kExitNoObjects = 3, // the label selects nothing
};

inline constexpr const char* kToolVersion = "0.1.0";

inline int run_pipeline(const CliOptions& opt) {
    namespace fs = std::filesystem;
    if (opt.output.empty()) {
        std::fprintf(stderr, "midsurf: --output is required\n");
        return kExitUsage;
    }
    if (opt.input.empty() == opt.phantom.empty()) {
        std::fprintf(stderr, "midsurf: exactly one of --input or --phantom is required\n");
        return kExitUsage;
    }
    if (opt.label <= 0) {
        std::fprintf(stderr, "midsurf: --label must be positive\n");
        return kExitUsage;
    }

    LabeledVolume volume;
    std::string input_name;
    try {
        if (!opt.phantom.empty()) {
            volume = generate_phantom(parse_phantom_spec(opt.phantom)).volume;
            input_name = "phantom:" + opt.phantom;
        } else {
            volume = load_volume(opt.input);
            input_name = opt.input;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "midsurf: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "midsurf: %s\n", e.what());
        return kExitFailure;
    }

    std::error_code ec;
    fs::create_directories(opt.output, ec);
    if (ec) {
        std::fprintf(stderr, "midsurf: cannot create output directory '%s': %s\n",
                     opt.output.c_str(), ec.message().c_str());
        return kExitFailure;
    }

    PipelineTimings timings;
    const auto objects = extract_all(volume, opt.label, &timings);
    if (objects.empty()) {
        std::fprintf(stderr, "midsurf: label %d selects no objects\n", opt.label);
        return kExitNoObjects;
    }

    bool any_failed = false;
    std::string manifest;
    char buf[256];
    manifest += "input = " + input_name + "\n";
    manifest += "label = " + std::to_string(opt.label) + "\n";
    manifest += "tool_version = " + std::string(kToolVersion) + "\n";
    manifest += "object_count = " + std::to_string(objects.size()) + "\n";

    for (std::size_t k = 0; k < objects.size(); ++k) {
        const ExtractedObject& obj = objects[k];
        const std::string stem = "object_" + std::to_string(k);
        std::string status = "ok";
        if (!obj.ok) {
            any_failed = true;
            status = "failed: " + obj.error;
        } else {
            try {
                write_mesh(obj.mesh, fs::path(opt.output) / (stem + ".obj"), MeshFormat::Obj);
                if (opt.dump_polylines)
                    write_polylines(obj.stack, fs::path(opt.output) / (stem + "_lines.obj"));
                if (opt.report) {
                    const QualityReport rep = compute_quality_report(obj.mesh);
                    std::ofstream out(fs::path(opt.output) / (stem + "_report.txt"),
                                      std::ios::binary);
                    out << format_report(rep, true);
                }
            } catch (const std::exception& e) {
                any_failed = true;
                status = std::string("failed: ") + e.what();
            }
        }
        manifest += stem + "_polylines = " + std::to_string(obj.stack.polyline_count()) + "\n";
        manifest += stem + "_vertices = " + std::to_string(obj.mesh.vertices.size()) + "\n";
        manifest += stem + "_triangles = " + std::to_string(obj.mesh.triangles.size()) + "\n";
        manifest += stem + "_status = " + status + "\n";
    }
    std::snprintf(buf, sizeof(buf), "time_ridge_field_s = %.4f\n", timings.ridge_field_s);
    manifest += buf;
    std::snprintf(buf, sizeof(buf), "time_tracing_s = %.4f\n", timings.tracing_s);
    manifest += buf;
    std::snprintf(buf, sizeof(buf), "time_meshing_s = %.4f\n", timings.meshing_s);
    manifest += buf;

    std::ofstream mout(fs::path(opt.output) / "manifest.txt", std::ios::binary);
    if (!mout) {
        std::fprintf(stderr, "midsurf: cannot write manifest\n");
        return kExitFailure;
    }
    mout << manifest;
    return any_failed ? kExitFailure : kExitOk;
}

}  // namespace midsurf
