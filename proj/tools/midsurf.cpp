// Command-line front end: extracts mid-surface meshes from a labeled volume
// (or a built-in phantom) and writes OBJ meshes plus a run manifest. The
// pipeline is parameter-free by design, so there are no tuning flags.

#include <CLI11.hpp>

#include "midsurf/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mid-surface mesh extraction from thin-shell segmentations"};
    midsurf::CliOptions opt;

    app.add_option("--input", opt.input, "input volume (.nrrd/.nhdr/.mhd)");
    app.add_option("--phantom", opt.phantom,
                   "synthetic input, e.g. cylinder:r_in=10,r_out=14,dims=64");
    app.add_option("--label", opt.label, "label to extract (default 1)");
    app.add_option("--output", opt.output, "output directory")->required();
    app.add_flag("--dump-polylines", opt.dump_polylines,
                 "also write the traced per-slice polylines");
    app.add_flag("--report", opt.report, "write a mesh quality report per object");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return midsurf::kExitUsage;
    }
    return midsurf::run_pipeline(opt);
}
