#pragma once

// Readers for labeled segmentation volumes: NRRD (attached or detached raw
// encoding) and MHD+RAW, 8- or 16-bit unsigned, little-endian. Anything else
// is rejected with a diagnostic naming the offending field.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "midsurf/volume.hpp"

namespace midsurf {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

// Reads `count` little-endian elements of `bytes_per` each and widens to i32.
inline std::vector<int32_t> read_raw(std::istream& in, std::size_t count, int bytes_per,
                                     const std::string& what) {
    std::vector<uint8_t> buf(count * static_cast<std::size_t>(bytes_per));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got != buf.size())
        throw std::runtime_error(what + ": expected " + std::to_string(buf.size()) +
                                 " data bytes, got " + std::to_string(got));
    std::vector<int32_t> out(count);
    if (bytes_per == 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = buf[i];
    } else {
        for (std::size_t i = 0; i < count; ++i)
            out[i] = static_cast<int32_t>(buf[2 * i] | (buf[2 * i + 1] << 8));
    }
    return out;
}

inline LabeledVolume load_nrrd(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("NRRD", 0) != 0)
        throw std::runtime_error(path.string() + ": not an NRRD file (bad magic)");

    int dimension = 0, bytes_per = 0;
    std::vector<int> sizes;
    std::vector<double> spacings;
    bool have_spacing = false;
    Vec3 origin{};
    std::string encoding, endian = "little", datafile;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) break;  // header/data separator (attached layout)
        if (line[0] == '#') continue;
        if (line.find(":=") != std::string::npos) continue;  // key-value pairs: ignored
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error(path.string() + ": malformed header line '" + line + "'");
        const std::string field = lower(trim(line.substr(0, colon)));
        const std::string value = trim(line.substr(colon + 1));

        if (field == "type") {
            const std::string t = lower(value);
            if (t == "uchar" || t == "uint8" || t == "uint8_t" || t == "unsigned char")
                bytes_per = 1;
            else if (t == "ushort" || t == "uint16" || t == "uint16_t" ||
                     t == "unsigned short")
                bytes_per = 2;
            else
                throw std::runtime_error(path.string() + ": unsupported type '" + value +
                                         "' (expected 8- or 16-bit unsigned)");
        } else if (field == "dimension") {
            dimension = std::stoi(value);
        } else if (field == "sizes") {
            for (const auto& tok : split_ws(value)) sizes.push_back(std::stoi(tok));
        } else if (field == "encoding") {
            encoding = lower(value);
        } else if (field == "endian") {
            endian = lower(value);
        } else if (field == "spacings") {
            for (const auto& tok : split_ws(value)) spacings.push_back(std::stod(tok));
            have_spacing = true;
        } else if (field == "space directions") {
            // Accept axis-aligned rows "(sx,0,0) (0,sy,0) (0,0,sz)".
            std::string v = value;
            std::replace(v.begin(), v.end(), '(', ' ');
            std::replace(v.begin(), v.end(), ')', ' ');
            std::replace(v.begin(), v.end(), ',', ' ');
            const auto nums = split_ws(v);
            if (nums.size() == 9) {
                spacings = {std::stod(nums[0]), std::stod(nums[4]), std::stod(nums[8])};
                have_spacing = true;
            }
        } else if (field == "space origin") {
            std::string v = value;
            std::replace(v.begin(), v.end(), '(', ' ');
            std::replace(v.begin(), v.end(), ')', ' ');
            std::replace(v.begin(), v.end(), ',', ' ');
            const auto nums = split_ws(v);
            if (nums.size() == 3)
                origin = {std::stod(nums[0]), std::stod(nums[1]), std::stod(nums[2])};
        } else if (field == "data file" || field == "datafile") {
            datafile = value;
        }
        // Remaining fields (kinds, space, ...) carry nothing we need.
    }

    if (bytes_per == 0) throw std::runtime_error(path.string() + ": missing 'type' field");
    if (dimension != 3)
        throw std::runtime_error(path.string() + ": unsupported dimension " +
                                 std::to_string(dimension) + " (expected 3)");
    if (sizes.size() != 3) throw std::runtime_error(path.string() + ": 'sizes' must list 3 values");
    if (encoding != "raw")
        throw std::runtime_error(path.string() + ": unsupported encoding '" + encoding +
                                 "' (only raw)");
    if (bytes_per == 2 && endian != "little")
        throw std::runtime_error(path.string() + ": unsupported endian '" + endian +
                                 "' (only little)");

    LabeledVolume vol;
    vol.grid.nx = sizes[0];
    vol.grid.ny = sizes[1];
    vol.grid.nz = sizes[2];
    vol.grid.origin = origin;
    if (have_spacing && spacings.size() == 3) {
        vol.grid.sx = spacings[0];
        vol.grid.sy = spacings[1];
        vol.grid.sz = spacings[2];
    } else {
        std::fprintf(stderr, "midsurf: warning: %s has no spacing; assuming 1.0\n",
                     path.string().c_str());
    }

    const std::size_t count = vol.grid.voxel_count();
    if (datafile.empty()) {
        vol.labels = read_raw(in, count, bytes_per, path.string());
    } else {
        const auto dpath = path.parent_path() / datafile;
        std::ifstream din(dpath, std::ios::binary);
        if (!din) throw std::runtime_error("cannot open data file '" + dpath.string() + "'");
        vol.labels = read_raw(din, count, bytes_per, dpath.string());
    }
    return vol;
}

inline LabeledVolume load_mhd(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::string line;
    int bytes_per = 0;
    std::vector<int> sizes;
    std::vector<double> spacings;
    bool have_spacing = false;
    Vec3 origin{};
    std::string datafile;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "NDims") {
            if (std::stoi(value) != 3)
                throw std::runtime_error(path.string() + ": NDims must be 3");
        } else if (key == "DimSize") {
            for (const auto& tok : split_ws(value)) sizes.push_back(std::stoi(tok));
        } else if (key == "ElementType") {
            if (value == "MET_UCHAR")
                bytes_per = 1;
            else if (value == "MET_USHORT")
                bytes_per = 2;
            else
                throw std::runtime_error(path.string() + ": unsupported ElementType '" + value +
                                         "' (expected MET_UCHAR or MET_USHORT)");
        } else if (key == "ElementSpacing") {
            for (const auto& tok : split_ws(value)) spacings.push_back(std::stod(tok));
            have_spacing = true;
        } else if (key == "Offset" || key == "Origin" || key == "Position") {
            const auto nums = split_ws(value);
            if (nums.size() == 3)
                origin = {std::stod(nums[0]), std::stod(nums[1]), std::stod(nums[2])};
        } else if (key == "BinaryDataByteOrderMSB") {
            if (lower(value) == "true")
                throw std::runtime_error(path.string() +
                                         ": unsupported BinaryDataByteOrderMSB=True "
                                         "(only little-endian)");
        } else if (key == "CompressedData") {
            if (lower(value) == "true")
                throw std::runtime_error(path.string() +
                                         ": unsupported CompressedData=True (only raw)");
        } else if (key == "ElementDataFile") {
            datafile = value;
        }
    }
    if (bytes_per == 0) throw std::runtime_error(path.string() + ": missing ElementType");
    if (sizes.size() != 3) throw std::runtime_error(path.string() + ": DimSize must list 3 values");
    if (datafile.empty() || datafile == "LOCAL")
        throw std::runtime_error(path.string() +
                                 ": ElementDataFile must name a separate raw file");

    LabeledVolume vol;
    vol.grid.nx = sizes[0];
    vol.grid.ny = sizes[1];
    vol.grid.nz = sizes[2];
    vol.grid.origin = origin;
    if (have_spacing && spacings.size() == 3) {
        vol.grid.sx = spacings[0];
        vol.grid.sy = spacings[1];
        vol.grid.sz = spacings[2];
    } else {
        std::fprintf(stderr, "midsurf: warning: %s has no ElementSpacing; assuming 1.0\n",
                     path.string().c_str());
    }
    const auto dpath = path.parent_path() / datafile;
    std::ifstream din(dpath, std::ios::binary);
    if (!din) throw std::runtime_error("cannot open data file '" + dpath.string() + "'");
    vol.labels = read_raw(din, vol.grid.voxel_count(), bytes_per, dpath.string());
    return vol;
}

}  // namespace detail

// Loads a labeled volume, dispatching on the file extension
// (.nrrd/.nhdr -> NRRD, .mhd -> MHD+RAW).
inline LabeledVolume load_volume(const std::filesystem::path& path) {
    const std::string ext = detail::lower(path.extension().string());
    if (ext == ".nrrd" || ext == ".nhdr") return detail::load_nrrd(path);
    if (ext == ".mhd") return detail::load_mhd(path);
    throw std::runtime_error("unsupported volume format '" + ext +
                             "' (expected .nrrd, .nhdr or .mhd)");
}

}  // namespace midsurf
