// SPDX-License-Identifier: Apache-2.0
#include "lfdeblur/lightfield_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace lfdeblur {

namespace {

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

struct PngCloser {
    std::FILE* fp = nullptr;
    ~PngCloser() {
        if (fp) std::fclose(fp);
    }
};

inline uint8_t quantize8(float v) {
    const float c = std::clamp(v, 0.0f, 1.0f);
    return static_cast<uint8_t>(std::lround(c * 255.0f));
}

}  // namespace

std::string view_filename(const std::string& pattern, int u, int v) {
    std::string name = replace_all(pattern, "{row}", std::to_string(u));
    return replace_all(name, "{col}", std::to_string(v));
}

void save_image_png(const Image& img, const fs::path& path) {
    if (img.channels != 3) throw std::invalid_argument("save_image_png: only RGB images are supported");
    PngCloser file;
    file.fp = std::fopen(path.string().c_str(), "wb");
    if (!file.fp) throw std::runtime_error("save_image_png: cannot open " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("save_image_png: libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("save_image_png: write error for " + path.string());
    }
    png_init_io(png, file.fp);
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<uint8_t> row(static_cast<size_t>(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) row[static_cast<size_t>(x) * 3 + c] = quantize8(img.at(y, x, c));
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Image load_image_png(const fs::path& path) {
    PngCloser file;
    file.fp = std::fopen(path.string().c_str(), "rb");
    if (!file.fp) throw std::runtime_error("load_image_png: cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("load_image_png: libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("load_image_png: read error for " + path.string());
    }
    png_init_io(png, file.fp);
    png_read_info(png, info);

    // Normalize anything we might be handed to 8-bit RGB.
    png_set_strip_16(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
        png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    Image img(h, w, 3);
    std::vector<uint8_t> row(static_cast<size_t>(w) * 3);
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) img.at(y, x, c) = row[static_cast<size_t>(x) * 3 + c] / 255.0f;
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void save_lightfield(const LightField& lf, const fs::path& dir, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 32) {
        throw std::invalid_argument("save_lightfield: bit_depth must be 8 or 32");
    }
    fs::create_directories(dir);

    json manifest;
    manifest["version"] = LfDirFormat::kVersion;
    manifest["angular_size"] = {lf.views_u(), lf.views_v()};
    manifest["spatial_size"] = {lf.height(), lf.width()};
    manifest["channels"] = LightField::kChannels;
    manifest["bit_depth"] = bit_depth;
    manifest["baseline_px"] = lf.intrinsics().baseline_px;
    manifest["focal_px"] = lf.intrinsics().focal_px;
    manifest["principal_point"] = {lf.intrinsics().principal_x, lf.intrinsics().principal_y};
    manifest["filename_pattern"] = LfDirFormat::kDefaultPattern;
    if (bit_depth == 32) manifest["raw_payload"] = LfDirFormat::kRawName;

    std::ofstream mf(dir / LfDirFormat::kManifestName);
    if (!mf) throw std::runtime_error("save_lightfield: cannot write " + (dir / LfDirFormat::kManifestName).string());
    mf << manifest.dump(2) << "\n";
    mf.close();

    for (int u = 0; u < lf.views_u(); ++u)
        for (int v = 0; v < lf.views_v(); ++v)
            save_image_png(lf.view(u, v), dir / view_filename(LfDirFormat::kDefaultPattern, u, v));

    if (bit_depth == 32) {
        std::ofstream raw(dir / LfDirFormat::kRawName, std::ios::binary);
        if (!raw) throw std::runtime_error("save_lightfield: cannot write " + (dir / LfDirFormat::kRawName).string());
        static_assert(sizeof(float) == 4);
        raw.write(reinterpret_cast<const char*>(lf.data().data()),
                  static_cast<std::streamsize>(lf.data().size() * sizeof(float)));
    }
}

LightField load_lightfield(const fs::path& dir) {
    const fs::path manifest_path = dir / LfDirFormat::kManifestName;
    if (!fs::exists(manifest_path)) {
        throw std::runtime_error("load_lightfield: missing manifest " + manifest_path.string());
    }
    json manifest;
    {
        std::ifstream mf(manifest_path);
        try {
            mf >> manifest;
        } catch (const std::exception& e) {
            throw std::runtime_error("load_lightfield: bad manifest " + manifest_path.string() + ": " + e.what());
        }
    }

    const int U = manifest.at("angular_size").at(0).get<int>();
    const int V = manifest.at("angular_size").at(1).get<int>();
    const int H = manifest.at("spatial_size").at(0).get<int>();
    const int W = manifest.at("spatial_size").at(1).get<int>();
    const int bit_depth = manifest.value("bit_depth", 8);
    const std::string pattern = manifest.value("filename_pattern", std::string(LfDirFormat::kDefaultPattern));

    Intrinsics intr;
    intr.baseline_px = manifest.value("baseline_px", 1.0);
    intr.focal_px = manifest.value("focal_px", 500.0);
    if (manifest.contains("principal_point")) {
        intr.principal_x = manifest["principal_point"].at(0).get<double>();
        intr.principal_y = manifest["principal_point"].at(1).get<double>();
    }
    LightField lf(U, V, H, W, intr);

    // Declared views must all exist, and no undeclared view files may be
    // present (a stale u9_v9.png would silently shadow future saves).
    std::set<std::string> declared;
    for (int u = 0; u < U; ++u)
        for (int v = 0; v < V; ++v) {
            const std::string name = view_filename(pattern, u, v);
            declared.insert(name);
            if (!fs::exists(dir / name)) {
                throw std::runtime_error("load_lightfield: missing view file " + (dir / name).string());
            }
        }
    const std::regex view_re("^u[0-9]+_v[0-9]+\\.png$");
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (std::regex_match(name, view_re) && !declared.count(name)) {
            throw std::runtime_error("load_lightfield: extra view file " + entry.path().string());
        }
    }

    if (bit_depth == 32 && manifest.contains("raw_payload")) {
        const fs::path raw_path = dir / manifest["raw_payload"].get<std::string>();
        std::ifstream raw(raw_path, std::ios::binary);
        if (!raw) throw std::runtime_error("load_lightfield: missing raw payload " + raw_path.string());
        raw.read(reinterpret_cast<char*>(lf.data().data()),
                 static_cast<std::streamsize>(lf.data().size() * sizeof(float)));
        if (raw.gcount() != static_cast<std::streamsize>(lf.data().size() * sizeof(float))) {
            throw std::runtime_error("load_lightfield: raw payload " + raw_path.string() +
                                     " is smaller than the declared dimensions");
        }
        return lf;
    }

    for (int u = 0; u < U; ++u)
        for (int v = 0; v < V; ++v) {
            const fs::path p = dir / view_filename(pattern, u, v);
            Image img = load_image_png(p);
            if (img.height != H || img.width != W) {
                throw std::runtime_error("load_lightfield: " + p.string() + " is " + std::to_string(img.height) +
                                         "x" + std::to_string(img.width) + ", manifest declares " +
                                         std::to_string(H) + "x" + std::to_string(W));
            }
            lf.set_view(u, v, img);
        }
    return lf;
}

}  // namespace lfdeblur
