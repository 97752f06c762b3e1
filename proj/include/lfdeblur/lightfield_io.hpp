// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "lfdeblur/lightfield.hpp"

namespace lfdeblur {

/// On-disk layout: a directory holding `manifest.json` plus one 8-bit PNG
/// per view named by `filename_pattern` (default "u{row}_v{col}.png", row = u,
/// col = v). At bit depth 32 a little-endian float32 payload `data.f32` in
/// (u, v, y, x, c) order is written alongside the PNGs and takes precedence
/// on load, making the round trip lossless.
struct LfDirFormat {
    static constexpr int kVersion = 1;
    static constexpr const char* kManifestName = "manifest.json";
    static constexpr const char* kRawName = "data.f32";
    static constexpr const char* kDefaultPattern = "u{row}_v{col}.png";
};

/// Writes manifest + PNGs (+ raw payload when bit_depth == 32). Creates the
/// directory if needed. bit_depth must be 8 or 32.
void save_lightfield(const LightField& lf, const std::filesystem::path& dir, int bit_depth = 8);

/// Loads a light-field directory. Throws std::runtime_error naming the
/// offending path on a missing manifest, missing or extra view files, or a
/// dimension mismatch between manifest and image data.
LightField load_lightfield(const std::filesystem::path& dir);

/// 8-bit PNG helpers used for views and EPI export. Values are clamped to
/// [0,1] and quantized with round(v * 255).
void save_image_png(const Image& img, const std::filesystem::path& path);
Image load_image_png(const std::filesystem::path& path);

std::string view_filename(const std::string& pattern, int u, int v);

}  // namespace lfdeblur
