// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace lfdeblur {

/// Camera intrinsics shared by all sub-aperture views. The per-view
/// principal point is offset from (principal_x, principal_y) by
/// (view index - central index) * baseline_px along the matching axis.
struct Intrinsics {
    double focal_px = 500.0;
    double baseline_px = 1.0;
    double principal_x = 0.0;  // p_c
    double principal_y = 0.0;  // q_c
};

/// A plain 2D RGB image, row-major, channel-interleaved, samples in [0,1].
struct Image {
    int height = 0;
    int width = 0;
    int channels = 3;
    std::vector<float> data;

    Image() = default;
    Image(int h, int w, int c = 3) : height(h), width(w), channels(c), data(static_cast<size_t>(h) * w * c, 0.0f) {}

    float& at(int y, int x, int c) { return data[(static_cast<size_t>(y) * width + x) * channels + c]; }
    float at(int y, int x, int c) const { return data[(static_cast<size_t>(y) * width + x) * channels + c]; }
};

/// 4D light field: a U x V grid of RGB sub-aperture views of H x W pixels.
/// Samples are indexed (u, v, y, x, c) with c fastest. The angular
/// coordinate u moves with the spatial x axis (horizontal parallax), v with
/// y. Immutable use after construction is thread-safe.
class LightField {
public:
    static constexpr int kChannels = 3;

    LightField() = default;
    LightField(int views_u, int views_v, int height, int width, Intrinsics intr = {});

    int views_u() const { return views_u_; }
    int views_v() const { return views_v_; }
    int height() const { return height_; }
    int width() const { return width_; }
    const Intrinsics& intrinsics() const { return intrinsics_; }
    void set_intrinsics(const Intrinsics& intr) { intrinsics_ = intr; }

    /// Central angular index per axis; fractional for even grids.
    double central_u() const { return (views_u_ - 1) / 2.0; }
    double central_v() const { return (views_v_ - 1) / 2.0; }

    /// Horizontal / vertical principal-point offset of a view in pixels.
    double delta_x(double u) const { return (u - central_u()) * intrinsics_.baseline_px; }
    double delta_y(double v) const { return (v - central_v()) * intrinsics_.baseline_px; }

    float& at(int u, int v, int y, int x, int c) { return data_[index(u, v, y, x, c)]; }
    float at(int u, int v, int y, int x, int c) const { return data_[index(u, v, y, x, c)]; }

    std::vector<float>& data() { return data_; }
    const std::vector<float>& data() const { return data_; }
    size_t sample_count() const { return data_.size(); }

    Image view(int u, int v) const;
    void set_view(int u, int v, const Image& img);

    /// Throws std::runtime_error when any sample is non-finite or outside [0,1].
    void validate() const;

    size_t index(int u, int v, int y, int x, int c) const {
        return (((static_cast<size_t>(u) * views_v_ + v) * height_ + y) * width_ + x) * kChannels + c;
    }

private:
    int views_u_ = 0;
    int views_v_ = 0;
    int height_ = 0;
    int width_ = 0;
    Intrinsics intrinsics_;
    std::vector<float> data_;
};

struct ViewIndex {
    int u = 0;
    int v = 0;
    bool operator==(const ViewIndex&) const = default;
};

/// Spiral-order view sequence; element position is the angular step a.
using SpiralSequence = std::vector<ViewIndex>;

/// Ring walk outward from the central view. Within each ring consecutive
/// cells are 4-adjacent; the first step increases v, the walk then moves
/// toward decreasing u, so the sequence ends at the bottom-right corner
/// (U-1, V-1). Requires odd U == V (a unit-step spiral does not exist on
/// non-square grids).
SpiralSequence spiral_order(int views_u, int views_v);

/// Uniform-stride subset of `seq` preserving order: positions
/// round(i * (L-1) / (n-1)) for i = 0..n-1, so both endpoints are kept.
SpiralSequence angular_sample(const SpiralSequence& seq, int n);

/// Continuous quadrilinear sample. Coordinates are clamped to the valid
/// range first (edge replication), then separable linear interpolation runs
/// over u, v, y, x. Exact at grid nodes and exact on constant fields.
std::array<double, 3> sample_quadrilinear(const LightField& lf, double x, double y, double u, double v);

enum class EpiAxis { horizontal, vertical };

/// Epipolar plane image. horizontal: rows are views u = 0..U-1 at fixed
/// (v, y), size U x W. vertical: rows are views v = 0..V-1 at fixed (u, x),
/// size V x H.
Image extract_epi(const LightField& lf, EpiAxis axis, int fixed_spatial, int fixed_angular);

}  // namespace lfdeblur
