// SPDX-License-Identifier: Apache-2.0
#include "lfdeblur/lightfield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lfdeblur {

LightField::LightField(int views_u, int views_v, int height, int width, Intrinsics intr)
    : views_u_(views_u), views_v_(views_v), height_(height), width_(width), intrinsics_(intr) {
    if (views_u < 1 || views_v < 1 || height < 1 || width < 1) {
        throw std::invalid_argument("LightField: all dimensions must be >= 1");
    }
    if (intr.focal_px <= 0.0 || intr.baseline_px <= 0.0) {
        throw std::invalid_argument("LightField: focal_px and baseline_px must be positive");
    }
    data_.assign(static_cast<size_t>(views_u) * views_v * height * width * kChannels, 0.0f);
}

Image LightField::view(int u, int v) const {
    Image img(height_, width_, kChannels);
    const float* src = &data_[index(u, v, 0, 0, 0)];
    std::copy(src, src + static_cast<size_t>(height_) * width_ * kChannels, img.data.begin());
    return img;
}

void LightField::set_view(int u, int v, const Image& img) {
    if (img.height != height_ || img.width != width_ || img.channels != kChannels) {
        throw std::invalid_argument("set_view: image dimensions do not match the light field");
    }
    std::copy(img.data.begin(), img.data.end(), data_.begin() + index(u, v, 0, 0, 0));
}

void LightField::validate() const {
    for (size_t i = 0; i < data_.size(); ++i) {
        const float s = data_[i];
        if (!std::isfinite(s) || s < 0.0f || s > 1.0f) {
            throw std::runtime_error("LightField: sample " + std::to_string(i) + " = " + std::to_string(s) +
                                     " is outside [0,1]");
        }
    }
}

SpiralSequence spiral_order(int views_u, int views_v) {
    if (views_u < 1 || views_v < 1 || views_u % 2 == 0 || views_v % 2 == 0) {
        throw std::invalid_argument("spiral_order: U and V must be odd and >= 1 (no central view otherwise)");
    }
    if (views_u != views_v) {
        throw std::invalid_argument("spiral_order: a unit-step spiral requires U == V");
    }
    const int c = (views_u - 1) / 2;
    SpiralSequence seq;
    seq.reserve(static_cast<size_t>(views_u) * views_v);
    seq.push_back({c, c});
    for (int r = 1; r <= c; ++r) {
        // Enter the ring one row above its bottom-right corner, then walk
        // up the right column, left along the top, down the left column,
        // and right along the bottom to the corner (c+r, c+r).
        for (int u = c + r - 1; u >= c - r; --u) seq.push_back({u, c + r});
        for (int v = c + r - 1; v >= c - r; --v) seq.push_back({c - r, v});
        for (int u = c - r + 1; u <= c + r; ++u) seq.push_back({u, c - r});
        for (int v = c - r + 1; v <= c + r; ++v) seq.push_back({c + r, v});
    }
    return seq;
}

SpiralSequence angular_sample(const SpiralSequence& seq, int n) {
    const int len = static_cast<int>(seq.size());
    if (n < 1 || n > len) {
        throw std::invalid_argument("angular_sample: n must be in [1, " + std::to_string(len) + "], got " +
                                    std::to_string(n));
    }
    if (n == 1) return {seq.front()};
    SpiralSequence out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const long pos = std::lround(static_cast<double>(i) * (len - 1) / (n - 1));
        out.push_back(seq[static_cast<size_t>(pos)]);
    }
    return out;
}

namespace {

inline void clamp_axis(double coord, int size, int& i0, int& i1, double& frac) {
    double c = std::clamp(coord, 0.0, static_cast<double>(size - 1));
    double fl = std::floor(c);
    i0 = static_cast<int>(fl);
    i1 = std::min(i0 + 1, size - 1);
    frac = c - fl;
}

}  // namespace

std::array<double, 3> sample_quadrilinear(const LightField& lf, double x, double y, double u, double v) {
    int u0, u1, v0, v1, y0, y1, x0, x1;
    double fu, fv, fy, fx;
    clamp_axis(u, lf.views_u(), u0, u1, fu);
    clamp_axis(v, lf.views_v(), v0, v1, fv);
    clamp_axis(y, lf.height(), y0, y1, fy);
    clamp_axis(x, lf.width(), x0, x1, fx);

    std::array<double, 3> out{};
    const int us[2] = {u0, u1};
    const int vs[2] = {v0, v1};
    const int ys[2] = {y0, y1};
    const int xs[2] = {x0, x1};
    for (int c = 0; c < LightField::kChannels; ++c) {
        double acc_u[2];
        for (int a = 0; a < 2; ++a) {
            double acc_v[2];
            for (int b = 0; b < 2; ++b) {
                double acc_y[2];
                for (int d = 0; d < 2; ++d) {
                    const double s0 = lf.at(us[a], vs[b], ys[d], xs[0], c);
                    const double s1 = lf.at(us[a], vs[b], ys[d], xs[1], c);
                    acc_y[d] = std::lerp(s0, s1, fx);
                }
                acc_v[b] = std::lerp(acc_y[0], acc_y[1], fy);
            }
            acc_u[a] = std::lerp(acc_v[0], acc_v[1], fv);
        }
        out[c] = std::lerp(acc_u[0], acc_u[1], fu);
    }
    return out;
}

Image extract_epi(const LightField& lf, EpiAxis axis, int fixed_spatial, int fixed_angular) {
    if (axis == EpiAxis::horizontal) {
        const int y = fixed_spatial;
        const int v = fixed_angular;
        if (y < 0 || y >= lf.height() || v < 0 || v >= lf.views_v()) {
            throw std::out_of_range("extract_epi: horizontal indices out of range");
        }
        Image epi(lf.views_u(), lf.width(), LightField::kChannels);
        for (int u = 0; u < lf.views_u(); ++u)
            for (int x = 0; x < lf.width(); ++x)
                for (int c = 0; c < LightField::kChannels; ++c) epi.at(u, x, c) = lf.at(u, v, y, x, c);
        return epi;
    }
    const int x = fixed_spatial;
    const int u = fixed_angular;
    if (x < 0 || x >= lf.width() || u < 0 || u >= lf.views_u()) {
        throw std::out_of_range("extract_epi: vertical indices out of range");
    }
    Image epi(lf.views_v(), lf.height(), LightField::kChannels);
    for (int v = 0; v < lf.views_v(); ++v)
        for (int y = 0; y < lf.height(); ++y)
            for (int c = 0; c < LightField::kChannels; ++c) epi.at(v, y, c) = lf.at(u, v, y, x, c);
    return epi;
}

}  // namespace lfdeblur
