// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "lfdeblur/lightfield.hpp"

namespace lfdeblur::test {

/// LF filled with arbitrary values in [0,1]; no cross-view structure.
inline LightField random_lf(int U, int V, int H, int W, uint32_t seed, Intrinsics intr = {}) {
    LightField lf(U, V, H, W, intr);
    std::mt19937 gen(seed);
    for (float& s : lf.data()) s = static_cast<float>((gen() >> 8) / 16777216.0);
    return lf;
}

/// Smooth sinusoid scene with per-view parallax: view (u, v) sees the
/// texture shifted by disparity * (index - center) along the matching axis.
/// Band-limited, so warping and deblurring behave like natural content.
inline LightField scene_lf(int U, int V, int H, int W, uint32_t seed, double disparity = 0.5,
                           Intrinsics intr = {}) {
    LightField lf(U, V, H, W, intr);
    std::mt19937 gen(seed);
    auto u01 = [&gen] { return (gen() >> 8) / 16777216.0; };
    struct Wave {
        double fx, fy, phase, amp;
    };
    std::array<std::vector<Wave>, 3> waves;
    for (int c = 0; c < 3; ++c) {
        for (int k = 0; k < 6; ++k) {
            // a mix of low- and mid-frequency content so blur is visible
            const double span = (k < 3) ? 0.15 : 0.55;
            waves[c].push_back({(u01() - 0.5) * span, (u01() - 0.5) * span, u01() * 6.2831853, 0.06 + 0.55 * u01() / 6.0});
        }
    }
    const double cu = (U - 1) / 2.0, cv = (V - 1) / 2.0;
    for (int u = 0; u < U; ++u)
        for (int v = 0; v < V; ++v)
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x) {
                    const double sx = x - disparity * (u - cu);
                    const double sy = y - disparity * (v - cv);
                    for (int c = 0; c < 3; ++c) {
                        double val = 0.5;
                        for (const Wave& w : waves[c])
                            val += w.amp * std::sin(6.2831853 * (w.fx * sx + w.fy * sy) + w.phase);
                        lf.at(u, v, y, x, c) = static_cast<float>(std::clamp(val, 0.02, 0.98));
                    }
                }
    return lf;
}

/// Independent 16-tap weighted-sum quadrilinear oracle (explicit product
/// weights, no nested lerp structure shared with the implementation).
inline std::array<double, 3> quadrilinear_oracle(const LightField& lf, double x, double y, double u, double v) {
    auto clamp_pair = [](double c, int n, int idx[2], double w[2]) {
        c = std::clamp(c, 0.0, static_cast<double>(n - 1));
        const int i0 = static_cast<int>(std::floor(c));
        const int i1 = std::min(i0 + 1, n - 1);
        const double f = c - std::floor(c);
        idx[0] = i0;
        idx[1] = i1;
        w[0] = 1.0 - f;
        w[1] = f;
    };
    int iu[2], iv[2], iy[2], ix[2];
    double wu[2], wv[2], wy[2], wx[2];
    clamp_pair(u, lf.views_u(), iu, wu);
    clamp_pair(v, lf.views_v(), iv, wv);
    clamp_pair(y, lf.height(), iy, wy);
    clamp_pair(x, lf.width(), ix, wx);
    std::array<double, 3> out{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int d = 0; d < 2; ++d)
                for (int e = 0; e < 2; ++e) {
                    const double w = wu[a] * wv[b] * wy[d] * wx[e];
                    for (int c = 0; c < 3; ++c) out[c] += w * lf.at(iu[a], iv[b], iy[d], ix[e], c);
                }
    return out;
}

}  // namespace lfdeblur::test

#include "lfdeblur/blur.hpp"

namespace lfdeblur::test {

/// Independent per-pixel evaluation of the 6-DOF warp: roll about the
/// view's offset principal point, the folded (or spatial) rotation shift,
/// and the angular shear. Written directly from the formulas, separate
/// from the production code path.
inline std::array<double, 3> warp_sample_oracle(const LightField& lf, const CameraPose& pose, int x, int y, int u,
                                                int v, WarpMode mode) {
    const Intrinsics& intr = lf.intrinsics();
    const double cx = intr.principal_x + (u - (lf.views_u() - 1) / 2.0) * intr.baseline_px;
    const double cy = intr.principal_y + (v - (lf.views_v() - 1) / 2.0) * intr.baseline_px;
    const double xj = (x - cx) * std::cos(pose.psi) - (y - cy) * std::sin(pose.psi) + cx;
    const double yj = (x - cx) * std::sin(pose.psi) + (y - cy) * std::cos(pose.psi) + cy;
    double sx, sy, su, sv;
    if (mode == WarpMode::literal_eq13) {
        sx = xj;
        sy = yj;
        su = u + (pose.p_x + intr.focal_px * pose.theta / intr.baseline_px) - xj * pose.p_z;
        sv = v + (pose.p_y - intr.focal_px * pose.phi / intr.baseline_px) - yj * pose.p_z;
    } else {
        sx = xj + intr.focal_px * pose.theta;
        sy = yj - intr.focal_px * pose.phi;
        su = u + pose.p_x - sx * pose.p_z;
        sv = v + pose.p_y - sy * pose.p_z;
    }
    return quadrilinear_oracle(lf, sx, sy, su, sv);
}

/// Naive time-integrated blur: per-pixel mean of warp_sample_oracle over
/// the uniformly sampled poses.
inline LightField blur_oracle(const LightField& lf, const std::vector<CameraPose>& poses, WarpMode mode) {
    LightField out(lf.views_u(), lf.views_v(), lf.height(), lf.width(), lf.intrinsics());
    for (int u = 0; u < lf.views_u(); ++u)
        for (int v = 0; v < lf.views_v(); ++v)
            for (int y = 0; y < lf.height(); ++y)
                for (int x = 0; x < lf.width(); ++x) {
                    std::array<double, 3> acc{};
                    for (const CameraPose& p : poses) {
                        const auto rgb = warp_sample_oracle(lf, p, x, y, u, v, mode);
                        for (int c = 0; c < 3; ++c) acc[c] += rgb[c];
                    }
                    for (int c = 0; c < 3; ++c)
                        out.at(u, v, y, x, c) = static_cast<float>(acc[c] / static_cast<double>(poses.size()));
                }
    return out;
}

/// Pure 3-DOF translation model: angular shift by (p_x, p_y) sheared by
/// -x p_z / -y p_z, spatial coordinates untouched.
inline LightField translation_blur_oracle(const LightField& lf, const std::vector<CameraPose>& poses) {
    LightField out(lf.views_u(), lf.views_v(), lf.height(), lf.width(), lf.intrinsics());
    for (int u = 0; u < lf.views_u(); ++u)
        for (int v = 0; v < lf.views_v(); ++v)
            for (int y = 0; y < lf.height(); ++y)
                for (int x = 0; x < lf.width(); ++x) {
                    std::array<double, 3> acc{};
                    for (const CameraPose& p : poses) {
                        const double su = u + p.p_x - x * p.p_z;
                        const double sv = v + p.p_y - y * p.p_z;
                        const auto rgb = quadrilinear_oracle(lf, x, y, su, sv);
                        for (int c = 0; c < 3; ++c) acc[c] += rgb[c];
                    }
                    for (int c = 0; c < 3; ++c)
                        out.at(u, v, y, x, c) = static_cast<float>(acc[c] / static_cast<double>(poses.size()));
                }
    return out;
}

/// Brute-force validity checker for a spiral sequence: a permutation of the
/// grid, 4-adjacent consecutive steps, central start, bottom-right end.
inline bool valid_spiral(const SpiralSequence& seq, int U, int V) {
    if (seq.size() != static_cast<size_t>(U) * V) return false;
    std::vector<char> seen(static_cast<size_t>(U) * V, 0);
    for (const ViewIndex& vi : seq) {
        if (vi.u < 0 || vi.u >= U || vi.v < 0 || vi.v >= V) return false;
        char& s = seen[static_cast<size_t>(vi.u) * V + vi.v];
        if (s) return false;
        s = 1;
    }
    if (seq.front().u != (U - 1) / 2 || seq.front().v != (V - 1) / 2) return false;
    if (seq.back().u != U - 1 || seq.back().v != V - 1) return false;
    for (size_t i = 1; i < seq.size(); ++i) {
        const int du = std::abs(seq[i].u - seq[i - 1].u);
        const int dv = std::abs(seq[i].v - seq[i - 1].v);
        if (du + dv != 1) return false;
    }
    return true;
}

}  // namespace lfdeblur::test
