// SPDX-License-Identifier: Apache-2.0
#include "lfdeblur/blur.hpp"

#include <cmath>
#include <stdexcept>

namespace lfdeblur {

WarpCoords warp_coords(const CameraPose& pose, double x, double y, double u, double v, const LightField& lf,
                       WarpMode mode) {
    const Intrinsics& intr = lf.intrinsics();
    const double cx = intr.principal_x + lf.delta_x(u);
    const double cy = intr.principal_y + lf.delta_y(v);
    const double cos_psi = std::cos(pose.psi);
    const double sin_psi = std::sin(pose.psi);
    const double xr = (x - cx) * cos_psi - (y - cy) * sin_psi + cx;
    const double yr = (x - cx) * sin_psi + (y - cy) * cos_psi + cy;

    const double f_theta = intr.focal_px * pose.theta;
    const double f_phi = intr.focal_px * pose.phi;

    WarpCoords out;
    if (mode == WarpMode::literal_eq13) {
        // Rotation shift folded into the angular term, in view units.
        const double px_i = pose.p_x + f_theta / intr.baseline_px;
        const double py_i = pose.p_y - f_phi / intr.baseline_px;
        out.x = xr;
        out.y = yr;
        out.u = u + px_i - xr * pose.p_z;
        out.v = v + py_i - yr * pose.p_z;
    } else {
        // Rotation shift applied spatially, as the homography moves points.
        const double xs = xr + f_theta;
        const double ys = yr - f_phi;
        out.x = xs;
        out.y = ys;
        out.u = u + pose.p_x - xs * pose.p_z;
        out.v = v + pose.p_y - ys * pose.p_z;
    }
    return out;
}

LightField warp_lightfield(const LightField& lf, const CameraPose& pose, WarpMode mode) {
    LightField out(lf.views_u(), lf.views_v(), lf.height(), lf.width(), lf.intrinsics());
    for (int u = 0; u < lf.views_u(); ++u)
        for (int v = 0; v < lf.views_v(); ++v)
            for (int y = 0; y < lf.height(); ++y)
                for (int x = 0; x < lf.width(); ++x) {
                    const WarpCoords wc = warp_coords(pose, x, y, u, v, lf, mode);
                    const auto rgb = sample_quadrilinear(lf, wc.x, wc.y, wc.u, wc.v);
                    for (int c = 0; c < LightField::kChannels; ++c)
                        out.at(u, v, y, x, c) = static_cast<float>(rgb[c]);
                }
    return out;
}

std::pair<LightField, LightField> synthesize_blur(const LightField& lf, const Trajectory& traj, int n_time,
                                                  WarpMode mode) {
    if (n_time < 1) throw std::invalid_argument("synthesize_blur: N_t must be >= 1");
    if (!is_midpoint_normalized(traj)) {
        throw std::invalid_argument("synthesize_blur: trajectory is not midpoint-normalized");
    }
    const std::vector<CameraPose> poses = sample_poses(traj, n_time);

    // Views are independent; poses are summed in a fixed order per sample so
    // the result is deterministic under any view-level parallelization.
    std::vector<double> acc(lf.sample_count(), 0.0);
    for (const CameraPose& pose : poses) {
        for (int u = 0; u < lf.views_u(); ++u)
            for (int v = 0; v < lf.views_v(); ++v)
                for (int y = 0; y < lf.height(); ++y)
                    for (int x = 0; x < lf.width(); ++x) {
                        const WarpCoords wc = warp_coords(pose, x, y, u, v, lf, mode);
                        const auto rgb = sample_quadrilinear(lf, wc.x, wc.y, wc.u, wc.v);
                        const size_t base = lf.index(u, v, y, x, 0);
                        for (int c = 0; c < LightField::kChannels; ++c) acc[base + c] += rgb[c];
                    }
    }

    LightField blurred(lf.views_u(), lf.views_v(), lf.height(), lf.width(), lf.intrinsics());
    for (size_t i = 0; i < acc.size(); ++i) blurred.data()[i] = static_cast<float>(acc[i] / n_time);
    return {std::move(blurred), lf};
}

}  // namespace lfdeblur
