// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>

#include "lfdeblur/lightfield.hpp"
#include "lfdeblur/motion.hpp"

namespace lfdeblur {

/// Where the out-of-plane-rotation image shift f*theta (and -f*phi) lands.
/// literal_eq13 folds it into the angular shift term; spatial_rotation
/// applies it as a spatial shift of every sub-aperture image, matching the
/// homography the angular form was derived from. The two agree exactly when
/// phi = theta = 0.
enum class WarpMode { literal_eq13, spatial_rotation };

struct WarpCoords {
    double x = 0.0;
    double y = 0.0;
    double u = 0.0;
    double v = 0.0;
};

/// Source sampling coordinates for the output sample at (x, y, u, v) under
/// `pose`. Roll rotates (x, y) about the view's offset principal point
/// (p_c + delta_x, q_c + delta_y); the in-plane translation plus the folded
/// rotation shift moves the angular coordinates, sheared by -x' * p_z.
WarpCoords warp_coords(const CameraPose& pose, double x, double y, double u, double v, const LightField& lf,
                       WarpMode mode);

/// One time sample of the blur integral: output(u,v,y,x) is the input
/// quadrilinearly sampled at warp_coords. Identity pose reproduces the
/// input bit-exactly.
LightField warp_lightfield(const LightField& lf, const CameraPose& pose, WarpMode mode);

/// Averages warps over n_time uniformly sampled poses of a
/// midpoint-normalized trajectory. Returns (blurred, ground truth); the
/// ground truth is the mid-exposure warp, which is the input itself since
/// the mid pose is the identity. Accumulates per sample in double and
/// quantizes to float once. Throws if the trajectory is not normalized.
std::pair<LightField, LightField> synthesize_blur(const LightField& lf, const Trajectory& traj, int n_time,
                                                  WarpMode mode);

}  // namespace lfdeblur
