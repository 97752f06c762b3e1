// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace lfdeblur {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    bool operator==(const Vec3&) const = default;
};

/// Unit quaternion (w, x, y, z). Hand-rolled: we only need composition,
/// slerp, and the exp/log maps between rotation vectors and quaternions.
struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    Quat conjugate() const { return {w, -x, -y, -z}; }
    double norm() const;
    Quat normalized() const;
    Quat operator*(const Quat& o) const;
    double dot(const Quat& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }

    /// exp(omega/2): omega is an axis-angle rotation vector in radians.
    static Quat from_rotation_vector(const Vec3& omega);
    /// Inverse of from_rotation_vector; the skew components of log R.
    Vec3 to_rotation_vector() const;
};

using Mat3 = std::array<std::array<double, 3>, 3>;

/// 6-DOF camera pose. p_x, p_y are in-plane translations in view-baseline
/// units, p_z is the out-of-plane shear coefficient (view units per pixel),
/// and (phi, theta, psi) are x/y/z-axis rotation angles in radians.
struct CameraPose {
    double p_x = 0.0, p_y = 0.0, p_z = 0.0;
    double phi = 0.0, theta = 0.0, psi = 0.0;

    bool is_identity(double tol = 0.0) const;
};

enum class RotationMode { exact, small_angle };

/// Out-of-plane rotation matrix with psi excluded (the roll is handled as a
/// separate in-plane rotation). exact: Rodrigues form of the skew matrix of
/// (phi, theta, 0), orthogonal with det 1. small_angle: first-order form
/// [[1,0,theta],[0,1,-phi],[-theta,phi,1]].
Mat3 rotation_matrix(const CameraPose& pose, RotationMode mode);

/// Cubic Bernstein evaluation; s must lie in [0,1].
Vec3 bezier_eval(const std::array<Vec3, 4>& control, double s);

/// Shortest-arc spherical interpolation of unit quaternions.
Quat slerp(const Quat& q0, const Quat& q1, double s);

/// Magnitude limits for random camera shake. Translations in baseline units,
/// p_z in view units per pixel, angles in radians. Defaults give visible
/// multi-pixel blur at 320x512 with f ~ 500 px while keeping the small-angle
/// rotation approximation valid.
struct MotionBounds {
    double max_p_x = 2.0;
    double max_p_y = 2.0;
    double max_p_z = 0.02;
    double max_phi = 0.005;
    double max_theta = 0.005;
    double max_psi = 0.02;
};

/// A 6-DOF path over normalized shutter time s in [0,1]: cubic Bezier for
/// translations, slerp between two endpoint quaternions for rotations.
struct Trajectory {
    std::array<Vec3, 4> translation_control{};
    Quat rot_begin{};
    Quat rot_end{};
    uint64_t seed = 0;
    MotionBounds bounds{};
    int n_time_samples = 32;
};

CameraPose pose_at(const Trajectory& traj, double s);

/// Re-anchors the trajectory so pose_at(0.5) is the identity pose: controls
/// shifted by -bezier_eval(.,0.5), rotations composed with the inverse of
/// the mid-shutter quaternion. Idempotent.
Trajectory normalize_midpoint(const Trajectory& traj);

bool is_midpoint_normalized(const Trajectory& traj, double tol = 1e-9);

/// Deterministic in seed ("mt19937-u53": std::mt19937 raw output mapped to
/// [0,1) doubles with 53 bits, so any language can reproduce the draw).
/// Controls and rotation endpoints are drawn within bounds/2 and the result
/// is midpoint-normalized, which keeps every sampled pose within bounds.
Trajectory make_random_trajectory(uint64_t seed, const MotionBounds& bounds);

/// Poses at s = i/(N_t - 1); a single pose at s = 0.5 when n_time == 1.
std::vector<CameraPose> sample_poses(const Trajectory& traj, int n_time);

/// The named generator used everywhere randomness is externally visible.
class U53Generator {
public:
    static constexpr const char* kName = "mt19937-u53";

    explicit U53Generator(uint64_t seed) : gen_(static_cast<uint32_t>(seed)) {}

    /// Uniform double in [0,1) built from two raw draws (53 bits).
    double next_u01() {
        const uint64_t a = gen_() >> 5;   // 27 bits
        const uint64_t b = gen_() >> 6;   // 26 bits
        return (static_cast<double>(a) * 67108864.0 + static_cast<double>(b)) * (1.0 / 9007199254740992.0);
    }

    double next_symmetric(double magnitude) { return (2.0 * next_u01() - 1.0) * magnitude; }

    uint32_t next_u32() { return gen_(); }

private:
    std::mt19937 gen_;
};

}  // namespace lfdeblur
