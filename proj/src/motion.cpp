// SPDX-License-Identifier: Apache-2.0
#include "lfdeblur/motion.hpp"

#include <cmath>
#include <stdexcept>

namespace lfdeblur {

double Quat::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quat Quat::normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("Quat: cannot normalize a zero quaternion");
    return {w / n, x / n, y / n, z / n};
}

Quat Quat::operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z, w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x, w * o.z + x * o.y - y * o.x + z * o.w};
}

Quat Quat::from_rotation_vector(const Vec3& omega) {
    const double angle = std::sqrt(omega.x * omega.x + omega.y * omega.y + omega.z * omega.z);
    if (angle < 1e-12) {
        // sin(a/2)/a -> 1/2
        return Quat{1.0, omega.x * 0.5, omega.y * 0.5, omega.z * 0.5}.normalized();
    }
    const double half = 0.5 * angle;
    const double k = std::sin(half) / angle;
    return {std::cos(half), omega.x * k, omega.y * k, omega.z * k};
}

Vec3 Quat::to_rotation_vector() const {
    Quat q = *this;
    if (q.w < 0.0) q = {-q.w, -q.x, -q.y, -q.z};  // same rotation, angle in [0, pi]
    const double vnorm = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
    if (vnorm < 1e-12) return {2.0 * q.x, 2.0 * q.y, 2.0 * q.z};
    const double angle = 2.0 * std::atan2(vnorm, q.w);
    const double k = angle / vnorm;
    return {q.x * k, q.y * k, q.z * k};
}

bool CameraPose::is_identity(double tol) const {
    return std::abs(p_x) <= tol && std::abs(p_y) <= tol && std::abs(p_z) <= tol && std::abs(phi) <= tol &&
           std::abs(theta) <= tol && std::abs(psi) <= tol;
}

Mat3 rotation_matrix(const CameraPose& pose, RotationMode mode) {
    const double phi = pose.phi;
    const double theta = pose.theta;
    if (mode == RotationMode::small_angle) {
        return {{{1.0, 0.0, theta}, {0.0, 1.0, -phi}, {-theta, phi, 1.0}}};
    }
    // Rodrigues for the axis-angle vector (phi, theta, 0).
    const double angle = std::sqrt(phi * phi + theta * theta);
    Mat3 skew = {{{0.0, 0.0, theta}, {0.0, 0.0, -phi}, {-theta, phi, 0.0}}};
    Mat3 r = {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
    if (angle < 1e-14) return r;
    const double a = std::sin(angle) / angle;
    const double b = (1.0 - std::cos(angle)) / (angle * angle);
    Mat3 skew2{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += skew[i][k] * skew[k][j];
            skew2[i][j] = s;
        }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] += a * skew[i][j] + b * skew2[i][j];
    return r;
}

Vec3 bezier_eval(const std::array<Vec3, 4>& control, double s) {
    if (s < 0.0 || s > 1.0) {
        throw std::invalid_argument("bezier_eval: s = " + std::to_string(s) + " outside [0,1]");
    }
    const double t = 1.0 - s;
    const double b0 = t * t * t;
    const double b1 = 3.0 * t * t * s;
    const double b2 = 3.0 * t * s * s;
    const double b3 = s * s * s;
    return control[0] * b0 + control[1] * b1 + control[2] * b2 + control[3] * b3;
}

Quat slerp(const Quat& q0, const Quat& q1, double s) {
    constexpr double kUnitTol = 1e-6;
    if (std::abs(q0.norm() - 1.0) > kUnitTol || std::abs(q1.norm() - 1.0) > kUnitTol) {
        throw std::invalid_argument("slerp: inputs must be unit quaternions");
    }
    Quat b = q1;
    double d = q0.dot(b);
    if (d < 0.0) {  // shortest arc
        b = {-b.w, -b.x, -b.y, -b.z};
        d = -d;
    }
    if (s == 0.0) return q0;
    if (s == 1.0) return b;
    if (d > 1.0 - 1e-12) {
        // Nearly parallel: linear blend, renormalized.
        Quat out{q0.w + (b.w - q0.w) * s, q0.x + (b.x - q0.x) * s, q0.y + (b.y - q0.y) * s, q0.z + (b.z - q0.z) * s};
        return out.normalized();
    }
    const double omega = std::acos(std::clamp(d, -1.0, 1.0));
    const double denom = std::sin(omega);
    const double k0 = std::sin((1.0 - s) * omega) / denom;
    const double k1 = std::sin(s * omega) / denom;
    return Quat{q0.w * k0 + b.w * k1, q0.x * k0 + b.x * k1, q0.y * k0 + b.y * k1, q0.z * k0 + b.z * k1}.normalized();
}

CameraPose pose_at(const Trajectory& traj, double s) {
    if (s < 0.0 || s > 1.0) {
        throw std::invalid_argument("pose_at: s = " + std::to_string(s) + " outside [0,1]");
    }
    const Vec3 t = bezier_eval(traj.translation_control, s);
    const Vec3 omega = slerp(traj.rot_begin, traj.rot_end, s).to_rotation_vector();
    CameraPose pose;
    pose.p_x = t.x;
    pose.p_y = t.y;
    pose.p_z = t.z;
    pose.phi = omega.x;
    pose.theta = omega.y;
    pose.psi = omega.z;
    return pose;
}

Trajectory normalize_midpoint(const Trajectory& traj) {
    Trajectory out = traj;
    const Vec3 mid = bezier_eval(traj.translation_control, 0.5);
    for (auto& c : out.translation_control) c = c - mid;
    const Quat q_mid = slerp(traj.rot_begin, traj.rot_end, 0.5);
    const Quat inv = q_mid.conjugate();  // unit quaternion inverse
    out.rot_begin = (inv * traj.rot_begin).normalized();
    out.rot_end = (inv * traj.rot_end).normalized();
    return out;
}

bool is_midpoint_normalized(const Trajectory& traj, double tol) {
    const CameraPose mid = pose_at(traj, 0.5);
    return mid.is_identity(tol);
}

std::vector<CameraPose> sample_poses(const Trajectory& traj, int n_time) {
    if (n_time < 1) throw std::invalid_argument("sample_poses: N_t must be >= 1");
    if (n_time == 1) return {pose_at(traj, 0.5)};
    std::vector<CameraPose> poses;
    poses.reserve(n_time);
    for (int i = 0; i < n_time; ++i) poses.push_back(pose_at(traj, static_cast<double>(i) / (n_time - 1)));
    return poses;
}

namespace {

bool within_bounds(const CameraPose& p, const MotionBounds& b, double slack) {
    return std::abs(p.p_x) <= b.max_p_x + slack && std::abs(p.p_y) <= b.max_p_y + slack &&
           std::abs(p.p_z) <= b.max_p_z + slack && std::abs(p.phi) <= b.max_phi + slack &&
           std::abs(p.theta) <= b.max_theta + slack && std::abs(p.psi) <= b.max_psi + slack;
}

}  // namespace

Trajectory make_random_trajectory(uint64_t seed, const MotionBounds& bounds) {
    if (bounds.max_p_x < 0 || bounds.max_p_y < 0 || bounds.max_p_z < 0 || bounds.max_phi < 0 ||
        bounds.max_theta < 0 || bounds.max_psi < 0) {
        throw std::invalid_argument("make_random_trajectory: bounds must be nonnegative");
    }
    U53Generator rng(seed);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Trajectory traj;
        traj.seed = seed;
        traj.bounds = bounds;
        for (auto& c : traj.translation_control) {
            c.x = rng.next_symmetric(bounds.max_p_x * 0.5);
            c.y = rng.next_symmetric(bounds.max_p_y * 0.5);
            c.z = rng.next_symmetric(bounds.max_p_z * 0.5);
        }
        for (Quat* q : {&traj.rot_begin, &traj.rot_end}) {
            Vec3 omega;
            omega.x = rng.next_symmetric(bounds.max_phi * 0.5);
            omega.y = rng.next_symmetric(bounds.max_theta * 0.5);
            omega.z = rng.next_symmetric(bounds.max_psi * 0.5);
            *q = Quat::from_rotation_vector(omega);
        }
        traj = normalize_midpoint(traj);
        bool ok = true;
        for (const CameraPose& p : sample_poses(traj, 33)) {
            if (!within_bounds(p, bounds, 1e-9)) {
                ok = false;
                break;
            }
        }
        if (ok) return traj;
    }
    throw std::runtime_error("make_random_trajectory: failed to draw an in-bounds trajectory");
}

}  // namespace lfdeblur
