// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "lfdeblur/json_io.hpp"
#include "lfdeblur/motion.hpp"

using namespace lfdeblur;

namespace {

// Truncated matrix-exponential series of the (phi, theta, 0) skew matrix,
// independent of the Rodrigues closed form in the implementation.
Mat3 expm_series(double phi, double theta, int terms = 30) {
    Mat3 skew = {{{0, 0, theta}, {0, 0, -phi}, {-theta, phi, 0}}};
    Mat3 result = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    Mat3 power = result;
    double factorial = 1.0;
    for (int n = 1; n <= terms; ++n) {
        Mat3 next{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += power[i][k] * skew[k][j];
                next[i][j] = s;
            }
        power = next;
        factorial *= n;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) result[i][j] += power[i][j] / factorial;
    }
    return result;
}

double max_abs_diff(const Mat3& a, const Mat3& b) {
    double m = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
    return m;
}

// de Casteljau evaluation, the independent route for Bezier values.
Vec3 de_casteljau(std::array<Vec3, 4> p, double s) {
    for (int level = 3; level >= 1; --level)
        for (int i = 0; i < level; ++i) p[i] = p[i] * (1.0 - s) + p[i + 1] * s;
    return p[0];
}

Mat3 quat_to_matrix(const Quat& q) {
    const double w = q.w, x = q.x, y = q.y, z = q.z;
    return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
             {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
             {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

}  // namespace

TEST_SUITE("motion") {

TEST_CASE("rotation matrix: zero angles give the identity") {
    const Mat3 r = rotation_matrix(CameraPose{}, RotationMode::exact);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(r[i][j] == (i == j ? 1.0 : 0.0));
}

TEST_CASE("rotation matrix: small-angle form is the literal first-order matrix") {
    CameraPose pose;
    pose.theta = 0.01;
    const Mat3 r = rotation_matrix(pose, RotationMode::small_angle);
    const Mat3 expected = {{{1, 0, 0.01}, {0, 1, 0}, {-0.01, 0, 1}}};
    CHECK(max_abs_diff(r, expected) == 0.0);
}

TEST_CASE("rotation matrix: roll is excluded from the out-of-plane matrix") {
    CameraPose pose;
    pose.psi = 0.5;  // handled spatially, must not appear here
    const Mat3 r = rotation_matrix(pose, RotationMode::exact);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(r[i][j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-15));
}

TEST_CASE("rotation matrix: exact mode is orthogonal with det 1") {
    std::mt19937 gen(5);
    for (int trial = 0; trial < 50; ++trial) {
        CameraPose pose;
        pose.phi = ((gen() % 2000) / 1000.0 - 1.0) * 0.1;
        pose.theta = ((gen() % 2000) / 1000.0 - 1.0) * 0.1;
        const Mat3 r = rotation_matrix(pose, RotationMode::exact);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double dot = 0.0;
                for (int k = 0; k < 3; ++k) dot += r[k][i] * r[k][j];
                CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
            }
        const double det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
                           r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
                           r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        CHECK(det == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("rotation matrix: exact matches the exponential series") {
    CameraPose pose;
    pose.phi = 0.05;
    pose.theta = 0.1;
    const Mat3 exact = rotation_matrix(pose, RotationMode::exact);
    CHECK(max_abs_diff(exact, expm_series(0.05, 0.1)) < 1e-14);

    const Mat3 small = rotation_matrix(pose, RotationMode::small_angle);
    CHECK(max_abs_diff(exact, small) <= 0.1 * 0.1 + 0.05 * 0.05);
}

TEST_CASE("rotation matrix: gap shrinks at second order when angles halve") {
    std::mt19937 gen(7);
    for (int trial = 0; trial < 100; ++trial) {
        CameraPose pose;
        pose.phi = ((gen() % 2000) / 1000.0 - 1.0) * 0.1;
        pose.theta = ((gen() % 2000) / 1000.0 - 1.0) * 0.1;
        if (std::abs(pose.phi) < 1e-3 && std::abs(pose.theta) < 1e-3) continue;
        const double gap_full =
            max_abs_diff(rotation_matrix(pose, RotationMode::exact), rotation_matrix(pose, RotationMode::small_angle));
        CameraPose half = pose;
        half.phi *= 0.5;
        half.theta *= 0.5;
        const double gap_half =
            max_abs_diff(rotation_matrix(half, RotationMode::exact), rotation_matrix(half, RotationMode::small_angle));
        CHECK(gap_full / gap_half >= 3.5);
    }
}

TEST_CASE("bezier: endpoints and constants") {
    const std::array<Vec3, 4> control = {Vec3{1, 2, 3}, Vec3{4, 5, 6}, Vec3{7, 8, 9}, Vec3{-1, -2, -3}};
    CHECK(bezier_eval(control, 0.0) == control[0]);
    CHECK(bezier_eval(control, 1.0) == control[3]);

    const std::array<Vec3, 4> constant = {Vec3{0.5, -1, 2}, Vec3{0.5, -1, 2}, Vec3{0.5, -1, 2}, Vec3{0.5, -1, 2}};
    for (double s : {0.0, 0.25, 0.5, 0.77, 1.0}) {
        const Vec3 p = bezier_eval(constant, s);
        CHECK(p.x == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(p.y == doctest::Approx(-1.0).epsilon(1e-15));
        CHECK(p.z == doctest::Approx(2.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(bezier_eval(control, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(bezier_eval(control, 1.1), std::invalid_argument);
}

TEST_CASE("bezier: hand-computed Bernstein value and de Casteljau oracle") {
    const std::array<Vec3, 4> control = {Vec3{0, 0, 0}, Vec3{0, 0, 0}, Vec3{1, 1, 1}, Vec3{1, 1, 1}};
    const Vec3 mid = bezier_eval(control, 0.5);
    // Bernstein weights at 0.5: (.125, .375, .375, .125) -> 0.5.
    CHECK(mid.x == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mid.y == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mid.z == doctest::Approx(0.5).epsilon(1e-15));

    std::mt19937 gen(11);
    std::array<Vec3, 4> rnd;
    for (Vec3& c : rnd) c = {(gen() % 100) / 50.0 - 1.0, (gen() % 100) / 50.0 - 1.0, (gen() % 100) / 50.0 - 1.0};
    for (double s : {0.1, 0.25, 0.4, 0.6, 0.9}) {
        const Vec3 a = bezier_eval(rnd, s);
        const Vec3 b = de_casteljau(rnd, s);
        CHECK(a.x == doctest::Approx(b.x).epsilon(1e-12));
        CHECK(a.y == doctest::Approx(b.y).epsilon(1e-12));
        CHECK(a.z == doctest::Approx(b.z).epsilon(1e-12));
    }
}

TEST_CASE("slerp: endpoints, self-interpolation, and the 45-degree bisection") {
    const Quat q0{1, 0, 0, 0};
    const Quat q1 = Quat::from_rotation_vector({0, 0, M_PI / 2});  // 90 deg about z

    for (double s : {0.0, 0.3, 1.0}) {
        const Quat q = slerp(q1, q1, s);
        CHECK(q.dot(q1) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(slerp(q0, q1, 0.0).dot(q0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(slerp(q0, q1, 1.0).dot(q1) == doctest::Approx(1.0).epsilon(1e-15));

    const Quat mid = slerp(q0, q1, 0.5);
    const Mat3 rm = quat_to_matrix(mid);
    const double c = std::cos(M_PI / 4), s45 = std::sin(M_PI / 4);
    const Mat3 expected = {{{c, -s45, 0}, {s45, c, 0}, {0, 0, 1}}};
    CHECK(max_abs_diff(rm, expected) < 1e-12);

    CHECK_THROWS_AS(slerp(Quat{2, 0, 0, 0}, q1, 0.5), std::invalid_argument);
}

TEST_CASE("slerp: unit norm preserved and rotation angle monotone in s") {
    std::mt19937 gen(13);
    for (int trial = 0; trial < 20; ++trial) {
        const Quat a = Quat::from_rotation_vector(
            {(gen() % 100) / 500.0, (gen() % 100) / 500.0, (gen() % 100) / 500.0});
        const Quat b = Quat::from_rotation_vector(
            {(gen() % 100) / 500.0 + 0.3, (gen() % 100) / 500.0, (gen() % 100) / 500.0});
        double prev_angle = -1.0;
        for (int k = 0; k <= 10; ++k) {
            const Quat q = slerp(a, b, k / 10.0);
            CHECK(std::abs(q.norm() - 1.0) < 1e-9);
            const double d = std::clamp(std::abs(q.dot(a)), -1.0, 1.0);
            const double angle = 2.0 * std::acos(d);
            CHECK(angle >= prev_angle - 1e-12);
            prev_angle = angle;
        }
    }
}

TEST_CASE("quaternion log/exp round trip") {
    std::mt19937 gen(17);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec3 omega = {((gen() % 200) / 100.0 - 1.0) * 0.3, ((gen() % 200) / 100.0 - 1.0) * 0.3,
                            ((gen() % 200) / 100.0 - 1.0) * 0.3};
        const Vec3 back = Quat::from_rotation_vector(omega).to_rotation_vector();
        CHECK(back.x == doctest::Approx(omega.x).epsilon(1e-12));
        CHECK(back.y == doctest::Approx(omega.y).epsilon(1e-12));
        CHECK(back.z == doctest::Approx(omega.z).epsilon(1e-12));
    }
}

TEST_CASE("pose_at: constant trajectory and linear-in-s curve") {
    Trajectory traj;
    traj.translation_control = {Vec3{1, 2, 3}, Vec3{1, 2, 3}, Vec3{1, 2, 3}, Vec3{1, 2, 3}};
    for (double s : {0.0, 0.4, 1.0}) {
        const CameraPose p = pose_at(traj, s);
        CHECK(p.p_x == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(p.p_y == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(p.p_z == doctest::Approx(3.0).epsilon(1e-15));
        CHECK(p.phi == 0.0);
    }

    // Control points collinear and uniformly spaced: the curve is linear in s.
    Trajectory lin;
    lin.translation_control = {Vec3{0, 0, 0}, Vec3{1, 1, 1}, Vec3{2, 2, 2}, Vec3{3, 3, 3}};
    const CameraPose quarter = pose_at(lin, 0.25);
    const Vec3 oracle = de_casteljau(lin.translation_control, 0.25);
    CHECK(quarter.p_x == doctest::Approx(oracle.x).epsilon(1e-12));
    CHECK(quarter.p_x == doctest::Approx(0.75).epsilon(1e-12));
    CHECK_THROWS_AS(pose_at(lin, 1.5), std::invalid_argument);
}

TEST_CASE("normalize_midpoint: mid pose identity, idempotent") {
    Trajectory traj;
    traj.translation_control = {Vec3{1, 2, 3}, Vec3{1, 2, 3}, Vec3{1, 2, 3}, Vec3{1, 2, 3}};
    const Trajectory norm = normalize_midpoint(traj);
    CHECK(is_midpoint_normalized(norm, 1e-12));
    const CameraPose mid = pose_at(norm, 0.5);
    CHECK(mid.p_x == 0.0);
    CHECK(mid.p_y == 0.0);
    CHECK(mid.p_z == 0.0);

    // already-normalized trajectory is unchanged within 1e-12
    const Trajectory twice = normalize_midpoint(norm);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(twice.translation_control[i].x - norm.translation_control[i].x) < 1e-12);
        CHECK(std::abs(twice.translation_control[i].y - norm.translation_control[i].y) < 1e-12);
        CHECK(std::abs(twice.translation_control[i].z - norm.translation_control[i].z) < 1e-12);
    }
    CHECK(std::abs(twice.rot_begin.dot(norm.rot_begin)) == doctest::Approx(1.0).epsilon(1e-12));

    const Trajectory random_traj = make_random_trajectory(7, MotionBounds{});
    CHECK(is_midpoint_normalized(random_traj, 1e-9));
}

TEST_CASE("make_random_trajectory: deterministic, bounded, distinct seeds distinct") {
    const MotionBounds bounds{};
    const Trajectory a = make_random_trajectory(123, bounds);
    const Trajectory b = make_random_trajectory(123, bounds);
    for (int i = 0; i < 4; ++i) {
        CHECK(a.translation_control[i] == b.translation_control[i]);
    }
    CHECK(a.rot_begin.dot(b.rot_begin) == 1.0);

    // zero bounds -> identity trajectory
    MotionBounds zero;
    zero.max_p_x = zero.max_p_y = zero.max_p_z = 0.0;
    zero.max_phi = zero.max_theta = zero.max_psi = 0.0;
    const Trajectory id = make_random_trajectory(9, zero);
    for (const CameraPose& p : sample_poses(id, 9)) CHECK(p.is_identity(1e-15));

    // 100 seeds -> pairwise distinct control-point sets
    std::vector<Trajectory> trajs;
    for (uint64_t s = 0; s < 100; ++s) trajs.push_back(make_random_trajectory(s, bounds));
    for (size_t i = 0; i < trajs.size(); ++i)
        for (size_t j = i + 1; j < trajs.size(); ++j) {
            bool same = true;
            for (int k = 0; k < 4; ++k)
                same = same && trajs[i].translation_control[k] == trajs[j].translation_control[k];
            CHECK_FALSE(same);
        }

    // every sampled pose within bounds after normalization
    for (uint64_t s = 0; s < 20; ++s) {
        const Trajectory t = make_random_trajectory(s, bounds);
        for (const CameraPose& p : sample_poses(t, 33)) {
            CHECK(std::abs(p.p_x) <= bounds.max_p_x + 1e-9);
            CHECK(std::abs(p.p_y) <= bounds.max_p_y + 1e-9);
            CHECK(std::abs(p.p_z) <= bounds.max_p_z + 1e-9);
            CHECK(std::abs(p.phi) <= bounds.max_phi + 1e-9);
            CHECK(std::abs(p.theta) <= bounds.max_theta + 1e-9);
            CHECK(std::abs(p.psi) <= bounds.max_psi + 1e-9);
        }
    }
}

TEST_CASE("sample_poses: midpoint convention and uniform spacing") {
    const Trajectory traj = make_random_trajectory(3, MotionBounds{});

    const auto single = sample_poses(traj, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].is_identity(1e-9));  // normalized trajectory, s = 0.5

    const auto three = sample_poses(traj, 3);
    CHECK(three[1].is_identity(1e-9));

    const auto many = sample_poses(traj, 33);
    REQUIRE(many.size() == 33);
    Trajectory lin;
    lin.translation_control = {Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{2, 0, 0}, Vec3{3, 0, 0}};
    const auto lin_poses = sample_poses(lin, 33);
    for (int i = 0; i < 33; ++i)
        CHECK(lin_poses[static_cast<size_t>(i)].p_x == doctest::Approx(3.0 * i / 32.0).epsilon(1e-12));

    CHECK_THROWS_AS(sample_poses(traj, 0), std::invalid_argument);
}

TEST_CASE("trajectory json round trip") {
    Trajectory t = make_random_trajectory(42, MotionBounds{});
    t.n_time_samples = 17;
    const Trajectory back = trajectory_from_json(trajectory_to_json(t));
    CHECK(back.seed == t.seed);
    CHECK(back.n_time_samples == 17);
    for (int i = 0; i < 4; ++i) CHECK(back.translation_control[i] == t.translation_control[i]);
    CHECK(back.rot_begin.dot(t.rot_begin) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(back.bounds.max_p_z == t.bounds.max_p_z);
}

}  // TEST_SUITE
