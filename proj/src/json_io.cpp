// SPDX-License-Identifier: Apache-2.0
#include "lfdeblur/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace lfdeblur {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json bounds_to_json(const MotionBounds& b) {
    return ordered_json{{"max_p_x", b.max_p_x}, {"max_p_y", b.max_p_y},   {"max_p_z", b.max_p_z},
                        {"max_phi", b.max_phi}, {"max_theta", b.max_theta}, {"max_psi", b.max_psi}};
}

MotionBounds bounds_from_json(const json& j) {
    MotionBounds b;
    b.max_p_x = j.value("max_p_x", b.max_p_x);
    b.max_p_y = j.value("max_p_y", b.max_p_y);
    b.max_p_z = j.value("max_p_z", b.max_p_z);
    b.max_phi = j.value("max_phi", b.max_phi);
    b.max_theta = j.value("max_theta", b.max_theta);
    b.max_psi = j.value("max_psi", b.max_psi);
    return b;
}

ordered_json trajectory_to_json(const Trajectory& t) {
    ordered_json j;
    j["seed"] = t.seed;
    j["bounds"] = bounds_to_json(t.bounds);
    ordered_json controls = ordered_json::array();
    for (const Vec3& c : t.translation_control) controls.push_back({c.x, c.y, c.z});
    j["translation_control_points"] = controls;
    j["rotation_endpoints"] = {{t.rot_begin.w, t.rot_begin.x, t.rot_begin.y, t.rot_begin.z},
                               {t.rot_end.w, t.rot_end.x, t.rot_end.y, t.rot_end.z}};
    j["n_time_samples"] = t.n_time_samples;
    return j;
}

Trajectory trajectory_from_json(const json& j) {
    Trajectory t;
    t.seed = j.value("seed", 0ull);
    if (j.contains("bounds")) t.bounds = bounds_from_json(j["bounds"]);
    const auto& controls = j.at("translation_control_points");
    if (controls.size() != 4) throw std::runtime_error("trajectory: expected 4 translation control points");
    for (size_t i = 0; i < 4; ++i) {
        t.translation_control[i] = {controls[i].at(0).get<double>(), controls[i].at(1).get<double>(),
                                    controls[i].at(2).get<double>()};
    }
    const auto& rots = j.at("rotation_endpoints");
    if (rots.size() != 2) throw std::runtime_error("trajectory: expected 2 rotation endpoint quaternions");
    auto quat = [](const json& q) {
        return Quat{q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(), q.at(3).get<double>()};
    };
    t.rot_begin = quat(rots[0]);
    t.rot_end = quat(rots[1]);
    if (std::abs(t.rot_begin.norm() - 1.0) > 1e-9 || std::abs(t.rot_end.norm() - 1.0) > 1e-9) {
        throw std::runtime_error("trajectory: rotation endpoints must be unit quaternions");
    }
    t.n_time_samples = j.value("n_time_samples", 32);
    return t;
}

void save_trajectory(const Trajectory& t, const std::filesystem::path& path) {
    save_json_file(trajectory_to_json(t), path);
}

Trajectory load_trajectory(const std::filesystem::path& path) { return trajectory_from_json(load_json_file(path)); }

std::string warp_mode_name(WarpMode mode) {
    return mode == WarpMode::literal_eq13 ? "literal_eq13" : "spatial_rotation";
}

WarpMode warp_mode_from_name(const std::string& name) {
    if (name == "literal_eq13") return WarpMode::literal_eq13;
    if (name == "spatial_rotation") return WarpMode::spatial_rotation;
    throw std::invalid_argument("warp_mode: unknown mode '" + name +
                                "' (expected literal_eq13 or spatial_rotation)");
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error("bad JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

void save_json_file(const ordered_json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace lfdeblur
