// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "lfdeblur/blur.hpp"
#include "lfdeblur/motion.hpp"

namespace lfdeblur {

nlohmann::ordered_json bounds_to_json(const MotionBounds& b);
MotionBounds bounds_from_json(const nlohmann::json& j);

nlohmann::ordered_json trajectory_to_json(const Trajectory& t);
Trajectory trajectory_from_json(const nlohmann::json& j);

void save_trajectory(const Trajectory& t, const std::filesystem::path& path);
Trajectory load_trajectory(const std::filesystem::path& path);

std::string warp_mode_name(WarpMode mode);
WarpMode warp_mode_from_name(const std::string& name);

nlohmann::json load_json_file(const std::filesystem::path& path);
void save_json_file(const nlohmann::ordered_json& j, const std::filesystem::path& path);

}  // namespace lfdeblur
