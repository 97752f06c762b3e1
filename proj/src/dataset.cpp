// SPDX-License-Identifier: Apache-2.0
#include "lfdeblur/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lfdeblur/json_io.hpp"
#include "lfdeblur/lightfield_io.hpp"
#include "lfdeblur/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace lfdeblur {

void run_blur_job(const BlurJob& job) {
    LightField sharp = load_lightfield(job.sharp_path);
    Trajectory traj = job.trajectory;
    if (!is_midpoint_normalized(traj)) traj = normalize_midpoint(traj);
    auto [blurred, gt] = synthesize_blur(sharp, traj, job.n_time, job.mode);
    save_lightfield(blurred, job.blurred_out);
    save_lightfield(gt, job.ground_truth_out);

    ordered_json j;
    j["sharp"] = job.sharp_path.string();
    j["blurred"] = job.blurred_out.string();
    j["ground_truth"] = job.ground_truth_out.string();
    j["n_time_samples"] = job.n_time;
    j["warp_mode"] = warp_mode_name(job.mode);
    j["trajectory"] = trajectory_to_json(traj);
    save_json_file(j, job.manifest_out);
}

void save_dataset_manifest(const DatasetManifest& m, const fs::path& path) {
    ordered_json j;
    j["version"] = m.version;
    j["generator"] = m.generator;
    j["seed"] = m.seed;
    j["n_time_samples"] = m.n_time;
    j["bounds"] = bounds_to_json(m.bounds);
    j["warp_mode"] = warp_mode_name(m.mode);
    j["tool_version"] = m.tool_version;
    ordered_json pairs = ordered_json::array();
    for (const DatasetPair& p : m.pairs) {
        pairs.push_back({{"sharp_id", p.sharp_id},
                         {"trajectory_seed", p.trajectory_seed},
                         {"trajectory_file", p.trajectory_file},
                         {"blurred_path", p.blurred_path},
                         {"ground_truth_path", p.ground_truth_path}});
    }
    j["pairs"] = pairs;
    save_json_file(j, path);
}

DatasetManifest load_dataset_manifest(const fs::path& path) {
    const nlohmann::json j = load_json_file(path);
    DatasetManifest m;
    m.version = j.value("version", 1);
    m.generator = j.value("generator", std::string());
    m.seed = j.value("seed", 0ull);
    m.n_time = j.value("n_time_samples", 32);
    if (j.contains("bounds")) m.bounds = bounds_from_json(j["bounds"]);
    m.mode = warp_mode_from_name(j.value("warp_mode", std::string("literal_eq13")));
    m.tool_version = j.value("tool_version", std::string());
    for (const auto& p : j.at("pairs")) {
        DatasetPair pair;
        pair.sharp_id = p.at("sharp_id").get<std::string>();
        pair.trajectory_seed = p.at("trajectory_seed").get<uint64_t>();
        pair.trajectory_file = p.value("trajectory_file", std::string());
        pair.blurred_path = p.at("blurred_path").get<std::string>();
        pair.ground_truth_path = p.at("ground_truth_path").get<std::string>();
        m.pairs.push_back(std::move(pair));
    }
    return m;
}

namespace {

bool same_trajectory(const Trajectory& a, const Trajectory& b) {
    for (int i = 0; i < 4; ++i) {
        if (a.translation_control[i] != b.translation_control[i]) return false;
    }
    auto same_quat = [](const Quat& p, const Quat& q) {
        return p.w == q.w && p.x == q.x && p.y == q.y && p.z == q.z;
    };
    return same_quat(a.rot_begin, b.rot_begin) && same_quat(a.rot_end, b.rot_end);
}

}  // namespace

DatasetManifest generate_dataset(const fs::path& sharp_dir, int count_motions, const MotionBounds& bounds,
                                 int n_time, uint64_t seed, const fs::path& out_dir, WarpMode mode) {
    if (count_motions < 1) throw std::invalid_argument("generate_dataset: count_motions must be >= 1");

    std::vector<fs::path> sharp_paths;
    if (fs::exists(sharp_dir)) {
        for (const auto& entry : fs::directory_iterator(sharp_dir)) {
            if (entry.is_directory() && fs::exists(entry.path() / LfDirFormat::kManifestName)) {
                sharp_paths.push_back(entry.path());
            }
        }
    }
    std::sort(sharp_paths.begin(), sharp_paths.end());
    if (sharp_paths.empty()) {
        throw std::runtime_error("generate_dataset: no light-field directories under " + sharp_dir.string());
    }

    // Unique trajectories at seeds seed, seed+1, ...; a colliding draw is
    // skipped and the seed sequence simply continues.
    std::vector<Trajectory> motions;
    uint64_t next_seed = seed;
    while (static_cast<int>(motions.size()) < count_motions) {
        Trajectory t = make_random_trajectory(next_seed++, bounds);
        t.n_time_samples = n_time;
        const bool duplicate =
            std::any_of(motions.begin(), motions.end(), [&](const Trajectory& m) { return same_trajectory(m, t); });
        if (!duplicate) motions.push_back(std::move(t));
    }

    fs::create_directories(out_dir / "blur");
    fs::create_directories(out_dir / "gt");
    fs::create_directories(out_dir / "traj");

    DatasetManifest manifest;
    manifest.generator = U53Generator::kName;
    manifest.seed = seed;
    manifest.n_time = n_time;
    manifest.bounds = bounds;
    manifest.mode = mode;
    manifest.tool_version = kVersion;

    for (const Trajectory& t : motions) {
        save_trajectory(t, out_dir / "traj" / ("traj_" + std::to_string(t.seed) + ".json"));
    }

    for (const fs::path& sharp_path : sharp_paths) {
        const std::string id = sharp_path.filename().string();
        const LightField sharp = load_lightfield(sharp_path);

        const fs::path gt_rel = fs::path("gt") / id;
        save_lightfield(sharp, out_dir / gt_rel);

        for (const Trajectory& traj : motions) {
            auto [blurred, gt] = synthesize_blur(sharp, traj, n_time, mode);
            const fs::path blur_rel = fs::path("blur") / (id + "_t" + std::to_string(traj.seed));
            save_lightfield(blurred, out_dir / blur_rel);

            DatasetPair pair;
            pair.sharp_id = id;
            pair.trajectory_seed = traj.seed;
            pair.trajectory_file = (fs::path("traj") / ("traj_" + std::to_string(traj.seed) + ".json")).string();
            pair.blurred_path = blur_rel.string();
            pair.ground_truth_path = gt_rel.string();
            manifest.pairs.push_back(std::move(pair));
        }
    }

    save_dataset_manifest(manifest, out_dir / DatasetManifest::kFileName);
    return manifest;
}

}  // namespace lfdeblur
