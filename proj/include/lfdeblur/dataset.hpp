// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lfdeblur/blur.hpp"
#include "lfdeblur/motion.hpp"

namespace lfdeblur {

/// One sharp LF + one trajectory -> one blurred/ground-truth pair.
struct BlurJob {
    std::filesystem::path sharp_path;
    Trajectory trajectory;
    int n_time = 32;
    WarpMode mode = WarpMode::literal_eq13;
    std::filesystem::path blurred_out;
    std::filesystem::path ground_truth_out;
    std::filesystem::path manifest_out;
};

/// Runs the job and writes its manifest. The trajectory is normalized here
/// if the input was not.
void run_blur_job(const BlurJob& job);

struct DatasetPair {
    std::string sharp_id;
    uint64_t trajectory_seed = 0;
    std::string trajectory_file;  // relative to the dataset root
    std::string blurred_path;
    std::string ground_truth_path;
};

struct DatasetManifest {
    int version = 1;
    std::string generator;  // RNG name, see U53Generator::kName
    uint64_t seed = 0;
    int n_time = 32;
    MotionBounds bounds;
    WarpMode mode = WarpMode::literal_eq13;
    std::string tool_version;
    std::vector<DatasetPair> pairs;

    static constexpr const char* kFileName = "dataset.json";
};

void save_dataset_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest load_dataset_manifest(const std::filesystem::path& path);

/// Blurs every light field found in sharp_dir (one subdirectory per LF) with
/// count_motions unique random trajectories each. Trajectory seeds are
/// seed, seed+1, ... (skipping any collision), so the whole dataset is
/// reproducible from the manifest alone. Ground truths are written once per
/// sharp LF under gt/, blurred LFs under blur/.
DatasetManifest generate_dataset(const std::filesystem::path& sharp_dir, int count_motions,
                                 const MotionBounds& bounds, int n_time, uint64_t seed,
                                 const std::filesystem::path& out_dir, WarpMode mode = WarpMode::literal_eq13);

}  // namespace lfdeblur
