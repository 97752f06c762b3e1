// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lfdeblur/dataset.hpp"
#include "lfdeblur/lightfield.hpp"
#include "lfdeblur/net/network.hpp"

namespace lfdeblur::net {

struct TrainConfig {
    int patch = 256;           // square crop shared across all views
    int angular_samples = 10;  // n views of the spiral sequence per pass
    int batch = 1;
    double learning_rate = 1e-4;
    int iterations = 1000;
    double lambda = 1e-4;  // weight regularization
    bool color_augment = true;
    uint64_t seed = 0;

    nlohmann::ordered_json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);
};

struct TrainLogEntry {
    int iteration = 0;
    double loss = 0.0;
    double wall_seconds = 0.0;
};

struct TrainResult {
    Network<float> net;
    std::vector<TrainLogEntry> log;
};

/// ADAM with bias correction; beta1 0.9, beta2 0.999, eps 1e-8.
class AdamOptimizer {
public:
    explicit AdamOptimizer(const NetworkConfig& cfg)
        : m_(ParamSet<float>::make(cfg)), v_(ParamSet<float>::make(cfg)) {}

    void step(ParamSet<float>& params, const ParamSet<float>& grads, double lr);

private:
    ParamSet<float> m_;
    ParamSet<float> v_;
    long t_ = 0;
};

/// One pass of the training protocol per iteration: pick a
/// (blurred, sharp) pair, crop one random patch position shared across all
/// views, spiral-stack and angular-sample n views, unroll the recurrence
/// over consecutive sampled views with end replication, average the
/// per-step data losses, add lambda * ||W||^2, and take one ADAM step with
/// gradients propagated through the hidden-state chain. Deterministic given
/// the seed.
TrainResult train_on_pairs(const std::vector<std::pair<LightField, LightField>>& pairs, const TrainConfig& tc,
                           const NetworkConfig& nc);

/// Loads the (blurred, ground truth) pairs of a dataset manifest into
/// memory and trains on them.
TrainResult train(const DatasetManifest& manifest, const std::filesystem::path& dataset_root, const TrainConfig& tc,
                  const NetworkConfig& nc);

/// Line-delimited records: {"iteration":..,"loss":..,"wall_seconds":..}
void write_train_log(const std::vector<TrainLogEntry>& log, const std::filesystem::path& path);

}  // namespace lfdeblur::net
