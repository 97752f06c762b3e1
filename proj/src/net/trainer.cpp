// SPDX-License-Identifier: Apache-2.0
#include "lfdeblur/net/trainer.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "lfdeblur/lightfield_io.hpp"
#include "lfdeblur/motion.hpp"

namespace lfdeblur::net {

nlohmann::ordered_json TrainConfig::to_json() const {
    return nlohmann::ordered_json{{"patch", patch},
                                  {"angular_samples", angular_samples},
                                  {"batch", batch},
                                  {"learning_rate", learning_rate},
                                  {"iterations", iterations},
                                  {"lambda", lambda},
                                  {"color_augment", color_augment},
                                  {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
    TrainConfig tc;
    tc.patch = j.value("patch", tc.patch);
    tc.angular_samples = j.value("angular_samples", tc.angular_samples);
    tc.batch = j.value("batch", tc.batch);
    tc.learning_rate = j.value("learning_rate", tc.learning_rate);
    tc.iterations = j.value("iterations", tc.iterations);
    tc.lambda = j.value("lambda", tc.lambda);
    tc.color_augment = j.value("color_augment", tc.color_augment);
    tc.seed = j.value("seed", tc.seed);
    return tc;
}

void AdamOptimizer::step(ParamSet<float>& params, const ParamSet<float>& grads, double lr) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    for (size_t i = 0; i < params.size(); ++i) {
        float* w = params[i].ptr();
        float* m = m_[i].ptr();
        float* v = v_[i].ptr();
        const float* g = grads[i].ptr();
        const size_t n = params[i].numel();
        for (size_t j = 0; j < n; ++j) {
            const double gj = static_cast<double>(g[j]);
            const double mj = beta1 * static_cast<double>(m[j]) + (1.0 - beta1) * gj;
            const double vj = beta2 * static_cast<double>(v[j]) + (1.0 - beta2) * gj * gj;
            m[j] = static_cast<float>(mj);
            v[j] = static_cast<float>(vj);
            w[j] -= static_cast<float>(lr * (mj / bc1) / (std::sqrt(vj / bc2) + eps));
        }
    }
}

namespace {

// The six RGB channel permutations; index 0 is the identity.
constexpr std::array<std::array<int, 3>, 6> kRgbPerms = {
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

void copy_patch_planar(const LightField& lf, ViewIndex vi, int y0, int x0, int patch,
                       const std::array<int, 3>& perm, float* dst) {
    const size_t plane = static_cast<size_t>(patch) * patch;
    for (int y = 0; y < patch; ++y)
        for (int x = 0; x < patch; ++x)
            for (int c = 0; c < 3; ++c) {
                dst[static_cast<size_t>(c) * plane + static_cast<size_t>(y) * patch + x] =
                    lf.at(vi.u, vi.v, y0 + y, x0 + x, perm[static_cast<size_t>(c)]);
            }
}

}  // namespace

TrainResult train_on_pairs(const std::vector<std::pair<LightField, LightField>>& pairs, const TrainConfig& tc,
                           const NetworkConfig& nc) {
    if (pairs.empty()) throw std::invalid_argument("train: empty dataset");
    if (tc.iterations < 1) throw std::invalid_argument("train: iterations must be >= 1");
    if (tc.batch != 1) throw std::invalid_argument("train: only batch = 1 is supported");
    if (tc.patch % 2 != 0) throw std::invalid_argument("train: patch size must be even");
    for (const auto& [blurred, sharp] : pairs) {
        if (tc.patch > blurred.height() || tc.patch > blurred.width()) {
            throw std::invalid_argument("train: patch " + std::to_string(tc.patch) +
                                        " larger than the views (" + std::to_string(blurred.height()) + "x" +
                                        std::to_string(blurred.width()) + ")");
        }
        if (blurred.views_u() != sharp.views_u() || blurred.views_v() != sharp.views_v() ||
            blurred.height() != sharp.height() || blurred.width() != sharp.width()) {
            throw std::invalid_argument("train: blurred/sharp dimensions do not match");
        }
    }

    TrainResult result{Network<float>(nc), {}};
    result.net.init_params(nc.init_seed);

    AdamOptimizer adam(nc);
    ParamSet<float> grads = ParamSet<float>::make(nc);
    Workspace<float> ws;
    U53Generator rng(tc.seed);

    const int n = tc.angular_samples;
    const int b = nc.temporal_radius;
    const int nframes = nc.input_frames();
    const size_t plane = static_cast<size_t>(tc.patch) * tc.patch;

    std::vector<StepCache<float>> caches(static_cast<size_t>(n));
    std::vector<Tensor<float>> targets(static_cast<size_t>(n));
    Tensor<float> frames({3 * nframes, tc.patch, tc.patch});

    const auto t_start = std::chrono::steady_clock::now();
    for (int iter = 0; iter < tc.iterations; ++iter) {
        const auto& [blurred, sharp] = pairs[rng.next_u32() % pairs.size()];
        const int y0 = static_cast<int>(rng.next_u32() % static_cast<uint32_t>(blurred.height() - tc.patch + 1));
        const int x0 = static_cast<int>(rng.next_u32() % static_cast<uint32_t>(blurred.width() - tc.patch + 1));
        const std::array<int, 3>& perm =
            kRgbPerms[tc.color_augment ? (rng.next_u32() % kRgbPerms.size()) : 0];

        const SpiralSequence sampled = angular_sample(spiral_order(blurred.views_u(), blurred.views_v()), n);

        // Forward unroll with per-step caches.
        double data_loss = 0.0;
        Tensor<float> h_state;
        Tensor<float> p, h_next;
        for (int a = 0; a < n; ++a) {
            for (int o = -b; o <= b; ++o) {
                const int idx = std::clamp(a + o, 0, n - 1);
                copy_patch_planar(blurred, sampled[static_cast<size_t>(idx)], y0, x0, tc.patch, perm,
                                  frames.ptr() + static_cast<size_t>(o + b) * 3 * plane);
            }
            targets[static_cast<size_t>(a)].reset({3, tc.patch, tc.patch});
            copy_patch_planar(sharp, sampled[static_cast<size_t>(a)], y0, x0, tc.patch, perm,
                              targets[static_cast<size_t>(a)].ptr());
            result.net.forward(frames, h_state, p, h_next, ws, &caches[static_cast<size_t>(a)]);
            h_state = h_next;
            data_loss += mse(caches[static_cast<size_t>(a)].p, targets[static_cast<size_t>(a)]);
        }
        const double loss = data_loss / n + tc.lambda * result.net.params().weight_sum_squares();

        // Backpropagation through the full unroll, gradients flowing
        // through the hidden state across steps.
        grads.zero();
        Tensor<float> dh;  // empty at the last step
        Tensor<float> dh_prev;
        const double scale = 2.0 / (static_cast<double>(p.numel()) * n);
        for (int a = n - 1; a >= 0; --a) {
            const StepCache<float>& cache = caches[static_cast<size_t>(a)];
            Tensor<float> dp(cache.p.shape);
            const Tensor<float>& target = targets[static_cast<size_t>(a)];
            for (size_t i = 0; i < dp.data.size(); ++i) {
                dp.data[i] = static_cast<float>(
                    scale * (static_cast<double>(cache.p.data[i]) - static_cast<double>(target.data[i])));
            }
            result.net.backward(cache, dp, dh, grads, dh_prev, ws);
            dh = std::move(dh_prev);
        }
        if (tc.lambda != 0.0) {
            for (size_t i = 0; i < grads.size(); ++i) {
                const Tensor<float>& w = result.net.params()[i];
                if (w.shape.size() != 4) continue;
                for (size_t j = 0; j < w.data.size(); ++j) {
                    grads[i].data[j] += static_cast<float>(2.0 * tc.lambda * static_cast<double>(w.data[j]));
                }
            }
        }
        adam.step(result.net.params(), grads, tc.learning_rate);

        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        result.log.push_back({iter + 1, loss, wall});
    }
    return result;
}

TrainResult train(const DatasetManifest& manifest, const std::filesystem::path& dataset_root, const TrainConfig& tc,
                  const NetworkConfig& nc) {
    if (manifest.pairs.empty()) throw std::invalid_argument("train: dataset manifest has no pairs");
    std::vector<std::pair<LightField, LightField>> pairs;
    pairs.reserve(manifest.pairs.size());
    for (const DatasetPair& p : manifest.pairs) {
        pairs.emplace_back(load_lightfield(dataset_root / p.blurred_path),
                           load_lightfield(dataset_root / p.ground_truth_path));
    }
    return train_on_pairs(pairs, tc, nc);
}

void write_train_log(const std::vector<TrainLogEntry>& log, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_train_log: cannot write " + path.string());
    for (const TrainLogEntry& e : log) {
        nlohmann::ordered_json j{{"iteration", e.iteration}, {"loss", e.loss}, {"wall_seconds", e.wall_seconds}};
        out << j.dump() << "\n";
    }
}

}  // namespace lfdeblur::net
