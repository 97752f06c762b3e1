// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lfdeblur/lightfield.hpp"
#include "lfdeblur/net/layers.hpp"
#include "lfdeblur/net/tensor.hpp"

namespace lfdeblur::net {

/// Architecture hyperparameters. The defaults are the full-size network:
/// Conv1 5x5 -> C, Conv2 3x3 stride 2 -> 2C, 12 residual blocks at 2C (the
/// first widened by the recurrent feature concat), a parallel deconv 4x4
/// stride 2 -> C output head and Conv3 -> C_h recurrence head, and Conv4 ->
/// 3 with Tanh producing the residual added to the center frame.
struct NetworkConfig {
    int temporal_radius = 1;   // b; the net receives 2b+1 consecutive views
    int base_channels = 64;    // C
    int hidden_channels = 64;  // C_h
    int num_blocks = 12;
    double norm_epsilon = 1e-5;
    uint64_t init_seed = 0;

    int input_frames() const { return 2 * temporal_radius + 1; }
    int input_channels() const { return 3 * input_frames(); }

    void validate() const;
    nlohmann::ordered_json to_json() const;
    static NetworkConfig from_json(const nlohmann::json& j);
};

/// All trainable tensors in a fixed canonical order (the checkpoint and
/// Adam-state order). Also reused for gradients and optimizer moments.
template <typename T>
struct ParamSet {
    std::vector<std::string> names;
    std::vector<Tensor<T>> tensors;

    static ParamSet make(const NetworkConfig& cfg);
    void zero();
    size_t total_parameters() const;
    double sum_squares() const;
    /// Sum of squared convolution/deconvolution kernels; the weight
    /// regularizer covers these, not the normalization affines or biases.
    double weight_sum_squares() const;

    Tensor<T>& operator[](size_t i) { return tensors[i]; }
    const Tensor<T>& operator[](size_t i) const { return tensors[i]; }
    size_t size() const { return tensors.size(); }
};

/// Everything the backward pass needs from one recurrent step.
template <typename T>
struct StepCache {
    Tensor<T> frames;
    Tensor<T> h_prev;
    Tensor<T> c1_pre, c1;
    InStats in1;
    Tensor<T> c2_pre, c2;
    InStats in2;
    Tensor<T> z;
    struct BlockCache {
        Tensor<T> a_pre;
        InStats in_a;
        Tensor<T> a;
        Tensor<T> d_pre;
        InStats in_d;
        Tensor<T> r;
    };
    std::vector<BlockCache> blocks;
    Tensor<T> up_pre, up;
    InStats in_up;
    Tensor<T> hid_pre, hid;
    InStats in_h;
    Tensor<T> res;
    Tensor<T> p_pre;
    Tensor<T> p;
};

/// Pre-activation margins recorded during a forward pass; the finite
/// difference checks reseed when a kink sits closer than the step size.
struct ForwardDiag {
    double min_relu_margin = 1e30;
    double min_clamp_margin = 1e30;
};

template <typename T>
class Network {
public:
    explicit Network(const NetworkConfig& cfg);

    const NetworkConfig& config() const { return cfg_; }
    ParamSet<T>& params() { return params_; }
    const ParamSet<T>& params() const { return params_; }

    /// Fan-in-scaled uniform kernels, zero biases, gamma 1, beta 0; the
    /// final Tanh layer is zeroed so training starts at the identity map.
    void init_params(uint64_t seed);

    /// One recurrent step. frames is the (3*(2b+1), H, W) stack of
    /// consecutive views, h_prev the previous hidden state or an empty
    /// tensor (treated as zeros). Produces the restored center view p in
    /// [0,1] and the new hidden state (C_h, H/2, W/2).
    void forward(const Tensor<T>& frames, const Tensor<T>& h_prev, Tensor<T>& p, Tensor<T>& h_out,
                 Workspace<T>& ws, StepCache<T>* cache = nullptr, ForwardDiag* diag = nullptr) const;

    /// Accumulates parameter gradients for one step given dL/dp and
    /// dL/dh_out (may be empty), and returns dL/dh_prev for the BPTT chain.
    void backward(const StepCache<T>& cache, const Tensor<T>& dp, const Tensor<T>& dh_out, ParamSet<T>& grads,
                  Tensor<T>& dh_prev, Workspace<T>& ws) const;

    template <typename U>
    Network<U> cast() const {
        Network<U> out(cfg_);
        for (size_t i = 0; i < params_.size(); ++i) {
            for (size_t j = 0; j < params_[i].data.size(); ++j) {
                out.params()[i].data[j] = static_cast<U>(params_[i].data[j]);
            }
        }
        return out;
    }

private:
    NetworkConfig cfg_;
    ParamSet<T> params_;
};

/// Eq-style single-view loss: mean squared error over all sample values of
/// (p - target) plus lambda * sum of squared trainable parameters.
template <typename T>
double loss_mse_reg(const Tensor<T>& p, const Tensor<T>& target, const ParamSet<T>& params, double lambda);

template <typename T>
double mse(const Tensor<T>& a, const Tensor<T>& b);

/// Loss gradient of the whole Eq-style objective for a single step:
/// forward + backward + 2*lambda*w. Exposed mainly for the finite
/// difference harness.
template <typename T>
void single_step_gradients(const Network<T>& net, const Tensor<T>& frames, const Tensor<T>& h_prev,
                           const Tensor<T>& target, double lambda, ParamSet<T>& grads, double* loss_out = nullptr);

// ---- checkpoint -------------------------------------------------------------

/// Versioned binary: magic, config JSON, then named tensors with shape
/// headers, little-endian float32 payload.
void save_checkpoint(const Network<float>& net, const std::filesystem::path& path);
Network<float> load_checkpoint(const std::filesystem::path& path);

// ---- full light field inference ---------------------------------------------

/// Runs the recurrent network over the full spiral sequence (h_0 = 0,
/// consecutive frames with end replication) and reassembles the restored
/// views. Odd spatial sizes are reflect-padded to even and cropped back.
/// step_seconds, when given, receives the wall time of each recurrent step.
LightField deblur_lightfield(const LightField& lf, const Network<float>& net,
                             std::vector<double>* step_seconds = nullptr);

}  // namespace lfdeblur::net
