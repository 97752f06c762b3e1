// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lfdeblur/motion.hpp"
#include "lfdeblur/net/network.hpp"

namespace lfdeblur::test {

/// Fills every tensor with nonzero values so that all gradient paths are
/// exercised (the production init zeroes the final layer, which would stop
/// gradients from flowing upstream of it).
template <typename T>
void randomize_all_params(net::Network<T>& network, uint64_t seed) {
    U53Generator rng(seed);
    auto& params = network.params();
    for (size_t i = 0; i < params.size(); ++i) {
        const std::string& name = params.names[i];
        net::Tensor<T>& t = params[i];
        if (t.shape.size() == 4) {
            const double a = std::sqrt(1.0 / (t.dim(1) * t.dim(2) * t.dim(3)));
            for (T& v : t.data) v = static_cast<T>(rng.next_symmetric(a));
        } else if (name.find(".gamma") != std::string::npos) {
            for (T& v : t.data) v = static_cast<T>(1.0 + rng.next_symmetric(0.25));
        } else {
            for (T& v : t.data) v = static_cast<T>(rng.next_symmetric(0.1));
        }
    }
}

template <typename T>
net::Tensor<T> random_tensor(std::vector<int> shape, U53Generator& rng, double lo, double hi) {
    net::Tensor<T> t(std::move(shape));
    for (T& v : t.data) v = static_cast<T>(lo + (hi - lo) * rng.next_u01());
    return t;
}

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::string worst_tensor;
    double worst_analytic = 0.0;
    double worst_fd = 0.0;
    size_t checked = 0;
};

/// Compares the analytic gradients of the single-step loss at precision T
/// against central finite differences evaluated on a float64 copy of the
/// same parameter values. Near-zero components are compared against
/// floor_frac * max|gradient| instead of their own magnitude.
template <typename T>
GradCheckReport check_single_step_gradients(const net::NetworkConfig& cfg, uint64_t seed, int spatial, double lambda,
                                            double fd_step) {
    // Draw inputs, reseeding until every ReLU/clamp kink is safely further
    // than the finite difference can reach.
    net::Network<T> network(cfg);
    net::Tensor<T> frames, h_prev, target;
    for (uint64_t attempt = 0;; ++attempt) {
        const uint64_t s = seed + 1000 * attempt;
        randomize_all_params(network, s);
        U53Generator rng(s ^ 0x9e3779b9);
        frames = random_tensor<T>({cfg.input_channels(), spatial, spatial}, rng, 0.2, 0.8);
        h_prev = random_tensor<T>({cfg.hidden_channels, spatial / 2, spatial / 2}, rng, 0.0, 0.5);
        target = random_tensor<T>({3, spatial, spatial}, rng, 0.25, 0.75);

        net::Workspace<T> ws;
        net::ForwardDiag diag;
        net::Tensor<T> p, h_out;
        network.forward(frames, h_prev, p, h_out, ws, nullptr, &diag);
        if (diag.min_relu_margin > 200 * fd_step && diag.min_clamp_margin > 200 * fd_step) break;
        if (attempt > 50) throw std::runtime_error("gradcheck: no kink-free configuration found");
    }

    net::ParamSet<T> grads = net::ParamSet<T>::make(cfg);
    net::single_step_gradients(network, frames, h_prev, target, lambda, grads);

    // float64 copy for the finite differences
    net::Network<double> dnet = network.template cast<double>();
    auto to_double = [](const net::Tensor<T>& t) {
        net::Tensor<double> d(t.shape);
        for (size_t i = 0; i < t.data.size(); ++i) d.data[i] = static_cast<double>(t.data[i]);
        return d;
    };
    const net::Tensor<double> dframes = to_double(frames);
    const net::Tensor<double> dh_prev = to_double(h_prev);
    const net::Tensor<double> dtarget = to_double(target);

    net::Workspace<double> dws;
    auto eval_loss = [&]() {
        net::Tensor<double> p, h_out;
        dnet.forward(dframes, dh_prev, p, h_out, dws);
        return net::loss_mse_reg(p, dtarget, dnet.params(), lambda);
    };

    // Components far below the dominant gradient cannot meet a pure relative
    // bound (float32 backward noise is ~1e-7 absolute), so they are held to
    // tol * floor absolute instead.
    double max_grad = 0.0;
    for (const auto& g : grads.tensors)
        for (const T& v : g.data) max_grad = std::max(max_grad, std::abs(static_cast<double>(v)));
    const double floor = std::max(1e-2 * max_grad, 1e-12);

    GradCheckReport report;
    for (size_t i = 0; i < grads.size(); ++i) {
        for (size_t j = 0; j < grads[i].data.size(); ++j) {
            double& w = dnet.params()[i].data[j];
            const double saved = w;
            w = saved + fd_step;
            const double up = eval_loss();
            w = saved - fd_step;
            const double down = eval_loss();
            w = saved;
            const double fd = (up - down) / (2.0 * fd_step);
            const double analytic = static_cast<double>(grads[i].data[j]);
            const double rel = std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), floor});
            ++report.checked;
            if (rel > report.max_rel_err) {
                report.max_rel_err = rel;
                report.worst_tensor = grads.names[i] + "[" + std::to_string(j) + "]";
                report.worst_analytic = analytic;
                report.worst_fd = fd;
            }
        }
    }
    return report;
}

/// Same idea for the n-step recurrent unroll: loss is the mean of per-step
/// MSEs plus the regularizer, with gradients flowing through the hidden
/// chain; FD re-runs the whole unroll.
GradCheckReport check_unroll_gradients(const net::NetworkConfig& cfg, uint64_t seed, int spatial, int steps,
                                       double lambda, double fd_step);

}  // namespace lfdeblur::test
