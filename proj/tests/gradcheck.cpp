// SPDX-License-Identifier: Apache-2.0
#include "gradcheck.hpp"

#include <stdexcept>

namespace lfdeblur::test {

namespace {

using net::ParamSet;
using net::StepCache;
using net::Tensor;
using net::Workspace;

struct UnrollProblem {
    std::vector<Tensor<double>> views;    // steps + 2b consecutive "views"
    std::vector<Tensor<double>> targets;  // one per step
};

Tensor<double> stack_frames(const UnrollProblem& prob, int step, int nframes, int spatial) {
    Tensor<double> frames({3 * nframes, spatial, spatial});
    const size_t plane = static_cast<size_t>(spatial) * spatial;
    for (int f = 0; f < nframes; ++f) {
        const Tensor<double>& view = prob.views[static_cast<size_t>(step + f)];
        std::copy(view.data.begin(), view.data.end(), frames.data.begin() + static_cast<size_t>(f) * 3 * plane);
    }
    return frames;
}

double unroll_loss(const net::Network<double>& network, const UnrollProblem& prob, int steps, int spatial,
                   double lambda, net::ForwardDiag* diag) {
    Workspace<double> ws;
    Tensor<double> h_state, p, h_next;
    double data = 0.0;
    for (int a = 0; a < steps; ++a) {
        const Tensor<double> frames = stack_frames(prob, a, network.config().input_frames(), spatial);
        network.forward(frames, h_state, p, h_next, ws, nullptr, diag);
        h_state = h_next;
        data += net::mse(p, prob.targets[static_cast<size_t>(a)]);
    }
    return data / steps + lambda * network.params().weight_sum_squares();
}

}  // namespace

GradCheckReport check_unroll_gradients(const net::NetworkConfig& cfg, uint64_t seed, int spatial, int steps,
                                       double lambda, double fd_step) {
    net::Network<double> network(cfg);
    UnrollProblem prob;
    for (uint64_t attempt = 0;; ++attempt) {
        const uint64_t s = seed + 1000 * attempt;
        randomize_all_params(network, s);
        U53Generator rng(s ^ 0x51ed2701);
        prob.views.clear();
        prob.targets.clear();
        for (int i = 0; i < steps + 2 * cfg.temporal_radius; ++i) {
            prob.views.push_back(random_tensor<double>({3, spatial, spatial}, rng, 0.2, 0.8));
        }
        for (int a = 0; a < steps; ++a) {
            prob.targets.push_back(random_tensor<double>({3, spatial, spatial}, rng, 0.25, 0.75));
        }
        net::ForwardDiag diag;
        unroll_loss(network, prob, steps, spatial, lambda, &diag);
        if (diag.min_relu_margin > 200 * fd_step && diag.min_clamp_margin > 200 * fd_step) break;
        if (attempt > 50) throw std::runtime_error("gradcheck: no kink-free unroll found");
    }

    // Analytic gradients through the full unroll.
    ParamSet<double> grads = ParamSet<double>::make(cfg);
    {
        Workspace<double> ws;
        std::vector<StepCache<double>> caches(static_cast<size_t>(steps));
        Tensor<double> h_state, p, h_next;
        for (int a = 0; a < steps; ++a) {
            const Tensor<double> frames = stack_frames(prob, a, cfg.input_frames(), spatial);
            network.forward(frames, h_state, p, h_next, ws, &caches[static_cast<size_t>(a)]);
            h_state = h_next;
        }
        Tensor<double> dh, dh_prev;
        const double scale = 2.0 / (static_cast<double>(p.numel()) * steps);
        for (int a = steps - 1; a >= 0; --a) {
            const StepCache<double>& cache = caches[static_cast<size_t>(a)];
            const Tensor<double>& target = prob.targets[static_cast<size_t>(a)];
            Tensor<double> dp(cache.p.shape);
            for (size_t i = 0; i < dp.data.size(); ++i) {
                dp.data[i] = scale * (cache.p.data[i] - target.data[i]);
            }
            network.backward(cache, dp, dh, grads, dh_prev, ws);
            dh = std::move(dh_prev);
        }
        for (size_t i = 0; i < grads.size(); ++i) {
            if (grads[i].shape.size() != 4) continue;
            for (size_t j = 0; j < grads[i].data.size(); ++j) {
                grads[i].data[j] += 2.0 * lambda * network.params()[i].data[j];
            }
        }
    }

    double max_grad = 0.0;
    for (const auto& g : grads.tensors)
        for (double v : g.data) max_grad = std::max(max_grad, std::abs(v));
    const double floor = std::max(1e-2 * max_grad, 1e-12);

    GradCheckReport report;
    for (size_t i = 0; i < grads.size(); ++i) {
        for (size_t j = 0; j < grads[i].data.size(); ++j) {
            double& w = network.params()[i].data[j];
            const double saved = w;
            w = saved + fd_step;
            const double up = unroll_loss(network, prob, steps, spatial, lambda, nullptr);
            w = saved - fd_step;
            const double down = unroll_loss(network, prob, steps, spatial, lambda, nullptr);
            w = saved;
            const double fd = (up - down) / (2.0 * fd_step);
            const double analytic = grads[i].data[j];
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

}  // namespace lfdeblur::test
