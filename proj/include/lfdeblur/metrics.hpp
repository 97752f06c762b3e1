// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lfdeblur/lightfield.hpp"

namespace lfdeblur {

/// Root mean squared error over all sample values.
double rmse(const Image& a, const Image& b);

/// 10*log10(1/MSE) in dB over pooled RGB, data range [0,1]. Identical
/// inputs give +infinity (serialized as the string "inf").
double psnr(const Image& a, const Image& b);

/// Structural similarity on luma (0.299R + 0.587G + 0.114B) with the
/// original parameters: 11x11 Gaussian window sigma 1.5, K1 = 0.01,
/// K2 = 0.03, L = 1. Mean over the valid window positions.
double ssim(const Image& a, const Image& b);

struct ViewMetrics {
    int u = 0;
    int v = 0;
    double psnr = 0.0;
    double ssim = 0.0;
    double rmse = 0.0;
};

struct EvalReport {
    std::string predicted_id;
    std::string reference_id;
    std::vector<ViewMetrics> per_view;
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
    double mean_rmse = 0.0;
};

/// Per-view PSNR/SSIM/RMSE on every (u, v) plus arithmetic means.
EvalReport evaluate_lf(const LightField& predicted, const LightField& reference);

void save_eval_report(const EvalReport& report, const std::filesystem::path& path);
void save_eval_report_csv(const EvalReport& report, const std::filesystem::path& path);

}  // namespace lfdeblur
