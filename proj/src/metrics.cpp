// SPDX-License-Identifier: Apache-2.0
#include "lfdeblur/metrics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lfdeblur {

namespace {

void check_same_shape(const Image& a, const Image& b, const char* who) {
    if (a.height != b.height || a.width != b.width || a.channels != b.channels) {
        throw std::invalid_argument(std::string(who) + ": shape mismatch (" + std::to_string(a.height) + "x" +
                                    std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" +
                                    std::to_string(b.width) + ")");
    }
}

double mse(const Image& a, const Image& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(a.data.size());
}

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 0.01 * 0.01;  // (K1 * L)^2, L = 1
constexpr double kSsimC2 = 0.03 * 0.03;

std::vector<double> luma(const Image& img) {
    std::vector<double> out(static_cast<size_t>(img.height) * img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            out[static_cast<size_t>(y) * img.width + x] =
                0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) + 0.114 * img.at(y, x, 2);
        }
    return out;
}

const std::vector<double>& gaussian_window() {
    static const std::vector<double> window = [] {
        std::vector<double> w(kSsimWindow * kSsimWindow);
        const double c = (kSsimWindow - 1) / 2.0;
        double sum = 0.0;
        for (int i = 0; i < kSsimWindow; ++i)
            for (int j = 0; j < kSsimWindow; ++j) {
                const double d2 = (i - c) * (i - c) + (j - c) * (j - c);
                w[i * kSsimWindow + j] = std::exp(-d2 / (2.0 * kSsimSigma * kSsimSigma));
                sum += w[i * kSsimWindow + j];
            }
        for (double& v : w) v /= sum;
        return w;
    }();
    return window;
}

}  // namespace

double rmse(const Image& a, const Image& b) {
    check_same_shape(a, b, "rmse");
    return std::sqrt(mse(a, b));
}

double psnr(const Image& a, const Image& b) {
    check_same_shape(a, b, "psnr");
    const double m = mse(a, b);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / m);
}

double ssim(const Image& a, const Image& b) {
    check_same_shape(a, b, "ssim");
    if (a.height < kSsimWindow || a.width < kSsimWindow) {
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");
    }
    const std::vector<double> la = luma(a);
    const std::vector<double> lb = luma(b);
    const std::vector<double>& w = gaussian_window();

    const int H = a.height, W = a.width;
    double total = 0.0;
    long count = 0;
    for (int y = 0; y + kSsimWindow <= H; ++y) {
        for (int x = 0; x + kSsimWindow <= W; ++x) {
            double mu_a = 0.0, mu_b = 0.0;
            for (int i = 0; i < kSsimWindow; ++i)
                for (int j = 0; j < kSsimWindow; ++j) {
                    const double wij = w[i * kSsimWindow + j];
                    mu_a += wij * la[static_cast<size_t>(y + i) * W + (x + j)];
                    mu_b += wij * lb[static_cast<size_t>(y + i) * W + (x + j)];
                }
            double var_a = 0.0, var_b = 0.0, cov = 0.0;
            for (int i = 0; i < kSsimWindow; ++i)
                for (int j = 0; j < kSsimWindow; ++j) {
                    const double wij = w[i * kSsimWindow + j];
                    const double da = la[static_cast<size_t>(y + i) * W + (x + j)] - mu_a;
                    const double db = lb[static_cast<size_t>(y + i) * W + (x + j)] - mu_b;
                    var_a += wij * da * da;
                    var_b += wij * db * db;
                    cov += wij * da * db;
                }
            const double num = (2.0 * mu_a * mu_b + kSsimC1) * (2.0 * cov + kSsimC2);
            const double den = (mu_a * mu_a + mu_b * mu_b + kSsimC1) * (var_a + var_b + kSsimC2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

EvalReport evaluate_lf(const LightField& predicted, const LightField& reference) {
    if (predicted.views_u() != reference.views_u() || predicted.views_v() != reference.views_v() ||
        predicted.height() != reference.height() || predicted.width() != reference.width()) {
        throw std::invalid_argument("evaluate_lf: light field dimensions do not match");
    }
    EvalReport report;
    double sum_psnr = 0.0, sum_ssim = 0.0, sum_rmse = 0.0;
    for (int u = 0; u < predicted.views_u(); ++u)
        for (int v = 0; v < predicted.views_v(); ++v) {
            const Image pv = predicted.view(u, v);
            const Image rv = reference.view(u, v);
            ViewMetrics m;
            m.u = u;
            m.v = v;
            m.psnr = psnr(pv, rv);
            m.ssim = ssim(pv, rv);
            m.rmse = rmse(pv, rv);
            sum_psnr += m.psnr;
            sum_ssim += m.ssim;
            sum_rmse += m.rmse;
            report.per_view.push_back(m);
        }
    const double n = static_cast<double>(report.per_view.size());
    report.mean_psnr = sum_psnr / n;
    report.mean_ssim = sum_ssim / n;
    report.mean_rmse = sum_rmse / n;
    return report;
}

namespace {

nlohmann::ordered_json psnr_json(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

}  // namespace

void save_eval_report(const EvalReport& report, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["predicted"] = report.predicted_id;
    j["reference"] = report.reference_id;
    nlohmann::ordered_json views = nlohmann::ordered_json::array();
    for (const ViewMetrics& m : report.per_view) {
        views.push_back(
            {{"u", m.u}, {"v", m.v}, {"psnr", psnr_json(m.psnr)}, {"ssim", m.ssim}, {"rmse", m.rmse}});
    }
    j["per_view"] = views;
    j["mean"] = {{"psnr", psnr_json(report.mean_psnr)}, {"ssim", report.mean_ssim}, {"rmse", report.mean_rmse}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_eval_report: cannot write " + path.string());
    out << j.dump(2) << "\n";
}

void save_eval_report_csv(const EvalReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_eval_report_csv: cannot write " + path.string());
    out << "u,v,psnr,ssim,rmse\n";
    for (const ViewMetrics& m : report.per_view) {
        out << m.u << "," << m.v << ",";
        if (std::isinf(m.psnr)) {
            out << "inf";
        } else {
            out << m.psnr;
        }
        out << "," << m.ssim << "," << m.rmse << "\n";
    }
}

}  // namespace lfdeblur
