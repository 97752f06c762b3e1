// SPDX-License-Identifier: Apache-2.0
#include "lfdeblur/net/network.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "lfdeblur/motion.hpp"  // U53Generator

namespace lfdeblur::net {

void NetworkConfig::validate() const {
    if (temporal_radius < 0) throw std::invalid_argument("NetworkConfig: temporal_radius must be >= 0");
    if (base_channels < 1 || hidden_channels < 1) throw std::invalid_argument("NetworkConfig: channels must be >= 1");
    if (num_blocks < 1) throw std::invalid_argument("NetworkConfig: num_blocks must be >= 1");
    if (norm_epsilon <= 0.0) throw std::invalid_argument("NetworkConfig: norm_epsilon must be positive");
}

nlohmann::ordered_json NetworkConfig::to_json() const {
    return nlohmann::ordered_json{{"temporal_radius", temporal_radius}, {"base_channels", base_channels},
                                  {"hidden_channels", hidden_channels}, {"num_blocks", num_blocks},
                                  {"norm_epsilon", norm_epsilon},       {"init_seed", init_seed}};
}

NetworkConfig NetworkConfig::from_json(const nlohmann::json& j) {
    NetworkConfig cfg;
    cfg.temporal_radius = j.value("temporal_radius", cfg.temporal_radius);
    cfg.base_channels = j.value("base_channels", cfg.base_channels);
    cfg.hidden_channels = j.value("hidden_channels", cfg.hidden_channels);
    cfg.num_blocks = j.value("num_blocks", cfg.num_blocks);
    cfg.norm_epsilon = j.value("norm_epsilon", cfg.norm_epsilon);
    cfg.init_seed = j.value("init_seed", cfg.init_seed);
    cfg.validate();
    return cfg;
}

namespace {

// Canonical tensor order: conv1 + in1, conv2 + in2, the blocks, then the
// deconv/conv3 heads and conv4. Eight tensors per block.
constexpr int kBlockStride = 8;
inline int block_base(int i) { return 8 + kBlockStride * i; }
inline int tail_base(int num_blocks) { return 8 + kBlockStride * num_blocks; }

struct TailIdx {
    int deconv_w, deconv_b, in_up_g, in_up_b;
    int conv3_w, conv3_b, in_h_g, in_h_b;
    int conv4_w, conv4_b;
};
inline TailIdx tail_idx(int num_blocks) {
    const int t = tail_base(num_blocks);
    return {t, t + 1, t + 2, t + 3, t + 4, t + 5, t + 6, t + 7, t + 8, t + 9};
}

}  // namespace

template <typename T>
ParamSet<T> ParamSet<T>::make(const NetworkConfig& cfg) {
    cfg.validate();
    const int c = cfg.base_channels;
    const int c2 = 2 * c;
    const int ch = cfg.hidden_channels;
    const int cin = cfg.input_channels();

    ParamSet<T> p;
    auto add = [&p](const std::string& name, std::vector<int> shape) {
        p.names.push_back(name);
        p.tensors.emplace_back(std::move(shape));
    };

    add("conv1.weight", {c, cin, 5, 5});
    add("conv1.bias", {c});
    add("in1.gamma", {c});
    add("in1.beta", {c});
    add("conv2.weight", {c2, c, 3, 3});
    add("conv2.bias", {c2});
    add("in2.gamma", {c2});
    add("in2.beta", {c2});
    for (int i = 0; i < cfg.num_blocks; ++i) {
        const int in_ch = (i == 0) ? c2 + ch : c2;
        const std::string b = "block" + std::to_string(i) + ".";
        add(b + "conv_a.weight", {c2, in_ch, 3, 3});
        add(b + "conv_a.bias", {c2});
        add(b + "in_a.gamma", {c2});
        add(b + "in_a.beta", {c2});
        add(b + "conv_b.weight", {c2, c2, 3, 3});
        add(b + "conv_b.bias", {c2});
        add(b + "in_b.gamma", {c2});
        add(b + "in_b.beta", {c2});
    }
    add("deconv.weight", {c2, c, 4, 4});
    add("deconv.bias", {c});
    add("in_up.gamma", {c});
    add("in_up.beta", {c});
    add("conv3.weight", {ch, c2, 3, 3});
    add("conv3.bias", {ch});
    add("in_h.gamma", {ch});
    add("in_h.beta", {ch});
    add("conv4.weight", {3, c, 3, 3});
    add("conv4.bias", {3});
    return p;
}

template <typename T>
void ParamSet<T>::zero() {
    for (Tensor<T>& t : tensors) t.zero();
}

template <typename T>
size_t ParamSet<T>::total_parameters() const {
    size_t n = 0;
    for (const Tensor<T>& t : tensors) n += t.numel();
    return n;
}

template <typename T>
double ParamSet<T>::sum_squares() const {
    double acc = 0.0;
    for (const Tensor<T>& t : tensors)
        for (const T& v : t.data) acc += static_cast<double>(v) * static_cast<double>(v);
    return acc;
}

template <typename T>
double ParamSet<T>::weight_sum_squares() const {
    double acc = 0.0;
    for (const Tensor<T>& t : tensors) {
        if (t.shape.size() != 4) continue;
        for (const T& v : t.data) acc += static_cast<double>(v) * static_cast<double>(v);
    }
    return acc;
}

template <typename T>
Network<T>::Network(const NetworkConfig& cfg) : cfg_(cfg), params_(ParamSet<T>::make(cfg)) {}

template <typename T>
void Network<T>::init_params(uint64_t seed) {
    cfg_.init_seed = seed;
    U53Generator rng(seed);
    for (size_t i = 0; i < params_.size(); ++i) {
        Tensor<T>& t = params_[i];
        const std::string& name = params_.names[i];
        const bool is_final = name.rfind("conv4.", 0) == 0;
        if (t.shape.size() == 4 && !is_final) {
            // Fan-in-scaled uniform; for the deconv kernel (in, out, kh, kw)
            // shape[0]*kh*kw is used the same way.
            const int fan_in = (name == "deconv.weight") ? t.dim(0) * t.dim(2) * t.dim(3)
                                                         : t.dim(1) * t.dim(2) * t.dim(3);
            const double a = std::sqrt(1.0 / fan_in);
            for (T& v : t.data) v = static_cast<T>(rng.next_symmetric(a));
        } else if (name.find(".gamma") != std::string::npos) {
            std::fill(t.data.begin(), t.data.end(), T(1));
        } else {
            t.zero();  // biases, betas, and the whole final layer
        }
    }
}

namespace {

template <typename T>
void concat_channels(const Tensor<T>& a, const Tensor<T>& b, Tensor<T>& out) {
    out.reset({a.dim(0) + b.dim(0), a.dim(1), a.dim(2)});
    std::copy(a.data.begin(), a.data.end(), out.data.begin());
    std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
}

template <typename T>
void add_into(Tensor<T>& dst, const Tensor<T>& src) {
    for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

}  // namespace

template <typename T>
void Network<T>::forward(const Tensor<T>& frames, const Tensor<T>& h_prev, Tensor<T>& p, Tensor<T>& h_out,
                         Workspace<T>& ws, StepCache<T>* cache, ForwardDiag* diag) const {
    if (frames.shape.size() != 3 || frames.dim(0) != cfg_.input_channels()) {
        throw std::invalid_argument("Network::forward: frames must be (3*(2b+1), H, W)");
    }
    const int h = frames.dim(1), w = frames.dim(2);
    if (h % 2 != 0 || w % 2 != 0) {
        throw std::invalid_argument("Network::forward: spatial size must be divisible by 2");
    }
    const int hh = h / 2, hw = w / 2;
    const int c2 = 2 * cfg_.base_channels;
    const int ch = cfg_.hidden_channels;
    if (!h_prev.empty() && (h_prev.dim(0) != ch || h_prev.dim(1) != hh || h_prev.dim(2) != hw)) {
        throw std::invalid_argument("Network::forward: h_prev shape does not match the input");
    }

    StepCache<T> local;
    StepCache<T>& c = cache ? *cache : local;
    const ParamSet<T>& P = params_;
    const TailIdx tail = tail_idx(cfg_.num_blocks);
    double* relu_margin = diag ? &diag->min_relu_margin : nullptr;

    c.frames = frames;
    if (h_prev.empty()) {
        c.h_prev.reset({ch, hh, hw});
    } else {
        c.h_prev = h_prev;
    }

    conv_forward(c.frames, P[0], P[1], 1, 2, c.c1_pre, ws);
    instance_norm_forward(c.c1_pre, P[2], P[3], cfg_.norm_epsilon, c.c1, c.in1);
    relu_inplace(c.c1, relu_margin);

    conv_forward(c.c1, P[4], P[5], 2, 1, c.c2_pre, ws);
    instance_norm_forward(c.c2_pre, P[6], P[7], cfg_.norm_epsilon, c.c2, c.in2);
    relu_inplace(c.c2, relu_margin);

    concat_channels(c.c2, c.h_prev, c.z);

    c.blocks.resize(static_cast<size_t>(cfg_.num_blocks));
    for (int i = 0; i < cfg_.num_blocks; ++i) {
        auto& bc = c.blocks[static_cast<size_t>(i)];
        const Tensor<T>& input = (i == 0) ? c.z : c.blocks[static_cast<size_t>(i - 1)].r;
        const int base = block_base(i);
        conv_forward(input, P[base], P[base + 1], 1, 1, bc.a_pre, ws);
        instance_norm_forward(bc.a_pre, P[base + 2], P[base + 3], cfg_.norm_epsilon, bc.a, bc.in_a);
        relu_inplace(bc.a, relu_margin);
        conv_forward(bc.a, P[base + 4], P[base + 5], 1, 1, bc.d_pre, ws);
        instance_norm_forward(bc.d_pre, P[base + 6], P[base + 7], cfg_.norm_epsilon, bc.r, bc.in_d);
        // The skip of the widened first block adds the Conv2 features (the
        // first 2C channels of its input).
        add_into(bc.r, (i == 0) ? c.c2 : c.blocks[static_cast<size_t>(i - 1)].r);
    }
    const Tensor<T>& r_last = c.blocks.back().r;

    deconv_forward(r_last, P[tail.deconv_w], P[tail.deconv_b], 2, 1, c.up_pre, ws);
    instance_norm_forward(c.up_pre, P[tail.in_up_g], P[tail.in_up_b], cfg_.norm_epsilon, c.up, c.in_up);
    relu_inplace(c.up, relu_margin);

    conv_forward(r_last, P[tail.conv3_w], P[tail.conv3_b], 1, 1, c.hid_pre, ws);
    instance_norm_forward(c.hid_pre, P[tail.in_h_g], P[tail.in_h_b], cfg_.norm_epsilon, c.hid, c.in_h);
    relu_inplace(c.hid, relu_margin);

    Tensor<T> res_pre;
    conv_forward(c.up, P[tail.conv4_w], P[tail.conv4_b], 1, 1, res_pre, ws);
    tanh_forward(res_pre, c.res);

    // Residual added to the center frame, clamped into the sample range.
    c.p_pre.reset({3, h, w});
    const size_t plane = static_cast<size_t>(h) * w;
    const T* center = c.frames.ptr() + static_cast<size_t>(3 * cfg_.temporal_radius) * plane;
    for (size_t i = 0; i < 3 * plane; ++i) c.p_pre.data[i] = center[i] + c.res.data[i];
    c.p.reset({3, h, w});
    for (size_t i = 0; i < 3 * plane; ++i) {
        const T v = c.p_pre.data[i];
        c.p.data[i] = std::clamp(v, T(0), T(1));
        if (diag) {
            const double margin = std::min(std::abs(static_cast<double>(v)), std::abs(1.0 - static_cast<double>(v)));
            diag->min_clamp_margin = std::min(diag->min_clamp_margin, margin);
        }
    }

    p = c.p;
    h_out = c.hid;
}

template <typename T>
void Network<T>::backward(const StepCache<T>& c, const Tensor<T>& dp, const Tensor<T>& dh_out, ParamSet<T>& grads,
                          Tensor<T>& dh_prev, Workspace<T>& ws) const {
    const ParamSet<T>& P = params_;
    const TailIdx tail = tail_idx(cfg_.num_blocks);
    const int c2 = 2 * cfg_.base_channels;
    const int ch = cfg_.hidden_channels;
    const int hh = c.c2.dim(1), hw = c.c2.dim(2);

    // Clamp: gradients pass only where the pre-clamp value was in range.
    Tensor<T> dres(c.res.shape);
    for (size_t i = 0; i < dres.data.size(); ++i) {
        const T v = c.p_pre.data[i];
        dres.data[i] = (v >= T(0) && v <= T(1)) ? dp.data[i] : T(0);
    }

    Tensor<T> dres_pre;
    tanh_backward(c.res, dres, dres_pre);

    Tensor<T> dup;
    conv_backward(c.up, P[tail.conv4_w], 1, 1, dres_pre, &dup, grads[tail.conv4_w], grads[tail.conv4_b], false, ws);

    Tensor<T> dup_relu;
    relu_backward(c.up, dup, dup_relu);
    Tensor<T> dup_pre;
    instance_norm_backward(c.up_pre, P[tail.in_up_g], c.in_up, dup_relu, dup_pre, grads[tail.in_up_g],
                           grads[tail.in_up_b]);

    const Tensor<T>& r_last = c.blocks.back().r;
    Tensor<T> dr(r_last.shape);
    deconv_backward(r_last, P[tail.deconv_w], 2, 1, dup_pre, &dr, grads[tail.deconv_w], grads[tail.deconv_b], true,
                    ws);

    if (!dh_out.empty()) {
        Tensor<T> dhid_relu;
        relu_backward(c.hid, dh_out, dhid_relu);
        Tensor<T> dhid_pre;
        instance_norm_backward(c.hid_pre, P[tail.in_h_g], c.in_h, dhid_relu, dhid_pre, grads[tail.in_h_g],
                               grads[tail.in_h_b]);
        conv_backward(r_last, P[tail.conv3_w], 1, 1, dhid_pre, &dr, grads[tail.conv3_w], grads[tail.conv3_b], true,
                      ws);
    }

    Tensor<T> dc2;
    for (int i = cfg_.num_blocks - 1; i >= 0; --i) {
        const auto& bc = c.blocks[static_cast<size_t>(i)];
        const Tensor<T>& input = (i == 0) ? c.z : c.blocks[static_cast<size_t>(i - 1)].r;
        const int base = block_base(i);

        Tensor<T> dd_pre;
        instance_norm_backward(bc.d_pre, P[base + 6], bc.in_d, dr, dd_pre, grads[base + 6], grads[base + 7]);
        Tensor<T> da;
        conv_backward(bc.a, P[base + 4], 1, 1, dd_pre, &da, grads[base + 4], grads[base + 5], false, ws);
        Tensor<T> da_relu;
        relu_backward(bc.a, da, da_relu);
        Tensor<T> da_pre;
        instance_norm_backward(bc.a_pre, P[base + 2], bc.in_a, da_relu, da_pre, grads[base + 2], grads[base + 3]);
        Tensor<T> din;
        conv_backward(input, P[base], 1, 1, da_pre, &din, grads[base], grads[base + 1], false, ws);

        if (i > 0) {
            // dr for the previous block: conv path plus the additive skip.
            add_into(din, dr);
            dr = std::move(din);
        } else {
            // din is dz = (dc2 | dh_prev); the skip adds dr to the c2 part.
            dc2.reset({c2, hh, hw});
            std::copy(din.data.begin(), din.data.begin() + dc2.data.size(), dc2.data.begin());
            add_into(dc2, dr);
            dh_prev.reset({ch, hh, hw});
            std::copy(din.data.begin() + dc2.data.size(), din.data.end(), dh_prev.data.begin());
        }
    }

    Tensor<T> dc2_relu;
    relu_backward(c.c2, dc2, dc2_relu);
    Tensor<T> dc2_pre;
    instance_norm_backward(c.c2_pre, P[6], c.in2, dc2_relu, dc2_pre, grads[6], grads[7]);
    Tensor<T> dc1;
    conv_backward(c.c1, P[4], 2, 1, dc2_pre, &dc1, grads[4], grads[5], false, ws);

    Tensor<T> dc1_relu;
    relu_backward(c.c1, dc1, dc1_relu);
    Tensor<T> dc1_pre;
    instance_norm_backward(c.c1_pre, P[2], c.in1, dc1_relu, dc1_pre, grads[2], grads[3]);
    conv_backward(c.frames, P[0], 1, 2, dc1_pre, static_cast<Tensor<T>*>(nullptr), grads[0], grads[1], false, ws);
}

template <typename T>
double mse(const Tensor<T>& a, const Tensor<T>& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("mse: shape mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(a.data.size());
}

template <typename T>
double loss_mse_reg(const Tensor<T>& p, const Tensor<T>& target, const ParamSet<T>& params, double lambda) {
    return mse(p, target) + lambda * params.weight_sum_squares();
}

template <typename T>
void single_step_gradients(const Network<T>& net, const Tensor<T>& frames, const Tensor<T>& h_prev,
                           const Tensor<T>& target, double lambda, ParamSet<T>& grads, double* loss_out) {
    Workspace<T> ws;
    StepCache<T> cache;
    Tensor<T> p, h_out;
    net.forward(frames, h_prev, p, h_out, ws, &cache);

    Tensor<T> dp(p.shape);
    const double scale = 2.0 / static_cast<double>(p.numel());
    for (size_t i = 0; i < p.data.size(); ++i) {
        dp.data[i] = static_cast<T>(scale * (static_cast<double>(p.data[i]) - static_cast<double>(target.data[i])));
    }
    Tensor<T> dh_prev;
    net.backward(cache, dp, Tensor<T>(), grads, dh_prev, ws);

    if (lambda != 0.0) {
        for (size_t i = 0; i < grads.size(); ++i) {
            const Tensor<T>& w = net.params()[i];
            if (w.shape.size() != 4) continue;
            for (size_t j = 0; j < w.data.size(); ++j) {
                grads[i].data[j] += static_cast<T>(2.0 * lambda * static_cast<double>(w.data[j]));
            }
        }
    }
    if (loss_out) *loss_out = loss_mse_reg(p, target, net.params(), lambda);
}

// ---- checkpoint -------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'L', 'F', 'D', 'B', 'N', 'E', 'T', '1'};

void write_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) | (static_cast<uint32_t>(b[2]) << 16) |
           (static_cast<uint32_t>(b[3]) << 24);
}

}  // namespace

void save_checkpoint(const Network<float>& net, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot write " + path.string());
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, 1);  // format version
    const std::string cfg = net.config().to_json().dump();
    write_u32(out, static_cast<uint32_t>(cfg.size()));
    out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));

    const ParamSet<float>& params = net.params();
    write_u32(out, static_cast<uint32_t>(params.size()));
    for (size_t i = 0; i < params.size(); ++i) {
        const std::string& name = params.names[i];
        write_u32(out, static_cast<uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u32(out, static_cast<uint32_t>(params[i].shape.size()));
        for (int d : params[i].shape) write_u32(out, static_cast<uint32_t>(d));
        static_assert(sizeof(float) == 4);
        out.write(reinterpret_cast<const char*>(params[i].ptr()),
                  static_cast<std::streamsize>(params[i].numel() * sizeof(float)));
    }
    if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path.string());
}

Network<float> load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("load_checkpoint: " + path.string() + " is not a checkpoint file");
    }
    const uint32_t version = read_u32(in);
    if (version != 1) {
        throw std::runtime_error("load_checkpoint: unsupported version " + std::to_string(version));
    }
    const uint32_t cfg_len = read_u32(in);
    std::string cfg_str(cfg_len, '\0');
    in.read(cfg_str.data(), cfg_len);
    Network<float> net(NetworkConfig::from_json(nlohmann::json::parse(cfg_str)));

    const uint32_t count = read_u32(in);
    ParamSet<float>& params = net.params();
    if (count != params.size()) {
        throw std::runtime_error("load_checkpoint: tensor count does not match the config");
    }
    for (uint32_t i = 0; i < count; ++i) {
        const uint32_t name_len = read_u32(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        if (name != params.names[i]) {
            throw std::runtime_error("load_checkpoint: unexpected tensor '" + name + "' (wanted '" +
                                     params.names[i] + "')");
        }
        const uint32_t ndim = read_u32(in);
        std::vector<int> shape(ndim);
        for (uint32_t d = 0; d < ndim; ++d) shape[d] = static_cast<int>(read_u32(in));
        if (shape != params[i].shape) {
            throw std::runtime_error("load_checkpoint: shape mismatch for tensor '" + name + "'");
        }
        in.read(reinterpret_cast<char*>(params[i].ptr()),
                static_cast<std::streamsize>(params[i].numel() * sizeof(float)));
    }
    if (!in) throw std::runtime_error("load_checkpoint: truncated file " + path.string());
    return net;
}

// ---- full light field inference ---------------------------------------------

namespace {

/// Copies one view patch into 3 consecutive planar channels of dst.
void view_patch_planar(const LightField& lf, int u, int v, int y0, int x0, int ph, int pw, float* dst) {
    const size_t plane = static_cast<size_t>(ph) * pw;
    for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x)
            for (int c = 0; c < 3; ++c) {
                dst[static_cast<size_t>(c) * plane + static_cast<size_t>(y) * pw + x] = lf.at(u, v, y0 + y, x0 + x, c);
            }
}

LightField reflect_pad_to_even(const LightField& lf) {
    const int h = lf.height(), w = lf.width();
    const int hp = h + (h % 2), wp = w + (w % 2);
    LightField out(lf.views_u(), lf.views_v(), hp, wp, lf.intrinsics());
    for (int u = 0; u < lf.views_u(); ++u)
        for (int v = 0; v < lf.views_v(); ++v)
            for (int y = 0; y < hp; ++y) {
                const int sy = y < h ? y : (h >= 2 ? h - 2 : h - 1);
                for (int x = 0; x < wp; ++x) {
                    const int sx = x < w ? x : (w >= 2 ? w - 2 : w - 1);
                    for (int c = 0; c < 3; ++c) out.at(u, v, y, x, c) = lf.at(u, v, sy, sx, c);
                }
            }
    return out;
}

}  // namespace

LightField deblur_lightfield(const LightField& lf, const Network<float>& net, std::vector<double>* step_seconds) {
    const NetworkConfig& cfg = net.config();
    const SpiralSequence seq = spiral_order(lf.views_u(), lf.views_v());
    const int steps = static_cast<int>(seq.size());
    const int b = cfg.temporal_radius;
    const int nframes = cfg.input_frames();

    const bool padded = (lf.height() % 2 != 0) || (lf.width() % 2 != 0);
    LightField padded_copy = padded ? reflect_pad_to_even(lf) : LightField();
    const LightField& work = padded ? padded_copy : lf;
    const int h = work.height(), w = work.width();

    LightField out(lf.views_u(), lf.views_v(), lf.height(), lf.width(), lf.intrinsics());
    Workspace<float> ws;
    Tensor<float> frames({3 * nframes, h, w});
    Tensor<float> h_state;  // empty = zeros at the sequence start
    Tensor<float> p, h_next;
    const size_t plane = static_cast<size_t>(h) * w;

    for (int a = 0; a < steps; ++a) {
        const auto t0 = std::chrono::steady_clock::now();
        for (int o = -b; o <= b; ++o) {
            const int idx = std::clamp(a + o, 0, steps - 1);  // end replication
            const ViewIndex vi = seq[static_cast<size_t>(idx)];
            view_patch_planar(work, vi.u, vi.v, 0, 0, h, w, frames.ptr() + static_cast<size_t>(o + b) * 3 * plane);
        }
        net.forward(frames, h_state, p, h_next, ws);
        h_state = h_next;

        const ViewIndex vi = seq[static_cast<size_t>(a)];
        for (int y = 0; y < lf.height(); ++y)
            for (int x = 0; x < lf.width(); ++x)
                for (int c = 0; c < 3; ++c) {
                    out.at(vi.u, vi.v, y, x, c) = p.data[static_cast<size_t>(c) * plane + static_cast<size_t>(y) * w + x];
                }
        if (step_seconds) {
            step_seconds->push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
    }
    return out;
}

#define LFDEBLUR_INSTANTIATE_NET(T)                                                                                 \
    template struct ParamSet<T>;                                                                                    \
    template class Network<T>;                                                                                      \
    template double mse<T>(const Tensor<T>&, const Tensor<T>&);                                                     \
    template double loss_mse_reg<T>(const Tensor<T>&, const Tensor<T>&, const ParamSet<T>&, double);                \
    template void single_step_gradients<T>(const Network<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, \
                                           double, ParamSet<T>&, double*);

LFDEBLUR_INSTANTIATE_NET(float)
LFDEBLUR_INSTANTIATE_NET(double)
#undef LFDEBLUR_INSTANTIATE_NET

}  // namespace lfdeblur::net
