// SPDX-License-Identifier: Apache-2.0
#include "lfdeblur/net/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace lfdeblur::net {

namespace {

template <typename T>
void check_3d(const Tensor<T>& t, const char* who) {
    if (t.shape.size() != 3) throw std::invalid_argument(std::string(who) + ": expected a (C,H,W) tensor");
}

}  // namespace

template <typename T>
void conv_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b, int stride, int pad, Tensor<T>& y,
                  Workspace<T>& ws) {
    check_3d(x, "conv_forward");
    const int cin = x.dim(0), h = x.dim(1), wd = x.dim(2);
    const int cout = w.dim(0), kh = w.dim(2), kw = w.dim(3);
    if (w.dim(1) != cin) throw std::invalid_argument("conv_forward: kernel input channels mismatch");
    const int oh = conv_out_size(h, kh, pad, stride);
    const int ow = conv_out_size(wd, kw, pad, stride);
    const int k = cin * kh * kw;
    const int n = oh * ow;

    T* col = ws.col_buf(static_cast<size_t>(k) * n);
    im2col(x.ptr(), cin, h, wd, kh, kw, pad, stride, col);
    y.reset({cout, oh, ow});
    gemm(false, false, cout, n, k, T(1), w.ptr(), k, col, n, T(0), y.ptr(), n);
    for (int c = 0; c < cout; ++c) {
        T* row = y.ptr() + static_cast<size_t>(c) * n;
        const T bias = b.data[static_cast<size_t>(c)];
        for (int i = 0; i < n; ++i) row[i] += bias;
    }
}

template <typename T>
void conv_backward(const Tensor<T>& x, const Tensor<T>& w, int stride, int pad, const Tensor<T>& dy, Tensor<T>* dx,
                   Tensor<T>& dw, Tensor<T>& db, bool accumulate_dx, Workspace<T>& ws) {
    const int cin = x.dim(0), h = x.dim(1), wd = x.dim(2);
    const int cout = w.dim(0), kh = w.dim(2), kw = w.dim(3);
    const int k = cin * kh * kw;
    const int n = dy.dim(1) * dy.dim(2);

    for (int c = 0; c < cout; ++c) {
        const T* row = dy.ptr() + static_cast<size_t>(c) * n;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += static_cast<double>(row[i]);
        db.data[static_cast<size_t>(c)] += static_cast<T>(acc);
    }

    T* col = ws.col_buf(static_cast<size_t>(k) * n);
    im2col(x.ptr(), cin, h, wd, kh, kw, pad, stride, col);
    gemm(false, true, cout, k, n, T(1), dy.ptr(), n, col, n, T(1), dw.ptr(), k);

    if (dx) {
        T* dcol = ws.dcol_buf(static_cast<size_t>(k) * n);
        gemm(true, false, k, n, cout, T(1), w.ptr(), k, dy.ptr(), n, T(0), dcol, n);
        if (!accumulate_dx) {
            dx->reset({cin, h, wd});
        }
        col2im(dcol, cin, h, wd, kh, kw, pad, stride, dx->ptr());
    }
}

template <typename T>
void deconv_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b, int stride, int pad, Tensor<T>& y,
                    Workspace<T>& ws) {
    check_3d(x, "deconv_forward");
    const int cin = x.dim(0), h = x.dim(1), wd = x.dim(2);
    if (w.dim(0) != cin) throw std::invalid_argument("deconv_forward: kernel input channels mismatch");
    const int cout = w.dim(1), kh = w.dim(2), kw = w.dim(3);
    const int sh = deconv_out_size(h, kh, pad, stride);
    const int sw = deconv_out_size(wd, kw, pad, stride);
    const int k = cout * kh * kw;
    const int n = h * wd;

    T* col = ws.col_buf(static_cast<size_t>(k) * n);
    gemm(true, false, k, n, cin, T(1), w.ptr(), k, x.ptr(), n, T(0), col, n);
    y.reset({cout, sh, sw});
    col2im(col, cout, sh, sw, kh, kw, pad, stride, y.ptr());
    for (int c = 0; c < cout; ++c) {
        T* plane = y.ptr() + static_cast<size_t>(c) * sh * sw;
        const T bias = b.data[static_cast<size_t>(c)];
        for (int i = 0; i < sh * sw; ++i) plane[i] += bias;
    }
}

template <typename T>
void deconv_backward(const Tensor<T>& x, const Tensor<T>& w, int stride, int pad, const Tensor<T>& dy, Tensor<T>* dx,
                     Tensor<T>& dw, Tensor<T>& db, bool accumulate_dx, Workspace<T>& ws) {
    const int cin = x.dim(0), h = x.dim(1), wd = x.dim(2);
    const int cout = w.dim(1), kh = w.dim(2), kw = w.dim(3);
    const int sh = dy.dim(1), sw = dy.dim(2);
    const int k = cout * kh * kw;
    const int n = h * wd;

    for (int c = 0; c < cout; ++c) {
        const T* plane = dy.ptr() + static_cast<size_t>(c) * sh * sw;
        double acc = 0.0;
        for (int i = 0; i < sh * sw; ++i) acc += static_cast<double>(plane[i]);
        db.data[static_cast<size_t>(c)] += static_cast<T>(acc);
    }

    T* dcol = ws.dcol_buf(static_cast<size_t>(k) * n);
    im2col(dy.ptr(), cout, sh, sw, kh, kw, pad, stride, dcol);
    gemm(false, true, cin, k, n, T(1), x.ptr(), n, dcol, n, T(1), dw.ptr(), k);

    if (dx) {
        if (!accumulate_dx) dx->reset({cin, h, wd});
        gemm(false, false, cin, n, k, T(1), w.ptr(), k, dcol, n, T(1), dx->ptr(), n);
    }
}

template <typename T>
void instance_norm_forward(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta, double eps,
                           Tensor<T>& y, InStats& stats) {
    check_3d(x, "instance_norm_forward");
    const int c = x.dim(0);
    const size_t hw = static_cast<size_t>(x.dim(1)) * x.dim(2);
    y.reset(x.shape);
    stats.mean.assign(c, 0.0);
    stats.invstd.assign(c, 0.0);
    for (int ch = 0; ch < c; ++ch) {
        const T* plane = x.ptr() + hw * ch;
        double sum = 0.0;
        for (size_t i = 0; i < hw; ++i) sum += static_cast<double>(plane[i]);
        const double mean = sum / static_cast<double>(hw);
        double var = 0.0;
        for (size_t i = 0; i < hw; ++i) {
            const double d = static_cast<double>(plane[i]) - mean;
            var += d * d;
        }
        var /= static_cast<double>(hw);
        const double invstd = 1.0 / std::sqrt(var + eps);
        stats.mean[static_cast<size_t>(ch)] = mean;
        stats.invstd[static_cast<size_t>(ch)] = invstd;
        const double g = static_cast<double>(gamma.data[static_cast<size_t>(ch)]);
        const double bt = static_cast<double>(beta.data[static_cast<size_t>(ch)]);
        T* out = y.ptr() + hw * ch;
        for (size_t i = 0; i < hw; ++i) {
            out[i] = static_cast<T>((static_cast<double>(plane[i]) - mean) * invstd * g + bt);
        }
    }
}

template <typename T>
void instance_norm_backward(const Tensor<T>& x, const Tensor<T>& gamma, const InStats& stats, const Tensor<T>& dy,
                            Tensor<T>& dx, Tensor<T>& dgamma, Tensor<T>& dbeta) {
    const int c = x.dim(0);
    const size_t hw = static_cast<size_t>(x.dim(1)) * x.dim(2);
    dx.reset(x.shape);
    for (int ch = 0; ch < c; ++ch) {
        const T* xp = x.ptr() + hw * ch;
        const T* dyp = dy.ptr() + hw * ch;
        T* dxp = dx.ptr() + hw * ch;
        const double mean = stats.mean[static_cast<size_t>(ch)];
        const double invstd = stats.invstd[static_cast<size_t>(ch)];
        const double g = static_cast<double>(gamma.data[static_cast<size_t>(ch)]);

        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (size_t i = 0; i < hw; ++i) {
            const double xhat = (static_cast<double>(xp[i]) - mean) * invstd;
            const double d = static_cast<double>(dyp[i]);
            sum_dy += d;
            sum_dy_xhat += d * xhat;
        }
        dgamma.data[static_cast<size_t>(ch)] += static_cast<T>(sum_dy_xhat);
        dbeta.data[static_cast<size_t>(ch)] += static_cast<T>(sum_dy);

        const double m1 = sum_dy / static_cast<double>(hw);
        const double m2 = sum_dy_xhat / static_cast<double>(hw);
        for (size_t i = 0; i < hw; ++i) {
            const double xhat = (static_cast<double>(xp[i]) - mean) * invstd;
            dxp[i] = static_cast<T>(g * invstd * (static_cast<double>(dyp[i]) - m1 - xhat * m2));
        }
    }
}

template <typename T>
void relu_inplace(Tensor<T>& t, double* min_abs_preact) {
    if (min_abs_preact) {
        for (T& v : t.data) {
            const double a = std::abs(static_cast<double>(v));
            if (a < *min_abs_preact) *min_abs_preact = a;
            if (v < T(0)) v = T(0);
        }
    } else {
        for (T& v : t.data) {
            if (v < T(0)) v = T(0);
        }
    }
}

template <typename T>
void relu_backward(const Tensor<T>& activated, const Tensor<T>& dy, Tensor<T>& dx) {
    dx.reset(dy.shape);
    for (size_t i = 0; i < dy.data.size(); ++i) {
        dx.data[i] = activated.data[i] > T(0) ? dy.data[i] : T(0);
    }
}

template <typename T>
void tanh_forward(const Tensor<T>& x, Tensor<T>& y) {
    y.reset(x.shape);
    for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = static_cast<T>(std::tanh(static_cast<double>(x.data[i])));
}

template <typename T>
void tanh_backward(const Tensor<T>& y, const Tensor<T>& dy, Tensor<T>& dx) {
    dx.reset(y.shape);
    for (size_t i = 0; i < y.data.size(); ++i) {
        const double t = static_cast<double>(y.data[i]);
        dx.data[i] = static_cast<T>(static_cast<double>(dy.data[i]) * (1.0 - t * t));
    }
}

#define LFDEBLUR_INSTANTIATE(T)                                                                                     \
    template void conv_forward<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, int, int, Tensor<T>&,       \
                                  Workspace<T>&);                                                                   \
    template void conv_backward<T>(const Tensor<T>&, const Tensor<T>&, int, int, const Tensor<T>&, Tensor<T>*,      \
                                   Tensor<T>&, Tensor<T>&, bool, Workspace<T>&);                                    \
    template void deconv_forward<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, int, int, Tensor<T>&,     \
                                    Workspace<T>&);                                                                 \
    template void deconv_backward<T>(const Tensor<T>&, const Tensor<T>&, int, int, const Tensor<T>&, Tensor<T>*,    \
                                     Tensor<T>&, Tensor<T>&, bool, Workspace<T>&);                                  \
    template void instance_norm_forward<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, double,            \
                                           Tensor<T>&, InStats&);                                                   \
    template void instance_norm_backward<T>(const Tensor<T>&, const Tensor<T>&, const InStats&, const Tensor<T>&,   \
                                            Tensor<T>&, Tensor<T>&, Tensor<T>&);                                    \
    template void relu_inplace<T>(Tensor<T>&, double*);                                                             \
    template void relu_backward<T>(const Tensor<T>&, const Tensor<T>&, Tensor<T>&);                                 \
    template void tanh_forward<T>(const Tensor<T>&, Tensor<T>&);                                                    \
    template void tanh_backward<T>(const Tensor<T>&, const Tensor<T>&, Tensor<T>&);

LFDEBLUR_INSTANTIATE(float)
LFDEBLUR_INSTANTIATE(double)
#undef LFDEBLUR_INSTANTIATE

}  // namespace lfdeblur::net
