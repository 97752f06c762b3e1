// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "lfdeblur/net/tensor.hpp"

namespace lfdeblur::net {

/// Per-channel statistics an instance norm saved at forward time; backward
/// must renormalize with exactly these values.
struct InStats {
    std::vector<double> mean;
    std::vector<double> invstd;
};

/// Grow-only scratch for im2col/col2im matrices, shared across layers.
template <typename T>
struct Workspace {
    Tensor<T> col;
    Tensor<T> dcol;

    T* col_buf(size_t n) {
        if (col.data.size() < n) col.data.resize(n);
        return col.data.data();
    }
    T* dcol_buf(size_t n) {
        if (dcol.data.size() < n) dcol.data.resize(n);
        return dcol.data.data();
    }
};

// ---- convolution ----------------------------------------------------------

template <typename T>
void conv_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b, int stride, int pad, Tensor<T>& y,
                  Workspace<T>& ws);

/// Accumulates dw/db. When dx is non-null it receives the input gradient:
/// overwritten when accumulate_dx is false, added to otherwise.
template <typename T>
void conv_backward(const Tensor<T>& x, const Tensor<T>& w, int stride, int pad, const Tensor<T>& dy, Tensor<T>* dx,
                   Tensor<T>& dw, Tensor<T>& db, bool accumulate_dx, Workspace<T>& ws);

// ---- transposed convolution ------------------------------------------------

/// Kernel layout (in, out, kh, kw); output is stride * input size for the
/// 4x4 stride-2 pad-1 configuration used here.
template <typename T>
void deconv_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b, int stride, int pad, Tensor<T>& y,
                    Workspace<T>& ws);

template <typename T>
void deconv_backward(const Tensor<T>& x, const Tensor<T>& w, int stride, int pad, const Tensor<T>& dy, Tensor<T>* dx,
                     Tensor<T>& dw, Tensor<T>& db, bool accumulate_dx, Workspace<T>& ws);

// ---- instance normalization -------------------------------------------------

/// y = (x - mean_c) / sqrt(var_c + eps) * gamma_c + beta_c, statistics over
/// the spatial positions of each channel, accumulated in double.
template <typename T>
void instance_norm_forward(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta, double eps,
                           Tensor<T>& y, InStats& stats);

template <typename T>
void instance_norm_backward(const Tensor<T>& x, const Tensor<T>& gamma, const InStats& stats, const Tensor<T>& dy,
                            Tensor<T>& dx, Tensor<T>& dgamma, Tensor<T>& dbeta);

// ---- activations ------------------------------------------------------------

template <typename T>
void relu_inplace(Tensor<T>& t, double* min_abs_preact = nullptr);

/// dx = dy where the stored activation output is positive.
template <typename T>
void relu_backward(const Tensor<T>& activated, const Tensor<T>& dy, Tensor<T>& dx);

template <typename T>
void tanh_forward(const Tensor<T>& x, Tensor<T>& y);

template <typename T>
void tanh_backward(const Tensor<T>& y, const Tensor<T>& dy, Tensor<T>& dx);

}  // namespace lfdeblur::net
