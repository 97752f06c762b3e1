// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace lfdeblur::net {

/// Dense row-major tensor. Activations are (C, H, W), conv kernels
/// (out, in, kh, kw), deconv kernels (in, out, kh, kw), biases (C).
template <typename T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) { reset(std::move(s)); }

    void reset(std::vector<int> s) {
        shape = std::move(s);
        size_t n = 1;
        for (int d : shape) n *= static_cast<size_t>(d);
        data.assign(n, T(0));
    }

    size_t numel() const { return data.size(); }
    bool empty() const { return data.empty(); }
    int dim(int i) const { return shape[static_cast<size_t>(i)]; }

    void zero() { std::fill(data.begin(), data.end(), T(0)); }

    T* ptr() { return data.data(); }
    const T* ptr() const { return data.data(); }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

/// Row-major C = alpha * op(A)[m x k] * op(B)[k x n] + beta * C[m x n],
/// backed by cblas_{s,d}gemm.
void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda, const float* b,
          int ldb, float beta, float* c, int ldc);
void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a, int lda, const double* b,
          int ldb, double beta, double* c, int ldc);

/// Caffe-style im2col: (C, H, W) -> (C*kh*kw, OH*OW) with zero padding.
template <typename T>
void im2col(const T* src, int channels, int height, int width, int kh, int kw, int pad, int stride, T* col);

/// Scatter-add inverse of im2col; dst must be pre-initialized.
template <typename T>
void col2im(const T* col, int channels, int height, int width, int kh, int kw, int pad, int stride, T* dst);

inline int conv_out_size(int in, int kernel, int pad, int stride) { return (in + 2 * pad - kernel) / stride + 1; }
inline int deconv_out_size(int in, int kernel, int pad, int stride) { return stride * (in - 1) - 2 * pad + kernel; }

}  // namespace lfdeblur::net
