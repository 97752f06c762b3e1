// SPDX-License-Identifier: Apache-2.0
#include "lfdeblur/net/tensor.hpp"

#include <cblas.h>

namespace lfdeblur::net {

void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda, const float* b,
          int ldb, float beta, float* c, int ldc) {
    cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans, trans_b ? CblasTrans : CblasNoTrans, m, n, k,
                alpha, a, lda, b, ldb, beta, c, ldc);
}

void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a, int lda, const double* b,
          int ldb, double beta, double* c, int ldc) {
    cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans, trans_b ? CblasTrans : CblasNoTrans, m, n, k,
                alpha, a, lda, b, ldb, beta, c, ldc);
}

template <typename T>
void im2col(const T* src, int channels, int height, int width, int kh, int kw, int pad, int stride, T* col) {
    const int oh = conv_out_size(height, kh, pad, stride);
    const int ow = conv_out_size(width, kw, pad, stride);
    const size_t n = static_cast<size_t>(oh) * ow;
    for (int c = 0; c < channels; ++c) {
        const T* plane = src + static_cast<size_t>(c) * height * width;
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx) {
                T* row = col + ((static_cast<size_t>(c) * kh + ky) * kw + kx) * n;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= height) {
                        for (int ox = 0; ox < ow; ++ox) row[static_cast<size_t>(oy) * ow + ox] = T(0);
                        continue;
                    }
                    const T* src_row = plane + static_cast<size_t>(iy) * width;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        row[static_cast<size_t>(oy) * ow + ox] =
                            (ix >= 0 && ix < width) ? src_row[ix] : T(0);
                    }
                }
            }
        }
    }
}

template <typename T>
void col2im(const T* col, int channels, int height, int width, int kh, int kw, int pad, int stride, T* dst) {
    const int oh = conv_out_size(height, kh, pad, stride);
    const int ow = conv_out_size(width, kw, pad, stride);
    const size_t n = static_cast<size_t>(oh) * ow;
    for (int c = 0; c < channels; ++c) {
        T* plane = dst + static_cast<size_t>(c) * height * width;
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx) {
                const T* row = col + ((static_cast<size_t>(c) * kh + ky) * kw + kx) * n;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= height) continue;
                    T* dst_row = plane + static_cast<size_t>(iy) * width;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        if (ix >= 0 && ix < width) dst_row[ix] += row[static_cast<size_t>(oy) * ow + ox];
                    }
                }
            }
        }
    }
}

template void im2col<float>(const float*, int, int, int, int, int, int, int, float*);
template void im2col<double>(const double*, int, int, int, int, int, int, int, double*);
template void col2im<float>(const float*, int, int, int, int, int, int, int, float*);
template void col2im<double>(const double*, int, int, int, int, int, int, int, double*);

}  // namespace lfdeblur::net
