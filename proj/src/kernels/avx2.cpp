// Compiled with -mavx2 -mfma. Nothing in this file may run before the
// dispatcher has confirmed CPU support.

#include "qmpemba/kernels.hpp"

#include <immintrin.h>

namespace qmpemba::kernels {
namespace {

// [re, im, re, im] layout: two complex numbers per register.

inline __m256d swap_pairs(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

// v * s for a broadcast complex scalar s.
inline __m256d mul_scalar(__m256d v, __m256d s_re, __m256d s_im) {
    return _mm256_addsub_pd(_mm256_mul_pd(v, s_re), _mm256_mul_pd(swap_pairs(v), s_im));
}

// Lane-wise complex product a * b.
inline __m256d mul_lanes(__m256d a, __m256d b) {
    const __m256d b_re = _mm256_movedup_pd(b);
    const __m256d b_im = _mm256_permute_pd(b, 0b1111);
    return _mm256_addsub_pd(_mm256_mul_pd(a, b_re), _mm256_mul_pd(swap_pairs(a), b_im));
}

inline void store_block(double* dst, __m256d prod, __m256d alpha_re, __m256d alpha_im,
                        __m256d beta_re, __m256d beta_im, bool beta_zero) {
    __m256d out = mul_scalar(prod, alpha_re, alpha_im);
    if (!beta_zero) {
        out = _mm256_add_pd(out, mul_scalar(_mm256_loadu_pd(dst), beta_re, beta_im));
    }
    _mm256_storeu_pd(dst, out);
}

// Four rows by NC columns of C, accumulated over the full inner dimension.
template <int NC>
inline void micro_kernel(std::size_t k, const double* a, std::size_t lda, const cplx* b,
                         std::size_t ldb, double* c, std::size_t ldc, __m256d alpha_re,
                         __m256d alpha_im, __m256d beta_re, __m256d beta_im, bool beta_zero) {
    __m256d acc_re[NC][2];
    __m256d acc_im[NC][2];
    for (int jj = 0; jj < NC; ++jj) {
        for (int v = 0; v < 2; ++v) {
            acc_re[jj][v] = _mm256_setzero_pd();
            acc_im[jj][v] = _mm256_setzero_pd();
        }
    }
    for (std::size_t p = 0; p < k; ++p) {
        const double* ap = a + 2 * p * lda;
        const __m256d a0 = _mm256_loadu_pd(ap);
        const __m256d a1 = _mm256_loadu_pd(ap + 4);
        const __m256d a0s = swap_pairs(a0);
        const __m256d a1s = swap_pairs(a1);
        for (int jj = 0; jj < NC; ++jj) {
            const double* bp = reinterpret_cast<const double*>(b + p + jj * ldb);
            const __m256d b_re = _mm256_broadcast_sd(bp);
            const __m256d b_im = _mm256_broadcast_sd(bp + 1);
            acc_re[jj][0] = _mm256_fmadd_pd(a0, b_re, acc_re[jj][0]);
            acc_im[jj][0] = _mm256_fmadd_pd(a0s, b_im, acc_im[jj][0]);
            acc_re[jj][1] = _mm256_fmadd_pd(a1, b_re, acc_re[jj][1]);
            acc_im[jj][1] = _mm256_fmadd_pd(a1s, b_im, acc_im[jj][1]);
        }
    }
    for (int jj = 0; jj < NC; ++jj) {
        double* cj = c + 2 * jj * ldc;
        store_block(cj, _mm256_addsub_pd(acc_re[jj][0], acc_im[jj][0]), alpha_re, alpha_im,
                    beta_re, beta_im, beta_zero);
        store_block(cj + 4, _mm256_addsub_pd(acc_re[jj][1], acc_im[jj][1]), alpha_re,
                    alpha_im, beta_re, beta_im, beta_zero);
    }
}

void gemm_tail_rows(std::size_t row0, std::size_t m, std::size_t n, std::size_t k, cplx alpha,
                    const cplx* a, std::size_t lda, const cplx* b, std::size_t ldb, cplx beta,
                    cplx* c, std::size_t ldc) {
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = row0; i < m; ++i) {
            double acc_re = 0.0;
            double acc_im = 0.0;
            for (std::size_t p = 0; p < k; ++p) {
                const cplx x = a[i + p * lda];
                const cplx y = b[p + j * ldb];
                acc_re += x.real() * y.real() - x.imag() * y.imag();
                acc_im += x.real() * y.imag() + x.imag() * y.real();
            }
            const cplx out{alpha.real() * acc_re - alpha.imag() * acc_im,
                           alpha.real() * acc_im + alpha.imag() * acc_re};
            cplx& dst = c[i + j * ldc];
            dst = beta == cplx{0.0, 0.0} ? out : out + beta * dst;
        }
    }
}

void gemm_avx2(std::size_t m, std::size_t n, std::size_t k, cplx alpha, const cplx* a,
               std::size_t lda, const cplx* b, std::size_t ldb, cplx beta, cplx* c,
               std::size_t ldc) {
    const __m256d alpha_re = _mm256_set1_pd(alpha.real());
    const __m256d alpha_im = _mm256_set1_pd(alpha.imag());
    const __m256d beta_re = _mm256_set1_pd(beta.real());
    const __m256d beta_im = _mm256_set1_pd(beta.imag());
    const bool beta_zero = beta == cplx{0.0, 0.0};
    const std::size_t m4 = m - m % 4;
    const double* ad = reinterpret_cast<const double*>(a);
    double* cd = reinterpret_cast<double*>(c);

    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        for (std::size_t i = 0; i < m4; i += 4) {
            micro_kernel<2>(k, ad + 2 * i, lda, b + j * ldb, ldb, cd + 2 * (i + j * ldc), ldc,
                            alpha_re, alpha_im, beta_re, beta_im, beta_zero);
        }
    }
    for (; j < n; ++j) {
        for (std::size_t i = 0; i < m4; i += 4) {
            micro_kernel<1>(k, ad + 2 * i, lda, b + j * ldb, ldb, cd + 2 * (i + j * ldc), ldc,
                            alpha_re, alpha_im, beta_re, beta_im, beta_zero);
        }
    }
    if (m4 < m) gemm_tail_rows(m4, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void axpy_avx2(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
    const __m256d s_re = _mm256_set1_pd(alpha.real());
    const __m256d s_im = _mm256_set1_pd(alpha.imag());
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, mul_scalar(xv, s_re, s_im)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double norm_sq_avx2(std::size_t n, const cplx* x) {
    const double* xd = reinterpret_cast<const double*>(x);
    const std::size_t len = 2 * n;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= len; i += 8) {
        const __m256d v0 = _mm256_loadu_pd(xd + i);
        const __m256d v1 = _mm256_loadu_pd(xd + i + 4);
        acc0 = _mm256_fmadd_pd(v0, v0, acc0);
        acc1 = _mm256_fmadd_pd(v1, v1, acc1);
    }
    for (; i + 4 <= len; i += 4) {
        const __m256d v0 = _mm256_loadu_pd(xd + i);
        acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
    double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < len; ++i) total += xd[i] * xd[i];
    return total;
}

void diag_scale_avx2(std::size_t m, std::size_t n, const cplx* left, const cplx* right,
                     const cplx* x, std::size_t ldx, cplx* y, std::size_t ldy) {
    const double* ld = reinterpret_cast<const double*>(left);
    for (std::size_t j = 0; j < n; ++j) {
        const __m256d r_re = _mm256_set1_pd(right[j].real());
        const __m256d r_im = _mm256_set1_pd(right[j].imag());
        const double* xj = reinterpret_cast<const double*>(x + j * ldx);
        double* yj = reinterpret_cast<double*>(y + j * ldy);
        std::size_t i = 0;
        for (; i + 2 <= m; i += 2) {
            const __m256d w = mul_scalar(_mm256_loadu_pd(ld + 2 * i), r_re, r_im);
            _mm256_storeu_pd(yj + 2 * i, mul_lanes(w, _mm256_loadu_pd(xj + 2 * i)));
        }
        for (; i < m; ++i) y[i + j * ldy] = left[i] * right[j] * x[i + j * ldx];
    }
}

}  // namespace

const KernelTable* avx2_kernels() {
    static const KernelTable table{Isa::Avx2, gemm_avx2, axpy_avx2, norm_sq_avx2,
                                   diag_scale_avx2};
    return &table;
}

}  // namespace qmpemba::kernels
