#include "qmpemba/kernels.hpp"

namespace qmpemba::kernels {
namespace {

// std::complex operator* goes through __muldc3 for inf/nan recovery, which we
// do not need; the arithmetic is spelled out on the interleaved doubles.

void gemm_scalar(std::size_t m, std::size_t n, std::size_t k, cplx alpha, const cplx* a,
                 std::size_t lda, const cplx* b, std::size_t ldb, cplx beta, cplx* c,
                 std::size_t ldc) {
    const double* ad = reinterpret_cast<const double*>(a);
    for (std::size_t j = 0; j < n; ++j) {
        double* cj = reinterpret_cast<double*>(c + j * ldc);
        for (std::size_t i = 0; i < m; ++i) {
            double acc_re = 0.0;
            double acc_im = 0.0;
            for (std::size_t p = 0; p < k; ++p) {
                const double* aip = ad + 2 * (i + p * lda);
                const cplx bp = b[p + j * ldb];
                acc_re += aip[0] * bp.real() - aip[1] * bp.imag();
                acc_im += aip[0] * bp.imag() + aip[1] * bp.real();
            }
            const double out_re = alpha.real() * acc_re - alpha.imag() * acc_im;
            const double out_im = alpha.real() * acc_im + alpha.imag() * acc_re;
            if (beta == cplx{0.0, 0.0}) {
                cj[2 * i] = out_re;
                cj[2 * i + 1] = out_im;
            } else {
                const double c_re = cj[2 * i];
                const double c_im = cj[2 * i + 1];
                cj[2 * i] = out_re + beta.real() * c_re - beta.imag() * c_im;
                cj[2 * i + 1] = out_im + beta.real() * c_im + beta.imag() * c_re;
            }
        }
    }
}

void axpy_scalar(std::size_t n, cplx alpha, const cplx* x, cplx* y) {
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    for (std::size_t i = 0; i < n; ++i) {
        yd[2 * i] += alpha.real() * xd[2 * i] - alpha.imag() * xd[2 * i + 1];
        yd[2 * i + 1] += alpha.real() * xd[2 * i + 1] + alpha.imag() * xd[2 * i];
    }
}

double norm_sq_scalar(std::size_t n, const cplx* x) {
    const double* xd = reinterpret_cast<const double*>(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < 2 * n; ++i) acc += xd[i] * xd[i];
    return acc;
}

void diag_scale_scalar(std::size_t m, std::size_t n, const cplx* left, const cplx* right,
                       const cplx* x, std::size_t ldx, cplx* y, std::size_t ldy) {
    for (std::size_t j = 0; j < n; ++j) {
        const double* xj = reinterpret_cast<const double*>(x + j * ldx);
        double* yj = reinterpret_cast<double*>(y + j * ldy);
        const double r_re = right[j].real();
        const double r_im = right[j].imag();
        for (std::size_t i = 0; i < m; ++i) {
            const double w_re = left[i].real() * r_re - left[i].imag() * r_im;
            const double w_im = left[i].real() * r_im + left[i].imag() * r_re;
            const double x_re = xj[2 * i];
            const double x_im = xj[2 * i + 1];
            yj[2 * i] = w_re * x_re - w_im * x_im;
            yj[2 * i + 1] = w_re * x_im + w_im * x_re;
        }
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{Isa::Scalar, gemm_scalar, axpy_scalar, norm_sq_scalar,
                                   diag_scale_scalar};
    return table;
}

}  // namespace qmpemba::kernels
