#pragma once

// Dense complex kernels with a portable scalar reference and an AVX2/FMA
// variant. The variant is picked once at startup from CPUID; setting
// QMPEMBA_SIMD=scalar in the environment pins the reference path.
//
// All matrices are column-major with an explicit leading dimension, which is
// the layout of Eigen::MatrixXcd.

#include <complex>
#include <cstddef>
#include <string_view>

namespace qmpemba::kernels {

using cplx = std::complex<double>;

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    Isa isa;

    // C = alpha * A(m x k) * B(k x n) + beta * C(m x n)
    void (*gemm)(std::size_t m, std::size_t n, std::size_t k, cplx alpha, const cplx* a,
                 std::size_t lda, const cplx* b, std::size_t ldb, cplx beta, cplx* c,
                 std::size_t ldc);

    // y += alpha * x
    void (*axpy)(std::size_t n, cplx alpha, const cplx* x, cplx* y);

    // sum_i |x_i|^2
    double (*norm_sq)(std::size_t n, const cplx* x);

    // Y(i, j) = left[i] * X(i, j) * right[j]
    void (*diag_scale)(std::size_t m, std::size_t n, const cplx* left, const cplx* right,
                       const cplx* x, std::size_t ldx, cplx* y, std::size_t ldy);
};

const KernelTable& scalar_kernels();

// Null when the binary was built without AVX2 support.
const KernelTable* avx2_kernels();

// Best variant supported by both the binary and the running CPU.
Isa detected_isa();

// Table used by the linear-algebra layer.
const KernelTable& active();

// Overrides the active table (tests and benchmarking). Throws InvalidParameter
// if the requested variant is not available.
void select(Isa isa);

std::string_view name(Isa isa);

}  // namespace qmpemba::kernels
