#include "qmpemba/linalg.hpp"

#include "qmpemba/errors.hpp"
#include "qmpemba/kernels.hpp"

#include <cmath>

namespace qmpemba::linalg {

namespace {
std::size_t idx(Eigen::Index n) { return static_cast<std::size_t>(n); }
}  // namespace

void multiply_into(const Matrix& a, const Matrix& b, cplx alpha, cplx beta, Matrix& c) {
    if (a.cols() != b.rows()) throw InvalidParameter("multiply: inner dimensions differ");
    if (beta == cplx{0.0, 0.0}) {
        c.resize(a.rows(), b.cols());
    } else if (c.rows() != a.rows() || c.cols() != b.cols()) {
        throw InvalidParameter("multiply: accumulator has the wrong shape");
    }
    if (a.rows() == 0 || b.cols() == 0) return;
    kernels::active().gemm(idx(a.rows()), idx(b.cols()), idx(a.cols()), alpha, a.data(),
                           idx(a.rows()), b.data(), idx(b.rows()), beta, c.data(),
                           idx(c.rows()));
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    Matrix c;
    multiply_into(a, b, 1.0, 0.0, c);
    return c;
}

Matrix multiply_adjoint(const Matrix& a, const Matrix& b) {
    const Matrix b_adj = b.adjoint();
    return multiply(a, b_adj);
}

Matrix diag_scale(const Vector& left, const Matrix& x, const Vector& right) {
    if (left.size() != x.rows() || right.size() != x.cols()) {
        throw InvalidParameter("diag_scale: vector lengths do not match the matrix");
    }
    Matrix y(x.rows(), x.cols());
    kernels::active().diag_scale(idx(x.rows()), idx(x.cols()), left.data(), right.data(),
                                 x.data(), idx(x.rows()), y.data(), idx(y.rows()));
    return y;
}

void axpy(cplx alpha, const Matrix& x, Matrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        throw InvalidParameter("axpy: shapes differ");
    }
    kernels::active().axpy(idx(x.size()), alpha, x.data(), y.data());
}

double frobenius_norm(const Matrix& m) {
    return std::sqrt(kernels::active().norm_sq(idx(m.size()), m.data()));
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double hermiticity_defect(const Matrix& m) { return max_abs(m - m.adjoint()); }

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace qmpemba::linalg
