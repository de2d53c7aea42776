#pragma once

#include <Eigen/Dense>

#include <complex>

namespace qmpemba {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace linalg {

// Products routed through the dispatched kernels.
Matrix multiply(const Matrix& a, const Matrix& b);
Matrix multiply_adjoint(const Matrix& a, const Matrix& b);  // a * b^dagger
void multiply_into(const Matrix& a, const Matrix& b, cplx alpha, cplx beta, Matrix& c);

// Y(i, j) = left[i] * X(i, j) * right[j]
Matrix diag_scale(const Vector& left, const Matrix& x, const Vector& right);

void axpy(cplx alpha, const Matrix& x, Matrix& y);

double frobenius_norm(const Matrix& m);

// max |m_ij|
double max_abs(const Matrix& m);

double hermiticity_defect(const Matrix& m);

Matrix hermitian_part(const Matrix& m);

}  // namespace linalg
}  // namespace qmpemba
